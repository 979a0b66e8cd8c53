"""Arithmetic on the circle S^1 = R/Z.

Angles are fractions of a turn. Points live in [0, 1) and signed
displacements in (-0.5, 0.5]. Every function accepts scalars or arrays.
"""

import numpy as np

__all__ = [
    "wrap",
    "wrap_signed",
    "circ_add",
    "circ_sub",
    "circ_dist",
    "deg_to_turns",
]


def _check_finite(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("circle arithmetic requires finite input")
    return x


def _out(r, like):
    return float(r) if np.ndim(like) == 0 else r


def wrap(x):
    """Reduce ``x`` modulo 1 into the canonical interval [0, 1).

    Parameters
    ----------
    x : float or array_like
        Any finite reals.

    Returns
    -------
    float or ndarray
        ``x - floor(x)``; values that round up to 1.0 are mapped to 0.0.
    """
    a = _check_finite(x)
    r = a - np.floor(a)
    r = np.where(r >= 1.0, 0.0, r)
    return _out(r, x)


def wrap_signed(d):
    """Minimal signed representative of ``d`` modulo 1, in (-0.5, 0.5].

    The half-turn tie is resolved towards +0.5, so ``wrap_signed(-0.5)``
    is ``0.5``.
    """
    a = _check_finite(d)
    r = a - np.ceil(a - 0.5)
    return _out(r, d)


def circ_add(x, y):
    return wrap(np.add(x, y, dtype=float))


def circ_sub(x, y):
    return wrap(np.subtract(x, y, dtype=float))


def circ_dist(x, y):
    """Geodesic (arc-length) distance on the circle, in [0, 0.5]."""
    return np.abs(wrap_signed(np.subtract(x, y, dtype=float)))


def deg_to_turns(deg):
    """Convert degrees to fractions of a turn in [0, 1)."""
    return wrap(np.divide(deg, 360.0, dtype=float))

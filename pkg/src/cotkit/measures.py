"""Probability measures on the circle, their periodic CDFs and quantiles.

Two concrete representations are used throughout the package:

* :class:`DiscreteMeasure` -- finitely many atoms with positive masses.
* :class:`GridDensity` -- a piecewise-constant density on M equal cells,
  which is atomless and therefore usable as a reference measure.
  ``UNIFORM`` is the one-cell grid, i.e. the Lebesgue measure.

CDFs follow ``F(y) = mu([0, y))`` extended by ``F(y + n) = F(y) + n``;
quantiles are the strict generalized inverse ``inf{x : F(x) > y}`` with the
matching extension ``Q(y + n) = Q(y) + n``.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .circle import wrap

__all__ = [
    "InvalidMeasureError",
    "DiscreteMeasure",
    "GridDensity",
    "UNIFORM",
    "Quantile",
    "cdf",
    "cdf_cut",
    "quantile",
    "expectation",
    "to_discrete",
    "pushforward",
    "rotate",
    "is_atomless",
]

#: sums further than this from 1 are rejected
MASS_TOL = 1e-9
#: sums within this of 1 are kept bit-for-bit
EXACT_TOL = 1e-12
#: atoms closer than this (circularly) are merged
MERGE_TOL = 1e-12


class InvalidMeasureError(ValueError):
    pass


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _check_total(total, what):
    if not np.isfinite(total) or abs(total - 1.0) > MASS_TOL:
        raise InvalidMeasureError(f"{what} must sum to 1 (got {total!r}); use from_weights to normalize")
    return abs(total - 1.0) > EXACT_TOL


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Sorted, merged atoms on [0, 1) with masses summing to 1.

    Positions are wrapped into [0, 1) at construction, atoms closer than
    ``MERGE_TOL`` are merged (masses summed, first position kept) and the
    masses are renormalized when their sum is off by float noise only.
    """

    positions: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.positions, dtype=float))
        m = np.atleast_1d(np.asarray(self.masses, dtype=float))
        if x.ndim != 1 or x.shape != m.shape:
            raise InvalidMeasureError("positions and masses must be 1-D arrays of equal length")
        if x.size == 0:
            raise InvalidMeasureError("a measure needs at least one atom")
        if not np.all(np.isfinite(x)) or not np.all(np.isfinite(m)):
            raise InvalidMeasureError("positions and masses must be finite")
        bad = np.flatnonzero(m <= 0)
        if bad.size:
            raise InvalidMeasureError(f"mass at index {bad[0]} is not positive ({m[bad[0]]!r})")
        if _check_total(m.sum(), "masses"):
            m = m / m.sum()

        x = wrap(x)
        order = np.argsort(x, kind="stable")
        x, m = x[order], m[order]
        if x.size > 1:
            x, m = _merge_close(x, m)
        object.__setattr__(self, "positions", _readonly(x))
        object.__setattr__(self, "masses", _readonly(m))

    @classmethod
    def from_weights(cls, positions, weights=None):
        """Build a measure from non-normalized positive weights (uniform if omitted)."""
        x = np.atleast_1d(np.asarray(positions, dtype=float))
        w = np.ones_like(x) if weights is None else np.atleast_1d(np.asarray(weights, dtype=float))
        total = w.sum()
        if not np.isfinite(total) or total <= 0:
            raise InvalidMeasureError("weights must have a positive finite sum")
        return cls(x, w / total)

    @classmethod
    def dirac(cls, c):
        return cls(np.array([c], dtype=float), np.array([1.0]))

    @classmethod
    def uniform_grid(cls, M):
        """M equal atoms at the cell centers (i + 0.5) / M."""
        M = int(M)
        return cls((np.arange(M) + 0.5) / M, np.full(M, 1.0 / M))

    def __len__(self):
        return self.positions.size

    def __repr__(self):
        return f"DiscreteMeasure(N={len(self)})"

    @cached_property
    def levels(self):
        """Cumulative masses ``[0, c_1, ..., c_N]`` with ``c_N`` pinned to 1."""
        c = np.concatenate([[0.0], np.cumsum(self.masses)])
        c[-1] = 1.0
        return _readonly(c)

    def allclose(self, other, atol=1e-12):
        return (
            isinstance(other, DiscreteMeasure)
            and len(self) == len(other)
            and np.allclose(self.positions, other.positions, rtol=0, atol=atol)
            and np.allclose(self.masses, other.masses, rtol=0, atol=atol)
        )


def _merge_close(x, m):
    gaps = np.diff(x)
    starts = np.concatenate([[0], np.flatnonzero(gaps > MERGE_TOL) + 1])
    if starts.size < x.size:
        x = x[starts]
        m = np.add.reduceat(m, starts)
    if x.size > 1 and (x[0] + 1.0 - x[-1]) <= MERGE_TOL:
        m = m.copy()
        m[0] += m[-1]
        x, m = x[:-1], m[:-1]
    return x, m


@dataclass(frozen=True, eq=False)
class GridDensity:
    """Density on the cells ``[i/M, (i+1)/M)``, constant on each cell.

    ``values`` is the density with respect to the uniform measure, so its
    mean is 1.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.atleast_1d(np.asarray(self.values, dtype=float))
        if v.ndim != 1 or v.size == 0:
            raise InvalidMeasureError("grid density needs a non-empty 1-D array")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise InvalidMeasureError("grid density values must be finite and non-negative")
        if _check_total(v.mean(), "grid density mean"):
            v = v / v.mean()
        object.__setattr__(self, "values", _readonly(v))

    @classmethod
    def from_values(cls, values):
        v = np.asarray(values, dtype=float)
        mean = v.mean()
        if not np.isfinite(mean) or mean <= 0:
            raise InvalidMeasureError("grid density needs a positive finite total")
        return cls(v / mean)

    @property
    def M(self):
        return self.values.size

    @property
    def centers(self):
        return (np.arange(self.M) + 0.5) / self.M

    @cached_property
    def is_uniform(self):
        return bool(np.all(self.values == self.values[0]))

    @cached_property
    def _cum(self):
        c = np.concatenate([[0.0], np.cumsum(self.values) / self.M])
        c[-1] = 1.0
        return c

    def __repr__(self):
        return "UNIFORM" if self.is_uniform and self.M == 1 else f"GridDensity(M={self.M})"


UNIFORM = GridDensity(np.ones(1))


def is_atomless(measure):
    return isinstance(measure, GridDensity)


@dataclass(frozen=True, eq=False)
class Quantile:
    """Periodically extended quantile function made of linear pieces.

    On ``[levels[k], levels[k+1])`` the quantile is
    ``values[k] + slopes[k] * (y - levels[k])``. Discrete measures give zero
    slopes (a step function); grid densities give positive slopes.
    """

    levels: np.ndarray
    values: np.ndarray
    slopes: np.ndarray

    @property
    def is_step(self):
        return not np.any(self.slopes)

    def __call__(self, y, side="right"):
        """Evaluate at ``y``.

        ``side="right"`` is the strict infimum (right-continuous);
        ``side="left"`` returns the left limit ``inf{x : F(x) >= y}``.
        """
        ya = np.asarray(y, dtype=float)
        n = np.floor(ya)
        r = ya - n
        if side == "left":
            at0 = r == 0.0
            r = np.where(at0, 1.0, r)
            n = np.where(at0, n - 1.0, n)
        k = np.searchsorted(self.levels, r, side=side) - 1
        k = np.clip(k, 0, self.values.size - 1)
        out = self.values[k] + self.slopes[k] * (r - self.levels[k]) + n
        return float(out) if np.ndim(y) == 0 else out


def quantile(measure):
    """Quantile function of a :class:`DiscreteMeasure` or :class:`GridDensity`."""
    if isinstance(measure, DiscreteMeasure):
        return Quantile(measure.levels, measure.positions, np.zeros(len(measure)))
    if isinstance(measure, GridDensity):
        M = measure.M
        keep = measure.values > 0
        v = measure.values[keep]
        lv = np.concatenate([[0.0], np.cumsum(v) / M])
        lv[-1] = 1.0
        return Quantile(lv, np.flatnonzero(keep) / M, 1.0 / v)
    raise TypeError(f"not a measure: {type(measure).__name__}")


def cdf(measure, y):
    """Periodic CDF ``F(y) = mu([0, y)) + floor(y)``."""
    ya = np.asarray(y, dtype=float)
    n = np.floor(ya)
    r = ya - n
    if isinstance(measure, DiscreteMeasure):
        out = measure.levels[np.searchsorted(measure.positions, r, side="left")] + n
    elif isinstance(measure, GridDensity):
        M = measure.M
        k = np.minimum((r * M).astype(int), M - 1)
        out = measure._cum[k] + measure.values[k] * (r - k / M) + n
    else:
        raise TypeError(f"not a measure: {type(measure).__name__}")
    return float(out) if np.ndim(y) == 0 else out


def cdf_cut(measure, x0, y):
    """CDF seen from the cutting point ``x0``: ``F(x0 + y) - F(x0)``."""
    return cdf(measure, np.add(x0, y)) - cdf(measure, x0)


def expectation(measure):
    """Linear mean of the measure in canonical coordinates [0, 1)."""
    if isinstance(measure, DiscreteMeasure):
        return float(np.dot(measure.masses, measure.positions))
    if isinstance(measure, GridDensity):
        return float(np.dot(measure.centers, measure.values) / measure.M)
    raise TypeError(f"not a measure: {type(measure).__name__}")


def to_discrete(grid):
    """Atoms at the cell centers carrying the cell masses (empty cells dropped)."""
    if isinstance(grid, DiscreteMeasure):
        return grid
    keep = grid.values > 0
    return DiscreteMeasure.from_weights(grid.centers[keep], grid.values[keep] / grid.M)


def pushforward(measure, T):
    """Image measure ``T_# measure`` for a vectorized map ``T``."""
    x = measure.positions
    return DiscreteMeasure(np.broadcast_to(np.asarray(T(x), dtype=float), x.shape), measure.masses)


def rotate(measure, t):
    return pushforward(measure, lambda x: x + t)

import numpy as np


def mean_abs_power(u, v, p):
    """Average of |z|^p for z moving linearly from ``u`` to ``v``.

    Exact for every p >= 1 (antiderivative z|z|^p / (p+1)), written so that
    nearly equal endpoints do not cancel catastrophically.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if p == 2:
        return (u * u + u * v + v * v) / 3.0
    au, av = np.abs(u), np.abs(v)
    hi = np.maximum(au, av)
    lo = np.minimum(au, av)
    if p == 1:
        same = (u * v) > 0
        with np.errstate(invalid="ignore", divide="ignore"):
            cross = np.where(hi > 0, (hi * hi + lo * lo) / (2.0 * (hi + lo)), 0.0)
        return np.where(same, 0.5 * (hi + lo), cross)

    out = np.zeros(np.broadcast(u, v).shape)
    same = (u * v) > 0
    with np.errstate(invalid="ignore", divide="ignore"):
        # |z|^p monotone on the segment: divided difference of z^(p+1)/(p+1)
        logr = np.log(lo / hi)
        ratio = np.where(logr == 0.0, p + 1.0, np.expm1((p + 1.0) * logr) / np.expm1(logr))
        same_val = hi ** p * ratio / (p + 1.0)
        tot = hi + lo
        cross_val = np.where(tot > 0, (hi ** (p + 1.0) + lo ** (p + 1.0)) / ((p + 1.0) * tot), 0.0)
    out = np.where(same, same_val, cross_val)
    return out


def merged_cuts(*level_arrays):
    """Sorted union of breakpoint arrays on [0, 1], always containing 0 and 1."""
    cuts = np.concatenate([np.asarray(a, dtype=float) for a in level_arrays] + [[0.0, 1.0]])
    cuts = np.unique(cuts)
    return cuts[(cuts >= 0.0) & (cuts <= 1.0)]

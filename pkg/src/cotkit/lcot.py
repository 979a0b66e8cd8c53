"""Linear circular optimal transport: embeddings, distances, geodesics, barycenters.

An embedding is the optimal displacement from a fixed atomless reference
``mu`` to a target ``nu``. Working in reference *levels* ``w = F_mu(x)``
it reads ``nu_hat(x) = q(w) - x`` where ``q(w) = Q_nu(w - alpha)`` is a step
function of ``w`` whose pieces are exactly the atoms of ``nu``. Differences
of two embeddings are therefore piecewise constant in ``w`` and every
distance below is an exact finite sum over merged breakpoints.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from ._numeric import mean_abs_power, merged_cuts
from .circle import wrap, wrap_signed
from .cot import P2, solve_alpha
from .measures import (
    UNIFORM,
    DiscreteMeasure,
    GridDensity,
    cdf,
    quantile,
    to_discrete,
)

__all__ = [
    "ReferenceMismatchError",
    "TangentField",
    "EmbeddedDataset",
    "embed",
    "embed_general",
    "lcot_distance",
    "lcot_metric",
    "lcot_norm",
    "pairwise_matrix",
    "inverse_embed",
    "geodesic",
    "interpolate_cot",
    "interpolate_lcot",
    "mean_field",
    "barycenter",
    "same_reference",
    "transport_map",
]


class ReferenceMismatchError(ValueError):
    pass


def same_reference(a, b):
    if a is b:
        return True
    if type(a) is not type(b):
        return False
    if isinstance(a, GridDensity):
        return np.array_equal(a.values, b.values)
    return np.array_equal(a.positions, b.positions) and np.array_equal(a.masses, b.masses)


@dataclass(frozen=True, eq=False)
class TangentField:
    """Piecewise description of an LCOT embedding.

    The reference levels ``[0, 1)`` are cut into consecutive intervals of
    lengths ``masses`` beginning at level ``start`` (the last ones wrap
    past 1). On the j-th interval the displacement is ``quantiles[j] - x``.
    The quantiles are real lifts, so differences between two fields stay
    constant on merged intervals. ``positions`` keeps the wrapped atoms
    bit-exact, since adding an integer lift can round away low bits.
    """

    start: float
    masses: np.ndarray
    quantiles: np.ndarray
    reference: object = UNIFORM
    alpha: Optional[float] = None
    positions: Optional[np.ndarray] = None

    def __post_init__(self):
        m = np.asarray(self.masses, dtype=float)
        q = np.asarray(self.quantiles, dtype=float)
        if m.ndim != 1 or m.shape != q.shape or m.size == 0:
            raise ValueError("masses and quantiles must be 1-D arrays of equal, non-zero length")
        if np.any(m < 0) or abs(m.sum() - 1.0) > 1e-9:
            raise ValueError("interval lengths must be non-negative and sum to 1")
        if not 0.0 <= self.start < 1.0:
            raise ValueError("start level must lie in [0, 1)")
        pos = wrap(q) if self.positions is None else np.asarray(self.positions, dtype=float)
        if pos.shape != q.shape:
            raise ValueError("positions must match quantiles")
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "quantiles", q)
        object.__setattr__(self, "positions", pos)

    def __len__(self):
        return self.masses.size

    @cached_property
    def _parts(self):
        # intervals past level 1 wrap to the front shifted down one period;
        # the interval crossing 1 appears in both pieces
        b = self.start + np.concatenate([[0.0], np.cumsum(self.masses)])
        b[-1] = self.start + 1.0
        lo, hi = b[:-1], b[1:]
        k0 = np.searchsorted(hi, 0.0, side="right")
        k1 = np.searchsorted(lo, 1.0, side="left")
        k2 = np.searchsorted(hi, 1.0, side="right")
        q, P = self.quantiles, self.positions
        L = np.concatenate([[0.0], hi[k2:] - 1.0, np.minimum(hi[k0:k1], 1.0)])
        L[-1] = 1.0
        return L, np.concatenate([q[k2:] - 1.0, q[k0:k1]]), np.concatenate([P[k2:], P[k0:k1]])

    @property
    def _split(self):
        return self._parts[:2]

    @property
    def level_breakpoints(self):
        """Breakpoints ``0 = l_0 <= ... <= l_K = 1`` in reference levels."""
        return self._split[0]

    @property
    def quantile_values(self):
        """Lifted quantile value on each level interval of :attr:`level_breakpoints`."""
        return self._split[1]

    @property
    def breakpoints(self):
        """Interval ends in reference coordinates (equal to the levels for UNIFORM)."""
        L = self.level_breakpoints
        Q = quantile(self.reference)
        return np.concatenate([Q(L[:-1]), [Q(1.0, side="left")]])

    def __call__(self, x):
        """Displacement ``nu_hat(x)`` at reference points ``x``."""
        xa = np.asarray(x, dtype=float)
        r = xa - np.floor(xa)
        L, V = self._split
        w = cdf(self.reference, r)
        k = np.clip(np.searchsorted(L, w, side="right") - 1, 0, V.size - 1)
        out = V[k] - r
        return float(out) if np.ndim(x) == 0 else out

    def sup_abs(self):
        """Largest |displacement| over the closure of every interval."""
        L, V = self._split
        Q = quantile(self.reference)
        left = Q(L[:-1])
        right = Q(L[1:], side="left")
        return float(max(np.max(np.abs(V - left)), np.max(np.abs(V - right))))

    @property
    def mean_shift(self):
        return self.alpha

    def same_structure(self, other):
        return (
            self.start == other.start
            and self.masses.shape == other.masses.shape
            and np.array_equal(self.masses, other.masses)
        )


def _check_refs(fields):
    ref = fields[0].reference
    for f in fields[1:]:
        if not same_reference(ref, f.reference):
            raise ReferenceMismatchError("embeddings use different reference measures")
    return ref


@dataclass(frozen=True)
class EmbeddedDataset:
    fields: tuple
    labels: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "fields", tuple(self.fields))
        if not self.fields:
            raise ValueError("dataset is empty")
        _check_refs(self.fields)
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != len(self.fields):
                raise ValueError("one label per field is required")
            object.__setattr__(self, "labels", labels)

    def __len__(self):
        return len(self.fields)

    @property
    def reference(self):
        return self.fields[0].reference


def embed_general(nu, reference=UNIFORM, spec=P2):
    """Embedding of ``nu`` with respect to ``reference`` under cost ``|z|^p``.

    The shift comes from :func:`cotkit.cot.solve_alpha`; grid densities
    passed as ``nu`` are discretized at their cell centers.
    """
    nu = to_discrete(nu)
    alpha = solve_alpha(reference, nu, spec)
    start = wrap(alpha)
    # derived from start so a tiny negative alpha that wraps to 0 gets no lift
    lift = np.round(start - alpha)
    return TangentField(start, nu.masses, nu.positions + lift, reference, alpha, nu.positions)


def embed(nu):
    """Embedding against the uniform reference with quadratic cost."""
    return embed_general(nu, UNIFORM, P2)


def _lookup(L, mids):
    # a midpoint of two adjacent floats can round up onto the last breakpoint
    return np.minimum(np.searchsorted(L, mids, side="right") - 1, L.size - 2)


def lcot_distance(a, b, p=2):
    """LCOT cost ``int |nu_hat_a - nu_hat_b|_{S^1}^p d mu`` (p-th power)."""
    _check_refs([a, b])
    La, Va = a._split
    Lb, Vb = b._split
    # stable sort of two sorted runs is a linear merge; ties put La first
    c = np.concatenate([La, Lb])
    order = np.argsort(c, kind="stable")
    from_a = order < La.size
    ia = np.clip(np.cumsum(from_a)[:-1] - 1, 0, Va.size - 1)
    ib = np.clip(np.cumsum(~from_a)[:-1] - 1, 0, Vb.size - 1)
    w = np.diff(c[order])
    d = np.abs(wrap_signed(Va[ia] - Vb[ib]))
    if p == 2:
        return float(np.dot(w, d * d))
    return float(np.dot(w, d ** p))


def lcot_metric(a, b, p=2):
    return lcot_distance(a, b, p) ** (1.0 / p)


def lcot_norm(f, p=2):
    """``int |nu_hat|^p d mu``: the LCOT cost between ``f`` and the reference itself."""
    L, V = f._split
    Q = quantile(f.reference)
    cuts = merged_cuts(L, Q.levels)
    a, b = cuts[:-1], cuts[1:]
    mids = 0.5 * (a + b)
    v = V[_lookup(L, mids)]
    k = np.clip(_lookup(Q.levels, mids), 0, Q.values.size - 1)
    xa = Q.values[k] + Q.slopes[k] * (a - Q.levels[k])
    xb = Q.values[k] + Q.slopes[k] * (b - Q.levels[k])
    return float(np.sum((b - a) * mean_abs_power(v - xa, v - xb, p)))


def pairwise_matrix(ds, p=2, parallel=False, max_workers=None):
    """Symmetric matrix of :func:`lcot_distance` over all pairs.

    With ``parallel=True`` rows are computed on a thread pool; every entry
    is still a single independent call, so the result does not depend on
    the schedule.
    """
    fields = ds.fields if isinstance(ds, EmbeddedDataset) else tuple(ds)
    if not fields:
        raise ValueError("dataset is empty")
    _check_refs(fields)
    K = len(fields)
    D = np.zeros((K, K))

    def row(i):
        return [lcot_distance(fields[i], fields[j], p) for j in range(i + 1, K)]

    if parallel and K > 2:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(row, range(K)))
    else:
        rows = [row(i) for i in range(K)]
    for i, vals in enumerate(rows):
        D[i, i + 1:] = vals
        D[i + 1:, i] = vals
    return D


def inverse_embed(f):
    """Push the reference forward by ``x -> x + nu_hat(x)``.

    Each level interval lands on the single atom ``wrap(q)`` with mass equal
    to its length, so this is exact for step fields.
    """
    keep = f.masses > 0
    return DiscreteMeasure(f.positions[keep], f.masses[keep])


def transport_map(f1, f2):
    """Map ``(f2 - f1) o (f1 + id)^-1 + id`` from ``inverse_embed(f1)`` towards ``inverse_embed(f2)``.

    Each atom of the first measure is sent along the wrapped displacement
    difference taken at the middle level of its interval, so atoms are not
    split; the pushforward is exact up to the atom masses.
    """
    _check_refs([f1, f2])
    q1 = f1.quantiles
    b = f1.start + np.concatenate([[0.0], np.cumsum(f1.masses)])
    mid = wrap(0.5 * (b[:-1] + b[1:]))
    L2, V2 = f2._split
    target = q1 + wrap_signed(V2[_lookup(L2, mid)] - q1)
    atoms = wrap(q1)

    def T(y):
        ya = np.asarray(y, dtype=float)
        k = np.argmin(np.abs(wrap_signed(ya.reshape(-1, 1) - atoms[None, :])), axis=1)
        out = wrap(target[k]).reshape(ya.shape)
        return float(out) if np.ndim(y) == 0 else out

    return T


def _common_grid(fields):
    """All fields on one set of level intervals.

    Returns ``(start, lengths, Y, P)`` with ``Y[:, k]`` the lifted values of
    field ``k`` and ``P`` the exact wrapped positions of the first field.
    """
    first = fields[0]
    if all(first.same_structure(f) for f in fields[1:]):
        Y = np.stack([f.quantiles for f in fields], axis=1)
        return first.start, first.masses, Y, first.positions
    parts = [f._parts for f in fields]
    cuts = merged_cuts(*[L for L, _, _ in parts])
    mids = 0.5 * (cuts[:-1] + cuts[1:])
    lengths = np.diff(cuts)
    Y = np.stack([V[_lookup(L, mids)] for L, V, _ in parts], axis=1)
    L0, _, P0 = parts[0]
    P = P0[_lookup(L0, mids)]
    keep = lengths > 0
    return 0.0, lengths[keep], Y[keep], P[keep]


def _moved(start, lengths, Y, P, offset, ref):
    # offsets are taken from the first field so a zero offset reproduces it bit for bit
    return TangentField(start, lengths, Y[:, 0] + offset, ref, None, wrap(P + offset))


def geodesic(a, b, t):
    """Field at time ``t`` on the LCOT geodesic from ``a`` to ``b``.

    Displacements move along the shorter arc: ``a + t * wrap_signed(b - a)``.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    ref = _check_refs([a, b])
    start, lengths, Y, P = _common_grid([a, b])
    return _moved(start, lengths, Y, P, t * wrap_signed(Y[:, 1] - Y[:, 0]), ref)


def interpolate_lcot(a, b, t):
    """Measure at time ``t`` on the LCOT geodesic between two embeddings."""
    return inverse_embed(geodesic(a, b, t))


def interpolate_cot(sigma, nu, t, spec=P2):
    """Displacement interpolation along the optimal circular plan from ``sigma`` to ``nu``.

    The plan is the quantile coupling at the optimal shift, so atoms of
    ``sigma`` are split when needed and ``t = 1`` returns ``nu`` exactly.
    A grid ``sigma`` is discretized at its cell centers.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    sigma, nu = to_discrete(sigma), to_discrete(nu)
    alpha = solve_alpha(sigma, nu, spec)
    Ls, Ln = sigma.levels, nu.levels
    cuts = merged_cuts(Ls, wrap(Ln + alpha))
    mids = 0.5 * (cuts[:-1] + cuts[1:])
    lengths = np.diff(cuts)
    src = sigma.positions[np.clip(_lookup(Ls, mids), 0, len(sigma) - 1)]
    y = mids - alpha
    r = y - np.floor(y)
    dst = nu.positions[np.clip(_lookup(Ln, r), 0, len(nu) - 1)]
    keep = lengths > 0
    pos = src + t * wrap_signed(dst - src)
    return DiscreteMeasure(wrap(pos[keep]), lengths[keep])


def _frechet_mean(Y, w, chunk=4096):
    """Weighted intrinsic mean on the circle of each row of ``Y``, as an offset from ``Y[:, 0]``.

    The squared arc-length objective is quadratic between consecutive
    antipodes of the data, so its minimizer is the unconstrained mean of
    one of those arcs. Means lifted around each data point come first in
    the candidate list so exact ties keep the simplest value.
    """
    n, K = Y.shape
    out = np.empty(n)
    for s in range(0, n, chunk):
        y = Y[s:s + chunk]
        anchors = y + np.einsum("k,ijk->ij", w, wrap_signed(y[:, None, :] - y[:, :, None]))
        anti = np.sort(wrap(y + 0.5), axis=1)
        nxt = np.concatenate([anti[:, 1:], anti[:, :1] + 1.0], axis=1)
        mid = 0.5 * (anti + nxt)
        arcs = mid + np.einsum("k,ijk->ij", w, wrap_signed(y[:, None, :] - mid[:, :, None]))
        cand = np.concatenate([anchors, arcs], axis=1)
        cost = np.einsum("k,ijk->ij", w, wrap_signed(y[:, None, :] - cand[:, :, None]) ** 2)
        best = cand[np.arange(y.shape[0]), np.argmin(cost, axis=1)]
        out[s:s + chunk] = wrap_signed(best - y[:, 0])
    return out


def mean_field(fields, weights):
    """Weighted barycenter of embeddings in the LCOT geometry.

    On each merged level interval the displacements are points of the
    circle; their weighted intrinsic (arc-length) mean is taken, which
    minimizes ``sum_k w_k * LCOT(., field_k)`` pointwise.
    """
    fields = fields.fields if isinstance(fields, EmbeddedDataset) else tuple(fields)
    w = np.asarray(weights, dtype=float)
    if w.shape != (len(fields),):
        raise ValueError("one weight per field is required")
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
        raise ValueError("weights must be non-negative and sum to 1")
    ref = _check_refs(fields)
    start, lengths, Y, P = _common_grid(fields)
    return _moved(start, lengths, Y, P, _frechet_mean(Y, w), ref)


def barycenter(ds, weights):
    """Linearized barycenter: inverse embedding of the mean field."""
    return inverse_embed(mean_field(ds, weights))

"""Experiment pipelines: circular density fixtures, classical MDS and timing benchmarks."""

import time
from dataclasses import dataclass

import numpy as np
from scipy.stats import skewnorm

from .circle import wrap
from .cot import P2, cot_distance
from .lcot import EmbeddedDataset, embed, embed_general, pairwise_matrix
from .measures import DiscreteMeasure, GridDensity, rotate, to_discrete

__all__ = [
    "MdsResult",
    "BenchRecord",
    "TranslationsResult",
    "FamiliesResult",
    "BENCH_METHODS",
    "FAMILY_CLASSES",
    "von_mises_grid",
    "mixture_grid",
    "wrapped_skew_normal_grid",
    "random_measure",
    "sample_measure",
    "classical_mds",
    "rotate_grid",
    "l2_matrix",
    "cot_matrix",
    "experiment_translations",
    "experiment_families",
    "experiment_barycenter",
    "bench_pairwise",
    "bench_embed",
]

BENCH_METHODS = ("cot", "lcot-uniform-ref", "lcot-nonuniform-ref")


def _centers(M):
    return (np.arange(M) + 0.5) / M


def von_mises_grid(mode, kappa, M):
    """Von Mises density with the given mode and concentration on M cells.

    Evaluated at cell centers as ``exp(kappa * (cos(2 pi (x - mode)) - 1))``,
    which cannot overflow, then normalized to mean 1.
    """
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    if M < 8:
        raise ValueError("grid needs at least 8 cells")
    x = _centers(M)
    return GridDensity.from_values(np.exp(kappa * (np.cos(2 * np.pi * (x - mode)) - 1.0)))


def mixture_grid(components, M):
    """Weighted mixture of von Mises grids; ``components`` holds (mode, kappa, weight)."""
    comps = [tuple(map(float, c)) for c in components]
    if not comps:
        raise ValueError("mixture needs at least one component")
    w = np.array([c[2] for c in comps])
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
        raise ValueError("mixture weights must be non-negative and sum to 1")
    vals = sum(wk * von_mises_grid(m, k, M).values for (m, k, _), wk in zip(comps, w))
    return GridDensity.from_values(vals)


def wrapped_skew_normal_grid(loc, scale, shape, M):
    """Skew-normal density wrapped onto the circle (three wraps: shifts -1, 0, 1)."""
    x = _centers(M)
    vals = sum(skewnorm.pdf(x + k, shape, loc=loc, scale=scale) for k in (-1.0, 0.0, 1.0))
    return GridDensity.from_values(vals)


def random_measure(N, rng):
    """Atoms uniform on [0, 1) with exponential masses, normalized."""
    return DiscreteMeasure.from_weights(rng.random(N), rng.exponential(size=N))


def sample_measure(grid, n, rng):
    """Empirical measure of ``n`` equal-mass samples drawn from a grid density."""
    M = grid.M
    cells = rng.choice(M, size=n, p=grid.values / grid.values.sum())
    return DiscreteMeasure.from_weights((cells + rng.random(n)) / M)


@dataclass(frozen=True)
class MdsResult:
    coordinates: np.ndarray
    eigenvalues: np.ndarray
    stress: float


def classical_mds(D, d=2):
    """Classical (Torgerson) MDS of a distance matrix.

    Parameters
    ----------
    D : (K, K) array_like
        Symmetric, zero-diagonal, non-negative distances.
    d : int
        Target dimension, smaller than K.

    Returns
    -------
    MdsResult
        Coordinates from the top ``d`` eigenpairs of ``-J D**2 J / 2``
        (negative eigenvalues clipped to zero), all eigenvalues in
        decreasing order, and Kruskal stress-1 against ``D``.
    """
    D = np.asarray(D, dtype=float)
    K = D.shape[0]
    if D.shape != (K, K):
        raise ValueError("distance matrix must be square")
    if d >= K:
        raise ValueError(f"target dimension {d} must be below the number of points {K}")
    if not np.allclose(D, D.T, rtol=0, atol=1e-12) or np.any(np.diag(D) != 0) or np.any(D < 0):
        raise ValueError("distance matrix must be symmetric, non-negative, with zero diagonal")
    J = np.eye(K) - 1.0 / K
    B = -0.5 * J @ (D * D) @ J
    evals, evecs = np.linalg.eigh(0.5 * (B + B.T))
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]
    X = evecs[:, :d] * np.sqrt(np.clip(evals[:d], 0.0, None))
    X -= X.mean(axis=0)
    iu = np.triu_indices(K, 1)
    fitted = np.linalg.norm(X[:, None, :] - X[None, :, :], axis=-1)[iu]
    target = D[iu]
    denom = np.sum(target ** 2)
    stress = float(np.sqrt(np.sum((fitted - target) ** 2) / denom)) if denom > 0 else 0.0
    return MdsResult(X, evals, stress)


def rotate_grid(grid, shift):
    """Grid density translated by ``shift`` turns (cell lookup, exact for multiples of 1/M)."""
    M = grid.M
    src = np.floor(wrap(_centers(M) - shift) * M).astype(int) % M
    return GridDensity(grid.values[src])


def l2_matrix(grids):
    """Squared L2 distances between grid densities sampled on a common grid."""
    V = np.stack([g.values for g in grids])
    sq = np.sum(V * V, axis=1)
    D = np.clip((sq[:, None] + sq[None, :] - 2 * V @ V.T) / V.shape[1], 0.0, None)
    np.fill_diagonal(D, 0.0)
    return D


def cot_matrix(measures, spec=P2):
    K = len(measures)
    D = np.zeros((K, K))
    for i in range(K):
        for j in range(i + 1, K):
            D[i, j] = D[j, i] = cot_distance(measures[i], measures[j], spec)
    return D


@dataclass(frozen=True)
class TranslationsResult:
    dataset: EmbeddedDataset
    lcot: np.ndarray
    cot: np.ndarray
    l2: np.ndarray

    @property
    def labels(self):
        return self.dataset.labels

    def matrices(self):
        return {"lcot": self.lcot, "cot": self.cot, "l2": self.l2}


def experiment_translations(base, n_rot):
    """Pairwise geometry of ``n_rot`` equally spaced rotations of a grid density."""
    if n_rot < 3:
        raise ValueError("need at least 3 rotations")
    shifts = np.arange(n_rot) / n_rot
    grids = [rotate_grid(base, s) for s in shifts]
    measures = [rotate(to_discrete(base), s) for s in shifts]
    ds = EmbeddedDataset([embed(m) for m in measures], [f"rot{j:02d}" for j in range(n_rot)])
    return TranslationsResult(ds, pairwise_matrix(ds), cot_matrix(measures), l2_matrix(grids))


#: six density classes: name -> (kind, parameters)
FAMILY_CLASSES = {
    "unimodal": [(0.0, 1.0)],
    "skew-normal": None,
    "bimodal-sym": [(0.0, 0.5), (0.5, 0.5)],
    "bimodal-asym": [(0.0, 0.5), (1 / 3, 0.5)],
    "trimodal-sym": [(0.0, 1 / 3), (1 / 3, 1 / 3), (2 / 3, 1 / 3)],
    "trimodal-asym": [(0.0, 1 / 3), (2 / 3, 1 / 3), (0.625, 1 / 3)],
}


def _perturb(mode, rng, kappa):
    return wrap(mode + rng.vonmises(0.0, kappa) / (2 * np.pi))


def _class_density(name, rng, M, kappa=10.0, jitter=200.0):
    axes = FAMILY_CLASSES[name]
    if axes is None:
        return wrapped_skew_normal_grid(_perturb(0.0, rng, jitter), 0.12, 4.0, M)
    return mixture_grid([(_perturb(m, rng, jitter), kappa, w) for m, w in axes], M)


@dataclass(frozen=True)
class FamiliesResult:
    labels: tuple
    classes: tuple
    matrices: dict


def experiment_families(rng, n_sets=20, M=1000, n_samples=(50, 100), bins=100, with_cot=True):
    """Six density classes, ``n_sets`` sample sets each, compared under several distances.

    Each set draws a density of its class with axes jittered by a
    concentrated von Mises, then ``n`` equal-mass samples with ``n`` uniform
    in ``n_samples``. Returns LCOT, COT and histogram-L2 matrices.
    """
    measures, labels, classes = [], [], []
    for name in FAMILY_CLASSES:
        for j in range(n_sets):
            g = _class_density(name, rng, M)
            n = int(rng.integers(n_samples[0], n_samples[1] + 1))
            measures.append(sample_measure(g, n, rng))
            labels.append(f"{name}_{j:02d}")
            classes.append(name)
    ds = EmbeddedDataset([embed(m) for m in measures], labels)
    hist = [GridDensity.from_values(np.histogram(m.positions, bins=bins, range=(0, 1), weights=m.masses)[0])
            for m in measures]
    mats = {"lcot": pairwise_matrix(ds), "l2": l2_matrix(hist)}
    if with_cot:
        mats["cot"] = cot_matrix(measures)
    return FamiliesResult(tuple(labels), tuple(classes), mats)


def experiment_barycenter(rng, n_per_class=10, M=1000, kappa=10.0, jitter=200.0):
    """Perturbed uni/bi/trimodal densities with their Euclidean averages and LCOT barycenters.

    Returns ``{class: (grids, euclidean_mean, lcot_barycenter)}``.
    """
    from .lcot import barycenter

    axes = {"unimodal": [0.0], "bimodal": [0.0, 0.5], "trimodal": [0.0, 1 / 3, 2 / 3]}
    out = {}
    for name, modes in axes.items():
        grids = [
            mixture_grid([(_perturb(m, rng, jitter), kappa, 1.0 / len(modes)) for m in modes], M)
            for _ in range(n_per_class)
        ]
        euclid = GridDensity.from_values(np.mean([g.values for g in grids], axis=0))
        ds = EmbeddedDataset([embed(to_discrete(g)) for g in grids])
        bary = barycenter(ds, np.full(n_per_class, 1.0 / n_per_class))
        out[name] = (grids, euclid, bary)
    return out


@dataclass(frozen=True)
class BenchRecord:
    K: int
    N: int
    method: str
    wall_time: float

    def __post_init__(self):
        if self.method not in BENCH_METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not self.wall_time > 0:
            raise ValueError("wall time must be positive")


def _timed(fn, repeats=5, min_time=0.2):
    """Median seconds per call over ``repeats`` runs after one warm-up.

    Calls shorter than ``min_time`` are looped inside each run so the timer
    resolution does not dominate.
    """
    t0 = time.perf_counter()
    fn()
    once = time.perf_counter() - t0
    number = max(1, int(np.ceil(min_time / max(once, 1e-9)))) if once < min_time else 1
    runs = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(number):
            fn()
        runs.append((time.perf_counter() - t0) / number)
    return float(np.median(runs))


def _pipeline(method, measures, reference, parallel):
    if method == "cot":
        return lambda: cot_matrix(measures)
    if method == "lcot-uniform-ref":
        return lambda: pairwise_matrix([embed(m) for m in measures], parallel=parallel)
    return lambda: pairwise_matrix([embed_general(m, reference) for m in measures], parallel=parallel)


def bench_pairwise(Ks, Ns, methods=BENCH_METHODS, seed=0, repeats=5, parallel=False):
    """Time the full pairwise-distance pipeline for random discrete measures.

    LCOT methods include the K embeddings; the non-uniform reference is a
    random grid density with N cells. ``parallel`` switches the pairwise
    LCOT step to the thread pool.
    """
    for m in methods:
        if m not in BENCH_METHODS:
            raise ValueError(f"unknown method {m!r}; choose from {', '.join(BENCH_METHODS)}")
    rng = np.random.default_rng(seed)
    records = []
    for N in Ns:
        reference = GridDensity.from_values(rng.exponential(size=int(N)))
        for K in Ks:
            measures = [random_measure(int(N), rng) for _ in range(int(K))]
            for method in methods:
                t = _timed(_pipeline(method, measures, reference, parallel), repeats)
                records.append(BenchRecord(int(K), int(N), method, t))
    return records


def bench_embed(Ns, K=2, seed=0, repeats=5):
    """Median seconds to embed ``K`` random measures of each size against the uniform reference.

    The timed step builds the full level-space view of every field, so it
    covers everything a later distance computation reads.
    """
    rng = np.random.default_rng(seed)
    out = {}
    for N in Ns:
        measures = [random_measure(int(N), rng) for _ in range(int(K))]
        out[int(N)] = _timed(lambda: [embed(m).level_breakpoints for m in measures], repeats)
    return out

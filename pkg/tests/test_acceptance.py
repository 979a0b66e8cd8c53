"""Acceptance criteria, one marked test group per criterion.

Run ``pytest tests/test_acceptance.py`` to get a PASS/FAIL line per
criterion in the terminal summary.
"""

import time

import numpy as np
import pytest

from cotkit import io
from cotkit.analysis import bench_embed, bench_pairwise, classical_mds, experiment_translations, von_mises_grid
from cotkit.circle import circ_dist
from cotkit.cli import main
from cotkit.cot import CostSpec, cot_distance, oracle_kantorovich
from cotkit.lcot import barycenter, embed, inverse_embed, lcot_distance, lcot_metric, lcot_norm
from cotkit.measures import UNIFORM, DiscreteMeasure, GridDensity

from conftest import random_measure
from oracles import grid_cot

acceptance = pytest.mark.acceptance
D = DiscreteMeasure.dirac


def seeded_measures(seed, count, n_max):
    rng = np.random.default_rng(seed)
    return [random_measure(rng, n_max) for _ in range(count)]


def run_cli(*argv):
    return main([str(a) for a in argv])


@acceptance(1, "closed-form constant 1/12")
@pytest.mark.parametrize("c", [0.0, 0.3, 0.77])
def test_closed_form(c):
    t0 = time.perf_counter()
    u = GridDensity(np.ones(10_000))
    assert cot_distance(u, D(c)) == pytest.approx(1 / 12, abs=1e-6)
    assert lcot_distance(embed(u), embed(D(c))) == pytest.approx(1 / 12, abs=1e-6)
    assert cot_distance(UNIFORM, D(c)) == pytest.approx(1 / 12, abs=1e-12)
    assert lcot_norm(embed(D(c))) == pytest.approx(1 / 12, abs=1e-12)
    assert time.perf_counter() - t0 < 1.0


@acceptance(2, "Dirac law")
def test_dirac_law():
    rng = np.random.default_rng(2)
    a, b = rng.random(100), rng.random(100)
    got = np.array([lcot_distance(embed(D(x)), embed(D(y))) for x, y in zip(a, b)])
    np.testing.assert_allclose(got, circ_dist(a, b) ** 2, rtol=0, atol=1e-12)


@acceptance(3, "oracle equivalence")
def test_oracle_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    for _ in range(100):
        mu, nu = random_measure(rng, 8), random_measure(rng, 8)
        got = cot_distance(mu, nu)
        assert got == pytest.approx(grid_cot(mu, nu), rel=1e-6, abs=1e-15)
        assert got == pytest.approx(oracle_kantorovich(mu, nu, method="candidates"), rel=1e-6, abs=1e-15)
    assert time.perf_counter() - t0 < 30.0


@pytest.fixture(scope="module")
def metric_set():
    ms = seeded_measures(4, 45, 16)
    # exact duplicates exercise the zero side of identity of indiscernibles
    ms += [ms[0], ms[7], ms[7], ms[20], ms[44]]
    fields = [embed(m) for m in ms]
    K = len(fields)
    R = np.zeros((K, K))
    for i in range(K):
        for j in range(K):
            if i != j:
                R[i, j] = lcot_metric(fields[i], fields[j])
    return ms, fields, R


@acceptance(4, "LCOT^(1/2) metric axioms")
class TestMetric:
    def test_symmetry(self, metric_set):
        _, _, R = metric_set
        assert np.array_equal(R, R.T)

    def test_identity_of_indiscernibles(self, metric_set):
        _, fields, R = metric_set
        back = [inverse_embed(f) for f in fields]
        zeros = 0
        for i in range(len(back)):
            for j in range(len(back)):
                same = np.array_equal(back[i].positions, back[j].positions) and np.array_equal(
                    back[i].masses, back[j].masses
                )
                zeros += same and i != j
                assert same == (R[i, j] < 1e-12)
        assert zeros > 0

    def test_triangle(self, metric_set):
        _, _, R = metric_set
        K = R.shape[0]
        i, j, k = np.array([(i, j, k) for i in range(K) for j in range(i + 1, K) for k in range(j + 1, K)]).T
        assert i.size == 19_600
        for a, b, c in ((i, j, k), (j, i, k), (i, k, j)):
            assert np.all(R[a, c] <= R[a, b] + R[b, c] + 1e-9)


@acceptance(5, "invertibility")
def test_invertibility():
    for nu in seeded_measures(5, 200, 16):
        back = inverse_embed(embed(nu))
        assert np.array_equal(back.masses, nu.masses)
        assert np.max(np.abs(back.positions - nu.positions)) <= 1e-12


@acceptance(6, "embedding bound")
def test_embedding_bound():
    ms = seeded_measures(2, 100, 8) + seeded_measures(4, 45, 16) + seeded_measures(5, 200, 16)
    ms += [D(c) for c in (0.0, 0.3, 0.5, 0.77, 1 - 2 ** -53)]
    ms += [von_mises_grid(m, k, 500) for m in (0.0, 0.5) for k in (0.1, 10.0, 200.0)]
    ms += [GridDensity(np.ones(10_000))]
    assert max(embed(m).sup_abs() for m in ms) <= 0.5 + 1e-15


@pytest.fixture(scope="module")
def interp_files(tmp_path_factory):
    d = tmp_path_factory.mktemp("interp")
    rng = np.random.default_rng(7)
    out = {}
    for name, n in (("a", 5), ("b", 9)):
        io.write_measure(d / f"{name}.csv", random_measure(rng, n, n))
        out[name] = d / f"{name}.csv"
    return d, out


@acceptance(7, "interpolation endpoints and uniform-source agreement")
class TestInterpolation:
    @pytest.mark.parametrize("method", ["lcot", "cot"])
    def test_endpoints(self, interp_files, method):
        d, f = interp_files
        out = d / method
        assert run_cli("interpolate", f["a"], f["b"], "--t", "0,1", "--method", method, "--out-dir", out) == 0
        for t, src in (("0", "a"), ("1", "b")):
            got, want = io.read_measure(out / f"interp_t{t}.csv"), io.read_measure(f[src])
            assert got.allclose(want, 1e-12)

    def test_uniform_source_paths_agree(self, interp_files):
        d, f = interp_files
        M = 1000
        times = "0.25,0.5,0.75"
        for method in ("lcot", "cot"):
            args = ("--grid", M, "interpolate", "uniform", f["b"], "--t", times, "--method", method)
            assert run_cli(*args, "--out-dir", d / f"u_{method}") == 0
        for t in times.split(","):
            a = io.read_measure(d / "u_lcot" / f"interp_t{t}.csv")
            b = io.read_measure(d / "u_cot" / f"interp_t{t}.csv")
            assert cot_distance(a, b, CostSpec(1.0)) <= 2 / M


@acceptance(8, "complexity ratios")
def test_complexity():
    t0 = time.perf_counter()

    def secs(K, N, method):
        (rec,) = bench_pairwise([K], [N], [method], seed=8, repeats=5)
        return rec.wall_time

    lcot = "lcot-uniform-ref"
    k8, k16 = secs(8, 2000, lcot), secs(16, 2000, lcot)
    emb = bench_embed([10_000, 20_000], K=2, seed=8)
    pipe = secs(2, 20_000, lcot) / secs(2, 10_000, lcot)
    cot16 = secs(16, 2000, "cot")
    print(f"K16/K8={k16 / k8:.2f} embed N20k/N10k={emb[20_000] / emb[10_000]:.2f} "
          f"(K=2 pipeline {pipe:.2f}) lcot16={k16:.3g}s cot16={cot16:.3g}s")
    assert 3.0 <= k16 / k8 <= 5.0
    assert emb[20_000] / emb[10_000] <= 2.5
    assert k16 < cot16
    assert time.perf_counter() - t0 < 120.0


@acceptance(9, "translations geometry")
def test_translations_geometry():
    n = 20
    res = experiment_translations(von_mises_grid(0.5, 10.0, 500), n)
    L = res.lcot.copy()
    np.fill_diagonal(L, np.inf)
    exceptions = sum(set(np.argsort(L[i])[:2]) != {(i - 1) % n, (i + 1) % n} for i in range(n))
    assert exceptions <= 2
    stress = classical_mds(np.sqrt(res.lcot), 2).stress
    print(f"adjacency exceptions={exceptions} stress1={stress:.4f}")
    assert stress < 0.15


@acceptance(10, "barycenter sanity")
class TestBarycenter:
    def test_duplicate_pair(self):
        for nu in seeded_measures(10, 200, 16):
            f = embed(nu)
            b = barycenter([f, f], [0.5, 0.5])
            assert np.array_equal(b.masses, nu.masses) and np.array_equal(b.positions, nu.positions)

    def test_two_diracs(self):
        b = barycenter([embed(D(0.4)), embed(D(0.6))], [0.5, 0.5])
        assert len(b) == 1 and b.masses[0] == 1.0
        assert abs(b.positions[0] - 0.5) <= 1e-12

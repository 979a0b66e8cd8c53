import numpy as np
import pytest
from hypothesis import given
from scipy.integrate import trapezoid

from cotkit.measures import (
    UNIFORM,
    DiscreteMeasure,
    GridDensity,
    InvalidMeasureError,
    cdf,
    cdf_cut,
    expectation,
    pushforward,
    quantile,
    rotate,
    to_discrete,
)
from cotkit.analysis import von_mises_grid

from conftest import measures
from oracles import brute_cdf, brute_quantile

TWO = DiscreteMeasure([0.25, 0.75], [0.5, 0.5])


class TestConstruction:
    def test_sorted_and_wrapped(self):
        m = DiscreteMeasure([0.7, 1.2, -0.5], [0.2, 0.3, 0.5])
        np.testing.assert_allclose(m.positions, [0.2, 0.5, 0.7])
        np.testing.assert_allclose(m.masses, [0.3, 0.5, 0.2])

    def test_duplicates_merged(self):
        m = DiscreteMeasure([0.3, 0.3, 0.6], [0.25, 0.25, 0.5])
        assert len(m) == 2
        assert m.masses.tolist() == [0.5, 0.5]

    def test_merge_across_zero(self):
        m = DiscreteMeasure([0.0, 1.0 - 1e-13, 0.5], [0.25, 0.25, 0.5])
        assert len(m) == 2
        assert m.masses.sum() == 1.0

    def test_noise_renormalized_exact_kept(self):
        m = DiscreteMeasure([0.1, 0.2], [0.5 + 4e-10, 0.5])
        assert abs(m.masses.sum() - 1.0) < 1e-15
        w = np.array([0.1, 0.2, 0.7])
        assert DiscreteMeasure([0.1, 0.4, 0.8], w).masses.tolist() == w.tolist()

    @pytest.mark.parametrize(
        "pos, mass",
        [([0.1, 0.2], [0.5, 0.6]), ([0.1, 0.2], [1.5, -0.5]), ([0.1], [0.0]), ([], []), ([np.nan], [1.0])],
    )
    def test_invalid(self, pos, mass):
        with pytest.raises(InvalidMeasureError):
            DiscreteMeasure(pos, mass)

    def test_immutable(self):
        with pytest.raises(ValueError):
            TWO.masses[0] = 0.1

    def test_grid_density(self):
        g = GridDensity.from_values([1.0, 3.0])
        assert g.values.tolist() == [0.5, 1.5]
        with pytest.raises(InvalidMeasureError):
            GridDensity([1.0, 2.0])
        with pytest.raises(InvalidMeasureError):
            GridDensity([2.5, -0.5])


class TestCdf:
    def test_examples(self):
        assert cdf(TWO, 0.5) == 0.5
        assert cdf(TWO, 0.25) == 0.0
        assert cdf(TWO, 1.5) == 1.5

    def test_cut(self):
        assert cdf_cut(TWO, 0.5, 0.3) == 0.5
        for x0 in (0.0, 0.1, 0.6):
            assert cdf_cut(TWO, x0, 0.0) == 0.0
            assert cdf_cut(TWO, x0, 1.0) == 1.0

    def test_uniform_is_identity(self):
        y = np.linspace(-2, 2, 41)
        np.testing.assert_allclose(cdf(UNIFORM, y), y, atol=1e-15)

    @given(measures())
    def test_matches_brute_count(self, m):
        for y in np.linspace(-1.3, 1.7, 23):
            assert cdf(m, y) == pytest.approx(brute_cdf(m, y), abs=1e-12)

    @given(measures())
    def test_periodic_extension(self, m):
        for y in (0.05, 0.33, 0.9):
            assert cdf(m, y + 1) == pytest.approx(cdf(m, y) + 1, abs=1e-12)


class TestQuantile:
    def test_examples(self):
        Q = quantile(TWO)
        assert Q(0.3) == 0.25
        assert Q(0.5) == 0.75
        Qd = quantile(DiscreteMeasure.dirac(0.4))
        for y in (1e-9, 0.3, 0.999):
            assert Qd(y) == 0.4
        # at a whole turn the strict infimum moves one period up
        assert Qd(1.0) == pytest.approx(1.4)

    def test_left_limit(self):
        Q = quantile(TWO)
        assert Q(0.5, side="left") == 0.25
        assert Q(0.0, side="left") == pytest.approx(-0.25)

    def test_grid_quantile_inverts_cdf(self):
        g = GridDensity.from_values([1.0, 0.0, 2.0, 1.0])
        Q = quantile(g)
        y = np.linspace(0.01, 0.99, 50)
        np.testing.assert_allclose(cdf(g, Q(y)), y, atol=1e-12)

    @given(measures())
    def test_matches_brute(self, m):
        Q = quantile(m)
        for y in np.linspace(-0.7, 1.6, 19):
            assert Q(y) == pytest.approx(brute_quantile(m, y), abs=1e-12)

    @given(measures())
    def test_galois_inequality(self, m):
        Q = quantile(m)
        for y in np.linspace(0, 1, 17, endpoint=False):
            F = cdf(m, y)
            assert cdf(m, Q(F)) >= F - 1e-12

    @given(measures())
    def test_periodic_and_monotone(self, m):
        Q = quantile(m)
        y = np.linspace(0, 1, 101, endpoint=False)
        np.testing.assert_allclose(Q(y + 1), Q(y) + 1, atol=1e-12)
        assert np.all(np.diff(Q(y)) >= 0)


class TestOther:
    def test_expectation(self):
        assert expectation(DiscreteMeasure.dirac(0.5)) == 0.5
        assert expectation(TWO) == 0.5
        assert expectation(DiscreteMeasure([0.1, 0.9], [0.9, 0.1])) == pytest.approx(0.18)
        assert expectation(UNIFORM) == 0.5

    def test_to_discrete(self):
        m = to_discrete(GridDensity(np.ones(4)))
        assert m.positions.tolist() == [0.125, 0.375, 0.625, 0.875]
        assert m.masses.tolist() == [0.25] * 4
        M = 10
        hot = to_discrete(GridDensity(np.eye(M)[0] * M))
        assert hot.positions.tolist() == [0.5 / M] and hot.masses.tolist() == [1.0]

    def test_von_mises_expectation(self):
        m = to_discrete(von_mises_grid(0.5, 4.0, 100))
        assert expectation(m) == pytest.approx(0.5, abs=1e-12)

    def test_discretized_expectation_close_to_integral(self):
        g = GridDensity.from_values(np.linspace(0.2, 2.0, 50))
        x = np.linspace(0, 1, 20001)
        dens = g.values[np.minimum((x * g.M).astype(int), g.M - 1)]
        integral = trapezoid(x * dens, x)
        assert abs(expectation(to_discrete(g)) - integral) < 1 / g.M

    def test_pushforward(self):
        assert pushforward(TWO, lambda x: x).allclose(TWO, 0)
        r = rotate(DiscreteMeasure.dirac(0.8), 0.3)
        assert r.positions[0] == pytest.approx(0.1)
        c = pushforward(TWO, lambda x: 0.6)
        assert c.positions.tolist() == [0.6] and c.masses.tolist() == [1.0]

    @given(measures())
    def test_pushforward_keeps_mass(self, m):
        out = pushforward(m, lambda x: 3 * x + 0.1)
        assert out.masses.sum() == pytest.approx(1.0, abs=1e-15)

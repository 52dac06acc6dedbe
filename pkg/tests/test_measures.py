"""
Tests for one-dimensional measures, location-scale families, discretizations
and the Jordan decomposition.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invot.exceptions import (
    AllZeroDensity,
    NegativeDensity,
    NonFiniteInput,
    NonPositiveScale,
    NonUnitDirection,
    NotSPD,
)
from invot.forward import ot_cost_quantile, ot_lp, power_cost
from invot.measures import (
    DiscreteMeasure,
    GaussianMeasure,
    LocationScaleFamily,
    affine_pushforward,
    cdf_and_quantile_from_density,
    discretize,
    gaussian_rank_one_pushforward,
    jordan_decompose,
    locscale_member,
    normal,
    resolve_family,
    support_separation,
    uniform,
)

pytestmark = pytest.mark.unit


class TestMeasureFromDensity:
    """Tabulated densities, CDFs and quantiles."""

    def test_uniform_density_quantiles(self):
        """A flat density has the identity quantile on [0, 1]."""
        grid = np.linspace(0.0, 1.0, 51)
        mu = cdf_and_quantile_from_density(grid, np.ones_like(grid))
        np.testing.assert_allclose(mu.quantile([0.1, 0.25, 0.9]), [0.1, 0.25, 0.9], atol=1e-12)

    def test_triangle_density_inverts_exactly(self):
        """Linear densities give quadratic CDFs that invert in closed form."""
        grid = np.linspace(0.0, 1.0, 101)
        mu = cdf_and_quantile_from_density(grid, 2.0 * grid)
        u = np.array([0.01, 0.2, 0.5, 0.81])
        np.testing.assert_allclose(mu.quantile(u), np.sqrt(u), atol=1e-10)
        np.testing.assert_allclose(mu.cdf_at(np.sqrt(u)), u, atol=1e-10)

    def test_unnormalized_density_is_rescaled(self):
        """Mass is normalized to one."""
        grid = np.linspace(0.0, 2.0, 21)
        mu = cdf_and_quantile_from_density(grid, 7.0 * np.ones_like(grid))
        assert mu.cdf[-1] == pytest.approx(1.0)
        assert mu.quantile(0.5) == pytest.approx(1.0, abs=1e-12)

    def test_all_zero_density(self):
        """Zero mass is rejected."""
        grid = np.linspace(0.0, 1.0, 5)
        with pytest.raises(AllZeroDensity):
            cdf_and_quantile_from_density(grid, np.zeros(5))

    def test_negative_density(self):
        """Negative values are rejected."""
        grid = np.linspace(0.0, 1.0, 5)
        with pytest.raises(NegativeDensity):
            cdf_and_quantile_from_density(grid, np.array([1.0, 1.0, -0.1, 1.0, 1.0]))

    def test_non_finite_density(self):
        """NaN values are rejected."""
        grid = np.linspace(0.0, 1.0, 5)
        with pytest.raises(NonFiniteInput):
            cdf_and_quantile_from_density(grid, np.array([1.0, np.nan, 1.0, 1.0, 1.0]))

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.floats(min_value=0.01, max_value=10.0), min_size=3, max_size=40))
    def test_quantile_is_monotone(self, weights):
        """Quantiles of any positive density are non-decreasing."""
        grid = np.linspace(-1.0, 1.0, len(weights))
        mu = cdf_and_quantile_from_density(grid, np.array(weights))
        q = mu.quantile(np.linspace(0.0, 1.0, 200))
        assert np.all(np.diff(q) >= -1e-12)
        assert np.all(np.diff(mu.quantile_table) >= -1e-12)


class TestLawMeasures:
    """Measures backed by scipy distributions."""

    def test_normal_median_and_tails(self):
        """Exact law evaluation, including the upper tail."""
        mu = normal(0.0, 1.0)
        assert mu.quantile(0.5) == pytest.approx(0.0, abs=1e-12)
        assert mu.cdf_at(0.0) == pytest.approx(0.5)
        assert mu.upper_quantile(1e-12) == pytest.approx(-mu.quantile(1e-12), rel=1e-10)

    def test_unbounded_support_is_truncated(self):
        """Grid endpoints sit at tail mass 0.5e-8 per side."""
        mu = normal(0.0, 1.0)
        assert mu.cdf_at(mu.grid[0]) == pytest.approx(0.5e-8, rel=1e-6)
        assert mu.sf_at(mu.grid[-1]) == pytest.approx(0.5e-8, rel=1e-6)

    def test_affine_member(self):
        """G_{a,b} has quantile a + b G^{-1}(u)."""
        family = LocationScaleFamily.builtin("normal")
        member = locscale_member(family, 1.0, 2.0)
        assert member.quantile(0.5) == pytest.approx(1.0)
        assert member.quantile(0.975) == pytest.approx(1.0 + 2.0 * 1.959963984540054, rel=1e-10)

    @pytest.mark.parametrize("name", ["normal", "laplace", "exponential-scale"])
    def test_member_of_member_composes(self, name):
        """(a', b') applied to G_{a,b} is G_{a' + b' a, b' b}."""
        family = LocationScaleFamily.builtin(name)
        a, b, a2, b2 = 0.7, 1.5, -2.0, 0.4
        inner = LocationScaleFamily(family.name, locscale_member(family, a, b))
        twice = locscale_member(inner, a2, b2)
        once = locscale_member(family, a2 + b2 * a, b2 * b)
        u = np.linspace(0.01, 0.99, 25)
        np.testing.assert_allclose(twice.quantile(u), once.quantile(u), rtol=0.0, atol=1e-8)
        np.testing.assert_allclose(twice.gridded().quantile(u), once.gridded().quantile(u), rtol=0.0, atol=1e-8)

    def test_non_positive_scale(self):
        """b <= 0 is rejected."""
        family = LocationScaleFamily.builtin("normal")
        with pytest.raises(NonPositiveScale):
            locscale_member(family, 0.0, 0.0)

    def test_gridded_matches_law(self):
        """Dropping the law keeps quantiles within grid accuracy."""
        mu = normal(0.0, 1.0)
        grid_only = mu.gridded()
        u = np.array([0.05, 0.5, 0.95])
        np.testing.assert_allclose(grid_only.quantile(u), mu.quantile(u), atol=1e-4)


class TestFamilies:
    """Location-scale generators."""

    def test_symmetry_flags(self):
        """Normal, Cauchy and Laplace are symmetric; exponential is not."""
        assert LocationScaleFamily.builtin("normal").symmetric
        assert LocationScaleFamily.builtin("laplace").symmetric
        assert not LocationScaleFamily.builtin("exponential-scale").symmetric

    def test_normal_moments(self):
        """E[G^2] = 1 and E[G^4] = 3 for the standard normal."""
        family = LocationScaleFamily.builtin("normal")
        assert family.moment(2) == pytest.approx(1.0, abs=1e-6)
        assert family.moment(4) == pytest.approx(3.0, abs=1e-5)

    def test_custom_grid_family(self):
        """A tabulated symmetric density is recognized as symmetric."""
        grid = np.linspace(-3.0, 3.0, 121)
        family = resolve_family("custom-grid", {"grid": grid.tolist(), "density": np.exp(-grid**2).tolist()})
        assert family.symmetric
        assert family.G(0.0) == pytest.approx(0.5, abs=1e-9)


class TestDiscretize:
    """Equal-mass quantile discretizations."""

    def test_uniform_atoms_at_midpoint_levels(self):
        """Atoms of U[0,1] sit at (i - 1/2)/n."""
        atoms = discretize(uniform(0.0, 1.0), 4)
        np.testing.assert_allclose(atoms.locations, [0.125, 0.375, 0.625, 0.875])
        np.testing.assert_allclose(atoms.weights, 0.25)

    def test_total_mass(self):
        """Partial-mass discretizations keep the requested total."""
        atoms = discretize(uniform(0.0, 1.0), 10, total_mass=0.5)
        assert atoms.weights.sum() == pytest.approx(0.5)

    def test_weight_sum_is_checked(self):
        """Weights that do not sum to the declared mass are rejected."""
        with pytest.raises(NonFiniteInput):
            DiscreteMeasure(np.array([0.0, 1.0]), np.array([0.5, 0.6]))

    @pytest.mark.timeout(60)
    def test_lp_value_converges_at_first_order(self):
        """Under x^2 the LP value of n-atom discretizations nears the exact value like 1/n."""
        mu, nu = normal(0.0, 1.0), normal(1.0, 2.0)
        cost = power_cost(2)
        exact = ot_cost_quantile(cost, mu, nu)
        errors = []
        for n in (50, 100, 200):
            errors.append(abs(ot_lp(discretize(mu, n), discretize(nu, n), cost).value - exact))
            assert n * errors[-1] <= 3.0
        assert errors[0] > errors[1] > errors[2]

    def test_affine_pushforward(self):
        """Atoms x u + r in the ambient space."""
        base = discretize(uniform(0.0, 1.0), 3)
        u = np.array([0.6, 0.8])
        pushed = affine_pushforward(uniform(0.0, 1.0), u, [1.0, -1.0], 3, base=base)
        assert pushed.dim == 2
        np.testing.assert_allclose(pushed.atoms[1], 0.5 * u + np.array([1.0, -1.0]))

    def test_affine_pushforward_needs_unit_direction(self):
        """||u|| must be 1."""
        with pytest.raises(NonUnitDirection):
            affine_pushforward(uniform(0.0, 1.0), [1.0, 1.0], [0.0, 0.0], 3)


class TestGaussianMeasure:
    """Multivariate Gaussians."""

    def test_not_spd(self):
        """Indefinite or asymmetric covariances are rejected."""
        with pytest.raises(NotSPD):
            GaussianMeasure([0.0, 0.0], [[1.0, 0.0], [0.0, -1.0]])
        with pytest.raises(NotSPD):
            GaussianMeasure([0.0, 0.0], [[1.0, 0.5], [0.0, 1.0]])

    def test_rank_one_pushforward(self):
        """N(a, b^2) pushed along u lands on N(a u + r, b^2 u u^T)."""
        mean, cov = gaussian_rank_one_pushforward(1.0, 2.0, [0.0, 1.0], [3.0, 0.0])
        np.testing.assert_allclose(mean, [3.0, 1.0])
        np.testing.assert_allclose(cov, [[0.0, 0.0], [0.0, 4.0]])


class TestJordanDecomposition:
    """Positive and negative parts of mu - nu."""

    def test_equal_measures(self):
        """mu = nu leaves nothing to transport."""
        decomposition = jordan_decompose(uniform(0.0, 1.0), uniform(0.0, 1.0))
        assert decomposition.common_mass == pytest.approx(1.0)
        assert decomposition.leftover_mass == pytest.approx(0.0)

    def test_disjoint_supports(self):
        """Disjoint measures are entirely leftover, separated by the gap."""
        decomposition = jordan_decompose(uniform(0.0, 1.0), uniform(3.0, 4.0))
        assert decomposition.leftover_mass == pytest.approx(1.0)
        separation = support_separation(decomposition.grid, decomposition.plus, decomposition.minus)
        assert separation == pytest.approx(2.0, abs=0.01)

    def test_overlapping_uniforms(self):
        """U[0,2] - U[1,3] leaves U[0,1] and U[2,3] with mass 1/2."""
        decomposition = jordan_decompose(uniform(0.0, 2.0), uniform(1.0, 3.0))
        assert decomposition.leftover_mass == pytest.approx(0.5, abs=0.01)
        grid = decomposition.grid
        assert np.all(decomposition.plus[(grid > 1.01)] == 0.0)
        assert np.all(decomposition.minus[(grid < 1.99)] == 0.0)

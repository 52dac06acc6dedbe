"""
Tests for the forward transport solvers: costs, the quantile formula,
potentials, the Gaussian closed form and concave-cost transport.
"""

import numpy as np
import pytest

from invot.exceptions import DivergentIntegral, InvalidCost
from invot.forward import (
    concave_ot_1d,
    concave_power_cost,
    cost_from_dict,
    gaussian_ot,
    grid_cost,
    monotone_map,
    ot_cost_quantile,
    ot_lp,
    potential_derivative_1d,
    potentials_1d,
    power_cost,
)
from invot.forward.costs import grid_cost_diagnostics
from invot.measures import GaussianMeasure, LocationScaleFamily, discretize, normal, uniform


class TestCosts:
    """Builtin and tabulated costs."""

    def test_power_cost_conjugate_gradient(self):
        """(h')^{-1} undoes h' for |x|^p."""
        x = np.linspace(-3.0, 3.0, 61)
        for p in (1.5, 2.0, 3.0):
            cost = power_cost(p)
            np.testing.assert_allclose(cost.conjugate_gradient(cost.derivative(x)), x, atol=1e-8)

    def test_concave_conjugate_gradient(self):
        """(l')^{-1}(s) = 1/(4 s^2) for l = sqrt."""
        cost = concave_power_cost(0.5)
        assert cost.conjugate_gradient(0.25) == pytest.approx(4.0)
        assert cost(np.array([-4.0])) == pytest.approx([2.0])

    def test_invalid_exponents(self):
        """Convex powers need p > 1, concave powers 0 < p < 1."""
        with pytest.raises(InvalidCost):
            power_cost(1.0)
        with pytest.raises(InvalidCost):
            concave_power_cost(1.5)

    def test_grid_cost_diagnostics_name_indices(self):
        """A non-monotone h' is reported with its indices."""
        x = np.linspace(-1.0, 1.0, 11)
        values = x**2
        values[3] += 0.3
        problems = grid_cost_diagnostics("convex", x, values)
        assert any("not strictly increasing at indices" in p for p in problems)

    def test_grid_cost_matches_power(self):
        """A tabulated x^2 interpolates like the builtin."""
        x = np.linspace(-2.0, 2.0, 401)
        cost = grid_cost("convex", x, x**2)
        t = np.array([-1.3, 0.0, 0.7])
        np.testing.assert_allclose(cost(t), t**2, atol=1e-4)

    def test_cost_from_dict_with_offset(self):
        """JSON specs round through the builtin constructors."""
        cost = cost_from_dict({"kind": "convex", "builtin": "power", "p": 2.0, "offset": 0.5})
        assert cost(np.array(1.0)) == pytest.approx(1.5)
        assert cost.to_dict()["offset"] == 0.5


class TestQuantileCost:
    """alpha_h through quantile quadrature."""

    def test_identical_measures(self):
        """mu = nu costs nothing."""
        assert ot_cost_quantile(power_cost(2), normal(0, 1), normal(0, 1)) == pytest.approx(0.0, abs=1e-12)

    def test_translation(self):
        """A unit shift costs h(-1) = 1."""
        assert ot_cost_quantile(power_cost(2), normal(0, 1), normal(1, 1)) == pytest.approx(1.0, abs=1e-8)

    def test_normal_pair(self):
        """N(0,1) against N(1,4) costs 1 + (1 - 2)^2 = 2."""
        assert ot_cost_quantile(power_cost(2), normal(0, 1), normal(1, 2)) == pytest.approx(2.0, abs=1e-6)

    def test_divergent_tails(self):
        """Cauchy quantiles against a quadratic cost diverge."""
        family = LocationScaleFamily.builtin("cauchy")
        with pytest.raises(DivergentIntegral):
            ot_cost_quantile(power_cost(2), family.member(0.0, 2.0), family.generator)

    def test_concave_cost_rejected(self):
        """The quantile formula is for convex costs."""
        with pytest.raises(InvalidCost):
            ot_cost_quantile(concave_power_cost(0.5), uniform(0, 1), uniform(1, 2))

    @pytest.mark.timeout(5)
    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    def test_oracle_equivalence(self, p):
        """Quantile value agrees with the LP on n = 200 atoms within 2%."""
        mu, nu = uniform(0.0, 1.0), uniform(0.5, 2.0)
        cost = power_cost(p)
        exact = ot_cost_quantile(cost, mu, nu)
        lp = ot_lp(discretize(mu, 200), discretize(nu, 200), cost)
        assert abs(exact - lp.value) / exact <= 2e-2
        assert lp.duality_gap <= 1e-9


class TestMonotoneMap:
    """T = F_nu^{-1} o F_mu."""

    def test_identity(self):
        """mu = nu gives the identity map."""
        transport = monotone_map(uniform(0, 1), uniform(0, 1))
        np.testing.assert_allclose(transport.y, transport.x, atol=1e-12)

    def test_uniform_dilation(self):
        """U[0,1] -> U[0,2] is x -> 2x."""
        transport = monotone_map(uniform(0, 1), uniform(0, 2))
        np.testing.assert_allclose(transport.y, 2.0 * transport.x, atol=1e-9)

    def test_gaussian_translation(self):
        """N(0,1) -> N(1,1) is the translation by 1."""
        transport = monotone_map(normal(0, 1), normal(1, 1))
        np.testing.assert_allclose(transport.y, transport.x + 1.0, atol=1e-6)
        assert np.all(np.diff(transport.y) >= 0)

    def test_pushforward_quantiles(self):
        """T pushes mu's quantiles onto nu's."""
        mu, nu = uniform(0, 1), normal(0, 1)
        transport = monotone_map(mu, nu)
        u = np.array([0.1, 0.5, 0.9])
        np.testing.assert_allclose(transport(mu.quantile(u)), nu.quantile(u), atol=5e-3)

    def test_gridded_source_keeps_edges(self):
        """A gridded mu has levels 0 and 1 at its ends; their images are nu's grid ends."""
        mu, nu = normal(0, 1).gridded(), normal(1, 1)
        transport = monotone_map(mu, nu)
        np.testing.assert_array_equal(transport.x, mu.grid)
        assert transport.y[0] == nu.grid[0]
        assert transport.y[-1] == nu.grid[-1]


class TestPotentials:
    """f', the potentials and their certificates."""

    def test_identity_derivative(self):
        """mu = nu gives f' = 0."""
        fprime = potential_derivative_1d(power_cost(2), normal(0, 1), normal(0, 1))
        np.testing.assert_allclose(fprime.y, 0.0, atol=1e-12)

    def test_uniform_derivative(self):
        """h = x^2, U[0,1] -> U[0,2] gives f'(x) = -2x."""
        fprime = potential_derivative_1d(power_cost(2), uniform(0, 1), uniform(0, 2))
        np.testing.assert_allclose(fprime.y, -2.0 * fprime.x, atol=1e-8)

    def test_location_scale_derivative(self):
        """mu = G, nu = G_{a,b}: f'(x) = h'((1 - b) x - a)."""
        family = LocationScaleFamily.builtin("normal")
        cost = power_cost(2)
        a, b = 0.5, 2.0
        fprime = potential_derivative_1d(cost, family.generator, family.member(a, b))
        inner = np.abs(fprime.x) < 4
        np.testing.assert_allclose(
            fprime.y[inner], cost.derivative((1 - b) * fprime.x[inner] - a), atol=1e-6
        )

    def test_identity_potentials(self):
        """mu = nu gives zero potentials and zero dual value."""
        potentials = potentials_1d(power_cost(2), uniform(0, 1), uniform(0, 1))
        np.testing.assert_allclose(potentials.f.y, 0.0, atol=1e-12)
        np.testing.assert_allclose(potentials.g.y, 0.0, atol=1e-12)
        assert potentials.dual_value == pytest.approx(0.0, abs=1e-12)

    def test_translation_dual_value(self):
        """N(0,1) -> N(1,1): dual value 1 with a feasible pair."""
        cost = power_cost(2)
        potentials = potentials_1d(cost, normal(0, 1), normal(1, 1))
        assert potentials.dual_value == pytest.approx(1.0, abs=1e-3)
        assert potentials.feasibility_violation(cost) <= 1e-8

    def test_gridded_source_pins_left_edge(self):
        """f is defined on all of mu's grid and vanishes at its left end."""
        mu = normal(0, 1).gridded()
        potentials = potentials_1d(power_cost(2), mu, normal(1, 1))
        assert potentials.f.x[0] == mu.grid[0]
        assert potentials.f.y[0] == 0.0
        assert np.all(np.isfinite(potentials.f(mu.grid)))

    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    def test_duality_certificate(self, p):
        """Relative gap against the quantile value stays below 1e-3."""
        cost = power_cost(p)
        mu, nu = uniform(0.0, 1.0), uniform(0.5, 2.0)
        potentials = potentials_1d(cost, mu, nu)
        primal = ot_cost_quantile(cost, mu, nu)
        assert potentials.feasibility_violation(cost) <= 1e-8
        assert abs(potentials.dual_value - primal) / primal <= 1e-3


class TestGaussianTransport:
    """Closed-form quadratic transport between Gaussians."""

    def test_identity(self):
        """Equal Gaussians: D = I, zero cost."""
        mu = GaussianMeasure([1.0, 2.0], [[2.0, 0.3], [0.3, 1.0]])
        transport = gaussian_ot(mu, mu)
        np.testing.assert_allclose(transport.D, np.eye(2), atol=1e-10)
        assert transport.cost == pytest.approx(0.0, abs=1e-10)

    def test_one_dimensional_map(self):
        """N(0,1) -> N(1,4): T(x) = 2x + 1, cost 2."""
        transport = gaussian_ot(GaussianMeasure([0.0], [[1.0]]), GaussianMeasure([1.0], [[4.0]]))
        x = np.array([[-1.0], [0.0], [2.5]])
        np.testing.assert_allclose(transport.apply(x), 2.0 * x + 1.0, atol=1e-12)
        assert transport.cost == pytest.approx(2.0, abs=1e-12)

    def test_lp_cross_check(self):
        """Cost agrees with the LP oracle on n = 200 atoms within 1e-2."""
        lp = ot_lp(discretize(normal(0, 1), 200), discretize(normal(1, 2), 200), power_cost(2))
        assert lp.value == pytest.approx(2.0, abs=1e-2)

    @pytest.mark.slow
    def test_monte_carlo_cost(self):
        """Sobol estimate of E|x - T(x)|^2 within 1e-3."""
        transport = gaussian_ot(GaussianMeasure([0.0], [[1.0]]), GaussianMeasure([1.0], [[4.0]]))
        assert transport.monte_carlo_cost(seed=7) == pytest.approx(2.0, abs=1e-3)

    def test_pushforward_exactness(self):
        """T#mu has the target mean and covariance."""
        mu = GaussianMeasure([0.0, 1.0], [[2.0, 0.5], [0.5, 1.0]])
        nu = GaussianMeasure([3.0, -1.0], [[1.0, -0.2], [-0.2, 3.0]])
        pushed = gaussian_ot(mu, nu).pushforward()
        np.testing.assert_allclose(pushed.mean, nu.mean, atol=1e-10)
        np.testing.assert_allclose(pushed.covariance, nu.covariance, atol=1e-10)

    def test_isotropic_equal_scales(self):
        """sigma_1 = sigma_2 gives the constant gradient 2(a - b)."""
        a, b = np.array([1.0, 0.0]), np.array([0.0, 2.0])
        transport = gaussian_ot(GaussianMeasure(a, 2.0 * np.eye(2)), GaussianMeasure(b, 2.0 * np.eye(2)))
        grad = transport.gradient(np.array([[0.3, -4.0], [5.0, 1.0]]))
        np.testing.assert_allclose(grad, np.tile(2.0 * (a - b), (2, 1)), atol=1e-10)
        offset, basis = transport.identified_gradient_range()
        np.testing.assert_allclose(offset, 2.0 * (a - b), atol=1e-10)
        assert basis.shape == (2, 0)

    def test_isotropic_scaling(self):
        """A = s1^2 I, B = s2^2 I gives D = (s2/s1) I."""
        transport = gaussian_ot(GaussianMeasure([0.0, 0.0], np.eye(2)), GaussianMeasure([0.0, 0.0], 9.0 * np.eye(2)))
        np.testing.assert_allclose(transport.D, 3.0 * np.eye(2), atol=1e-10)
        _, basis = transport.identified_gradient_range()
        assert basis.shape == (2, 2)


class TestConcaveTransport:
    """Concave costs move only the Jordan leftovers."""

    def test_equal_measures(self):
        """mu = nu has no leftover and zero cost."""
        result = concave_ot_1d(concave_power_cost(0.5), uniform(0, 1), uniform(0, 1))
        assert result.value == 0.0
        assert result.coupling is None

    def test_disjoint_uniforms(self):
        """U[0,1] -> U[3,4] matches the LP oracle and is in the uniqueness regime."""
        cost = concave_power_cost(0.5)
        result = concave_ot_1d(cost, uniform(0, 1), uniform(3, 4), n=100)
        oracle = ot_lp(discretize(uniform(0, 1), 100), discretize(uniform(3, 4), 100), cost)
        assert result.value == pytest.approx(oracle.value, rel=1e-2)
        assert result.separation == pytest.approx(2.0, abs=0.01)
        assert result.unique_potentials

    def test_overlapping_uniforms(self):
        """U[0,2] -> U[1,3] transports U[0,1] onto U[2,3] with mass 1/2."""
        cost = concave_power_cost(0.5)
        result = concave_ot_1d(cost, uniform(0, 2), uniform(1, 3), n=100)
        oracle = ot_lp(
            discretize(uniform(0, 1), 100, total_mass=0.5),
            discretize(uniform(2, 3), 100, total_mass=0.5),
            cost,
        )
        assert result.leftover_mass == pytest.approx(0.5, abs=0.01)
        assert result.value == pytest.approx(oracle.value, rel=2e-2)

    def test_convex_cost_rejected(self):
        """Concave transport needs a concave cost."""
        with pytest.raises(InvalidCost):
            concave_ot_1d(power_cost(2), uniform(0, 1), uniform(3, 4))

"""
Tests for the exact transportation LP.
"""

import numpy as np
import pytest

from invot.exceptions import Infeasible, SizeExceeded
from invot.forward import concave_power_cost, monotone_coupling, ot_lp, power_cost
from invot.forward.lp import northwest_corner
from invot.measures import DiscreteMeasure, discretize, normal, uniform

pytestmark = pytest.mark.unit


def two_atoms(locations):
    return DiscreteMeasure(np.asarray(locations, dtype=float), np.full(len(locations), 1.0 / len(locations)))


class TestNorthwestCorner:
    """Initial basic feasible solutions."""

    def test_basis_size(self):
        """m + n - 1 basic cells, marginals respected."""
        a = np.array([0.2, 0.3, 0.5])
        b = np.array([0.5, 0.25, 0.125, 0.125])
        flows, basis = northwest_corner(a, b, 1e-12)
        assert len(basis) == 6
        np.testing.assert_allclose(flows.sum(axis=1), a)
        np.testing.assert_allclose(flows.sum(axis=0), b)

    def test_degenerate_staircase(self):
        """Equal weights keep a spanning staircase with zero-flow cells."""
        a = np.full(3, 1 / 3)
        flows, basis = northwest_corner(a, a, 1e-12)
        assert len(basis) == 5
        np.testing.assert_allclose(np.diag(flows), 1 / 3)


class TestOtLp:
    """Plans, duals and certificates."""

    def test_single_atoms(self):
        """delta_x -> delta_y costs c(x, y)."""
        result = ot_lp(two_atoms([0.0]), two_atoms([3.0]), power_cost(2))
        assert result.value == pytest.approx(9.0)
        np.testing.assert_allclose(result.coupling.plan, [[1.0]])

    def test_convex_monotone_pairing(self):
        """{0,1} -> {2,3} under x^2 pairs monotonically with value 4."""
        result = ot_lp(two_atoms([0.0, 1.0]), two_atoms([2.0, 3.0]), power_cost(2))
        assert result.value == pytest.approx(4.0)
        np.testing.assert_allclose(result.coupling.plan, [[0.5, 0.0], [0.0, 0.5]])
        assert result.duality_gap <= 1e-9

    def test_concave_anti_monotone_pairing(self):
        """{0,1} -> {2,3} under sqrt pairs the extremes."""
        result = ot_lp(two_atoms([0.0, 1.0]), two_atoms([2.0, 3.0]), concave_power_cost(0.5))
        assert result.value == pytest.approx((np.sqrt(3.0) + 1.0) / 2.0)
        np.testing.assert_allclose(result.coupling.plan, [[0.0, 0.5], [0.5, 0.0]])

    def test_unsorted_atoms(self):
        """Atom order does not change the optimum."""
        result = ot_lp(two_atoms([1.0, 0.0]), two_atoms([3.0, 2.0]), power_cost(2))
        assert result.value == pytest.approx(4.0)
        np.testing.assert_allclose(result.coupling.plan, [[0.5, 0.0], [0.0, 0.5]])

    def test_mass_mismatch(self):
        """Unequal total masses are infeasible."""
        heavy = DiscreteMeasure(np.array([0.0, 1.0]), np.array([0.6, 0.5]), total_mass=1.1)
        with pytest.raises(Infeasible):
            ot_lp(two_atoms([0.0, 1.0]), heavy, power_cost(2))

    def test_size_cap(self):
        """Products above the cap are refused."""
        with pytest.raises(SizeExceeded):
            ot_lp(two_atoms([0.0, 1.0]), two_atoms([2.0, 3.0]), power_cost(2), max_size=3)

    def test_random_instance_against_highs(self):
        """Simplex and HiGHS agree on an instance that needs pivots."""
        rng = np.random.default_rng(11)
        mu = DiscreteMeasure(rng.normal(size=(6, 2)), np.full(6, 1 / 6))
        weights = rng.uniform(0.5, 1.5, size=7)
        nu = DiscreteMeasure(rng.normal(size=(7, 2)), weights / weights.sum())
        cost = power_cost(1.5)
        simplex = ot_lp(mu, nu, cost)
        highs = ot_lp(mu, nu, cost, method="highs")
        assert simplex.value == pytest.approx(highs.value, abs=1e-7)
        assert simplex.duality_gap <= 1e-9
        assert simplex.dual_violation <= 1e-9
        assert simplex.coupling.marginal_error() <= 1e-9

    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 4.0])
    def test_monotone_plan_is_optimal(self, p):
        """For strictly convex costs the LP returns the quantile coupling."""
        mu, nu = discretize(normal(0, 1), 30), discretize(uniform(-1, 2), 30)
        cost = power_cost(p)
        result = ot_lp(mu, nu, cost)
        monotone = monotone_coupling(mu, nu, cost)
        assert result.coupling.same_plan(monotone)
        assert abs(monotone.value - result.value) <= 1e-9
        assert result.duality_gap <= 1e-9

    def test_barycentric_map(self):
        """The plan-weighted target of each row atom."""
        result = ot_lp(two_atoms([0.0, 1.0]), two_atoms([2.0, 3.0]), power_cost(2))
        np.testing.assert_allclose(result.coupling.barycentric_map()[:, 0], [2.0, 3.0])

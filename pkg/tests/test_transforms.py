"""
Tests for the g-transform, spectral deconvolution and Post inversion.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invot.core.grid import GridFunction
from invot.exceptions import (
    ConfigValidationError,
    KernelSpectrumDegenerate,
    MethodFamilyMismatch,
    MisalignedSamples,
    MissingSamples,
    NonPositiveScale,
    UnstableDerivative,
    UnsupportedRegime,
)
from invot.forward import grid_cost, power_cost
from invot.measures import LocationScaleFamily
from invot.transforms import (
    GTransformSamples,
    SampledLaplace,
    SpectralRegularization,
    deconvolve_location,
    density_form_value,
    forward_location,
    g_transform,
    kernel_scale,
    post_laplace_invert,
    post_rates,
    post_sampling_plan,
    value_surface_locscale,
)

pytestmark = pytest.mark.unit

NORMAL = LocationScaleFamily.builtin("normal")
EXPONENTIAL = LocationScaleFamily.builtin("exponential-scale")


def bump(x):
    return np.maximum(0.0, 1.0 - x**2) ** 2


def relative_l2(estimate, truth):
    return float(np.linalg.norm(estimate - truth) / np.linalg.norm(truth))


@pytest.fixture
def window_grid():
    return np.linspace(-6.0, 6.0, 97)


class TestGTransform:
    """Kernel integrals of tabulated functions."""

    def test_quadratic_moments(self):
        """I_g[x^2](a, b) = b (a^2 + b^2) under the normal kernel."""
        x = np.linspace(-20.0, 20.0, 8001)
        h = GridFunction(x, x**2)
        for a, b in [(0.0, 1.0), (1.0, 2.0), (-0.5, 0.5)]:
            assert g_transform(h, NORMAL, a, b) == pytest.approx(b * (a**2 + b**2), rel=1e-6)

    def test_weierstrass_scaling(self):
        """At scale sqrt(2) the normal kernel is sqrt(2) times the Weierstrass kernel."""
        x = np.linspace(-25.0, 25.0, 10001)
        h = GridFunction(x, x**2)
        # W[x^2](a) = a^2 + 2
        assert g_transform(h, NORMAL, 0.7, np.sqrt(2.0)) == pytest.approx(np.sqrt(2.0) * (0.49 + 2.0), rel=1e-6)

    @settings(max_examples=20, deadline=None)
    @given(st.floats(-2.0, 2.0), st.floats(-3.0, 3.0))
    def test_linearity(self, c1, c2):
        """The transform is linear in h."""
        x = np.linspace(-10.0, 10.0, 2001)
        f, g = GridFunction(x, x**2), GridFunction(x, np.cos(x))
        combined = GridFunction(x, c1 * f.y + c2 * g.y)
        expected = c1 * g_transform(f, NORMAL, 0.3, 1.5) + c2 * g_transform(g, NORMAL, 0.3, 1.5)
        assert g_transform(combined, NORMAL, 0.3, 1.5) == pytest.approx(expected, abs=1e-9)

    def test_zero_function(self):
        """The zero function transforms to zero."""
        x = np.linspace(-5.0, 5.0, 101)
        assert g_transform(GridFunction(x, np.zeros_like(x)), NORMAL, 0.0, 1.0) == 0.0

    def test_non_positive_scale(self):
        x = np.linspace(-1.0, 1.0, 11)
        with pytest.raises(NonPositiveScale):
            g_transform(GridFunction(x, x), NORMAL, 0.0, 0.0)


class TestValueSurface:
    """OT values over a location-scale family."""

    def test_quadratic_cost_surface(self):
        """alpha(G_{a,2}, G) = a^2 + 1 for h = x^2."""
        surface = value_surface_locscale(power_cost(2), NORMAL, [(-1.0, 2.0), (0.0, 2.0), (1.0, 2.0)])
        np.testing.assert_allclose(surface.values, [2.0, 1.0, 2.0], atol=1e-6)
        assert surface.family == "normal"

    def test_unit_scale_is_the_cost(self):
        """At b = 1 the value is h(a)."""
        surface = value_surface_locscale(power_cost(2), NORMAL, [(0.5, 1.0), (-2.0, 1.0)])
        np.testing.assert_allclose(surface.values, [0.25, 4.0], atol=1e-9)

    @pytest.mark.parametrize("a", [-1.0, 0.0, 1.0])
    def test_density_form_agrees(self, a):
        """Quantile and density sides of the same value agree."""
        cost = power_cost(2)
        quantile_side = value_surface_locscale(cost, NORMAL, [(a, 2.0)]).values[0]
        assert density_form_value(cost, NORMAL, a, 2.0) == pytest.approx(quantile_side, abs=1e-6)

    def test_density_form_below_unit_scale(self):
        """Symmetric generators accept b < 1 through |b - 1|."""
        cost = power_cost(2)
        quantile_side = value_surface_locscale(cost, NORMAL, [(0.5, 0.5)]).values[0]
        assert density_form_value(cost, NORMAL, 0.5, 0.5) == pytest.approx(quantile_side, abs=1e-6)

    def test_distinct_costs_separate_on_lattice(self):
        """x^2 and x^2 plus a local bump differ somewhere on an 8 x 8 (a, b) lattice."""
        x = np.linspace(-15.0, 15.0, 601)
        plain = grid_cost("convex", x, x**2)
        bumped = grid_cost("convex", x, x**2 + 0.05 * bump(x - 1.0))
        params = [(a, b) for a in np.linspace(-2.0, 2.0, 8) for b in np.linspace(0.5, 2.0, 8)]
        gap = np.abs(
            value_surface_locscale(bumped, NORMAL, params).values - value_surface_locscale(plain, NORMAL, params).values
        )
        assert gap.max() >= 1e-6

    def test_asymmetric_generator_below_unit_scale(self):
        """b < 1 is refused for the exponential generator."""
        with pytest.raises(UnsupportedRegime):
            kernel_scale(EXPONENTIAL, 0.5, "test")
        with pytest.raises(UnsupportedRegime):
            density_form_value(power_cost(2), EXPONENTIAL, 0.0, 0.5)


class TestGTransformSamples:
    """Validation and slicing of observed surfaces."""

    def test_slices(self):
        samples = GTransformSamples([0.0, 1.0, 0.0], [2.0, 2.0, 3.0], [1.0, 2.0, 4.0], "normal")
        a, values = samples.slice_at_b(2.0)
        np.testing.assert_allclose(a, [0.0, 1.0])
        b, values = samples.slice_at_a(0.0)
        np.testing.assert_allclose(b, [2.0, 3.0])
        np.testing.assert_allclose(values, [1.0, 4.0])

    def test_rejects_repeated_pairs(self):
        with pytest.raises(MisalignedSamples):
            GTransformSamples([0.0, 0.0], [2.0, 2.0], [1.0, 1.0], "normal")

    def test_rejects_non_positive_scale(self):
        with pytest.raises(NonPositiveScale):
            GTransformSamples([0.0], [0.0], [1.0], "normal")


class TestDeconvolution:
    """Spectral inversion of the location transform."""

    def test_bump_round_trip_unit_kernel(self, window_grid):
        """Forward then inverse at eps = 1e-3 keeps the bump within 0.2 on [-3, 3]."""
        h = GridFunction(window_grid, bump(window_grid))
        reg = SpectralRegularization(eps=1e-3)
        result = deconvolve_location(forward_location(h, NORMAL, 1.0, reg), NORMAL, 1.0, reg)
        inner = np.abs(window_grid) <= 3.0
        assert relative_l2(result.h.y[inner], h.y[inner]) <= 0.2

    @pytest.mark.timeout(2)
    def test_bump_round_trip_tight_cutoff(self, window_grid):
        """A smaller cutoff tightens the round trip."""
        h = GridFunction(window_grid, bump(window_grid))
        reg = SpectralRegularization(eps=1e-6)
        result = deconvolve_location(forward_location(h, NORMAL, 1.0, reg), NORMAL, 1.0, reg)
        inner = np.abs(window_grid) <= 3.0
        assert relative_l2(result.h.y[inner], h.y[inner]) <= 0.1

    def test_bump_round_trip_narrow_kernel(self, window_grid):
        """A narrower kernel loses less of the spectrum."""
        h = GridFunction(window_grid, bump(window_grid))
        reg = SpectralRegularization(eps=1e-3)
        result = deconvolve_location(forward_location(h, NORMAL, 0.5, reg), NORMAL, 0.5, reg)
        inner = np.abs(window_grid) <= 3.0
        assert relative_l2(result.h.y[inner], h.y[inner]) <= 0.1

    def test_diagnostics(self, window_grid):
        """The retained band sits above the cutoff."""
        h = GridFunction(window_grid, bump(window_grid))
        reg = SpectralRegularization(eps=1e-3)
        result = deconvolve_location(forward_location(h, NORMAL, 1.0, reg), NORMAL, 1.0, reg)
        diagnostics = result.diagnostics()
        assert diagnostics["min_kernel_modulus"] >= 1e-3
        assert 0.0 < diagnostics["clamped_fraction"] <= 0.9
        assert diagnostics["n_pad"] == 4 * window_grid.size

    def test_zero_data(self, window_grid):
        """Zero observations recover zero."""
        result = deconvolve_location(GridFunction(window_grid, np.zeros_like(window_grid)), NORMAL, 1.0)
        np.testing.assert_array_equal(result.h.y, 0.0)

    def test_polynomial_correction_recovers_quadratic(self, window_grid):
        """v = a^2 + 1 at unit scale is the image of x^2."""
        values = GridFunction(window_grid, window_grid**2 + 1.0)
        result = deconvolve_location(values, NORMAL, 1.0, poly_degree=2)
        np.testing.assert_allclose(result.polynomial, [0.0, 0.0, 1.0], atol=1e-6)
        inner = np.abs(window_grid) <= 3.0
        assert relative_l2(result.h.y[inner], window_grid[inner] ** 2) <= 0.1

    def test_fine_sampling_is_degenerate(self):
        """At spacing 0.02 almost the whole spectrum falls below the cutoff."""
        x = np.linspace(-6.0, 6.0, 601)
        with pytest.raises(KernelSpectrumDegenerate):
            deconvolve_location(GridFunction(x, bump(x)), NORMAL, 1.0)

    def test_uneven_grid(self):
        x = np.array([0.0, 0.1, 0.3, 0.4, 0.5])
        with pytest.raises(MisalignedSamples):
            deconvolve_location(GridFunction(x, x), NORMAL, 1.0)

    def test_regularization_ranges(self):
        with pytest.raises(ConfigValidationError):
            SpectralRegularization(eps=0.0)
        with pytest.raises(ConfigValidationError):
            SpectralRegularization(padding=1)


class TestPostInversion:
    """Post's formula through contour and difference derivatives."""

    @pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
    def test_reciprocal_is_exact(self, x):
        """L = 1/s inverts to 1 at every order."""
        assert post_laplace_invert(lambda s: 1.0 / s, x) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
    def test_exponential_within_ten_percent(self, x):
        """L = 1/(s + 1) inverts to exp(-x) at order 10."""
        value = post_laplace_invert(lambda s: 1.0 / (s + 1.0), x, order=10)
        assert abs(value - np.exp(-x)) <= 0.1 * np.exp(-x)

    def test_linearity(self):
        def first(s):
            return 1.0 / (s + 1.0)

        def second(s):
            return 1.0 / s**2

        combined = post_laplace_invert(lambda s: 2.0 * first(s) + 3.0 * second(s), 1.0)
        expected = 2.0 * post_laplace_invert(first, 1.0) + 3.0 * post_laplace_invert(second, 1.0)
        assert combined == pytest.approx(expected, rel=1e-9)

    def test_difference_path_on_analytic_input(self):
        """Central differences reach the contour answer for 1/s."""
        assert post_laplace_invert(lambda s: 1.0 / s, 1.0, method="difference") == pytest.approx(1.0, rel=1e-2)

    def test_sampled_transform(self):
        """Tabulated 2/s^3 gives the order-4 approximant (n+1)(n+2)/n^2 x^2."""
        rates = post_rates([1.0], order=4)
        transform = SampledLaplace(rates, 2.0 / rates**3)
        assert post_laplace_invert(transform, 1.0, order=4) == pytest.approx(30.0 / 16.0, rel=1e-3)

    def test_missing_rates(self):
        transform = SampledLaplace(np.array([1.0, 2.0, 3.0]), np.array([1.0, 0.5, 0.25]))
        with pytest.raises(MissingSamples):
            transform(2.5)
        with pytest.raises(MissingSamples):
            post_laplace_invert(transform, 1.0, order=4)

    def test_unstable_orders(self):
        """A point mass at 1 seen from x = 0.3 has no stable approximant."""
        with pytest.raises(UnstableDerivative):
            post_laplace_invert(lambda s: np.exp(-s), 0.3)

    def test_argument_checks(self):
        with pytest.raises(NonPositiveScale):
            post_laplace_invert(lambda s: 1.0 / s, 0.0)
        with pytest.raises(ConfigValidationError):
            post_laplace_invert(lambda s: 1.0 / s, 1.0, order=1)

    def test_sampling_plan(self):
        """Rates map to scales b = 1 + 1/s above 1."""
        plan = post_sampling_plan([0.5, 1.0], order=4)
        assert np.all(plan > 1.0)
        assert np.all(np.diff(plan) > 0)
        with pytest.raises(MethodFamilyMismatch):
            post_sampling_plan([1.0], family="normal")

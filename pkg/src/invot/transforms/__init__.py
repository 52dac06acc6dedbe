"""Integral transforms behind location-scale OT values and their inversions."""

from .deconvolution import (
    DeconvolutionResult,
    SpectralRegularization,
    Window,
    deconvolve_location,
    forward_location,
)
from .gtransform import (
    GTransformSamples,
    density_form_value,
    g_transform,
    kernel_scale,
    value_surface_locscale,
)
from .laplace import SampledLaplace, post_laplace_invert, post_rates, post_sampling_plan

__all__ = [
    "DeconvolutionResult",
    "GTransformSamples",
    "SampledLaplace",
    "SpectralRegularization",
    "Window",
    "deconvolve_location",
    "density_form_value",
    "forward_location",
    "g_transform",
    "kernel_scale",
    "post_laplace_invert",
    "post_rates",
    "post_sampling_plan",
    "value_surface_locscale",
]

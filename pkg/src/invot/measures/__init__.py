"""Measures on the real line, location-scale families and their discretizations."""

from .discrete import DiscreteMeasure, affine_pushforward, discretize
from .families import FamilyName, LocationScaleFamily, locscale_member, resolve_family
from .gaussian import GaussianMeasure, gaussian_rank_one_pushforward
from .jordan import JordanDecomposition, jordan_decompose, support_separation
from .measure1d import (
    DEFAULT_GRID_N,
    Measure1D,
    cdf_and_quantile_from_density,
    from_law,
    normal,
    uniform,
)

__all__ = [
    "DEFAULT_GRID_N",
    "DiscreteMeasure",
    "FamilyName",
    "GaussianMeasure",
    "JordanDecomposition",
    "LocationScaleFamily",
    "Measure1D",
    "affine_pushforward",
    "cdf_and_quantile_from_density",
    "discretize",
    "from_law",
    "gaussian_rank_one_pushforward",
    "jordan_decompose",
    "locscale_member",
    "normal",
    "resolve_family",
    "support_separation",
    "uniform",
]

"""Identifiability diagnostics and demonstrations."""

from .demos import DEMOS, run_demo
from .search import (
    FirstVariation,
    IdentifiabilityReport,
    ValueComparison,
    affine_reduction_check,
    first_variation_check,
    ordered_costs_check,
    parameter_lattice,
    plans_only_nonidentifiability,
    potentials_value_identity,
    values_equal_on_family,
)

__all__ = [
    "DEMOS",
    "FirstVariation",
    "IdentifiabilityReport",
    "ValueComparison",
    "affine_reduction_check",
    "first_variation_check",
    "ordered_costs_check",
    "parameter_lattice",
    "plans_only_nonidentifiability",
    "potentials_value_identity",
    "run_demo",
    "values_equal_on_family",
]

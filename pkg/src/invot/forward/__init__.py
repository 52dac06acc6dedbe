"""Forward transport: costs, quantile formula, exact LP, Gaussian and concave solvers."""

from .concave import ConcaveTransport, concave_ot_1d
from .costs import CostKind, CostSpec, concave_power_cost, cost_from_dict, grid_cost, power_cost
from .gaussian import GaussianTransport, gaussian_ot
from .lp import AtomPotentials, Coupling, LPResult, monotone_coupling, ot_lp
from .quantile import (
    Potentials1D,
    monotone_map,
    ot_cost_quantile,
    potential_derivative_1d,
    potentials_1d,
)

__all__ = [
    "AtomPotentials",
    "ConcaveTransport",
    "CostKind",
    "CostSpec",
    "Coupling",
    "GaussianTransport",
    "LPResult",
    "Potentials1D",
    "concave_ot_1d",
    "concave_power_cost",
    "cost_from_dict",
    "gaussian_ot",
    "grid_cost",
    "monotone_coupling",
    "monotone_map",
    "ot_cost_quantile",
    "ot_lp",
    "potential_derivative_1d",
    "potentials_1d",
    "power_cost",
]

"""
One-dimensional convex-cost transport through quantile functions.

For a strictly convex h the monotone rearrangement T = F_nu^{-1} o F_mu is
optimal, the cost is the quantile integral of h(F_mu^{-1} - F_nu^{-1}) and
the Kantorovich potential has derivative f'(x) = h'(x - T(x)).
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from ..core.grid import GridFunction
from ..core.quadrature import integrate_unit_interval
from ..exceptions import DegenerateGraph, InvalidCost
from ..measures.measure1d import Measure1D
from ..utils.logging import get_logger
from .costs import CostSpec

logger = get_logger(__name__)

C_TRANSFORM_BLOCK = 256


def _require_convex(cost: CostSpec, operation: str) -> None:
    if not cost.is_convex:
        raise InvalidCost(f"{operation} needs a convex cost, got {cost.name}", operation=operation)


def two_sided_quantile(measure: Measure1D, u: np.ndarray) -> np.ndarray:
    """Quantile with the upper half evaluated through the survival side."""
    u = np.asarray(u, dtype=float)
    lower = u <= 0.5
    out = np.empty_like(u)
    out[lower] = measure.quantile(u[lower])
    out[~lower] = measure.upper_quantile(1.0 - u[~lower])
    return out


def ot_cost_quantile(cost: CostSpec, mu: Measure1D, nu: Measure1D) -> float:
    """alpha_c(mu, nu) for a convex cost of the difference.

    Raises:
        DivergentIntegral: the quantile integral does not converge.
    """
    _require_convex(cost, "ot_cost_quantile")

    def integrand(u):
        return cost(two_sided_quantile(mu, u) - two_sided_quantile(nu, u))

    return integrate_unit_interval(integrand, operation="ot_cost_quantile")


def monotone_map(mu: Measure1D, nu: Measure1D, x: Optional[np.ndarray] = None) -> GridFunction:
    """T = F_nu^{-1} o F_mu on ``x`` (default: mu's grid).

    Images are clamped to nu's tabulated support, so levels 0 and 1 at the
    edges of a gridded mu land on nu's grid ends instead of +-inf.
    """
    x = mu.grid if x is None else np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        lower = mu.cdf_at(x)
        upper = mu.sf_at(x)
        images = np.where(
            lower <= 0.5,
            nu.quantile(np.minimum(lower, 0.5)),
            nu.upper_quantile(np.minimum(upper, 0.5)),
        )
    images = np.clip(images, nu.grid[0], nu.grid[-1])
    keep = np.isfinite(images)
    if keep.sum() < 2:
        raise DegenerateGraph("monotone map has fewer than 2 finite samples", operation="monotone_map")
    return GridFunction(x[keep], images[keep])


def potential_derivative_1d(cost: CostSpec, mu: Measure1D, nu: Measure1D) -> GridFunction:
    """Samples of f'(x) = h'(x - T(x)) on mu's grid."""
    _require_convex(cost, "potential_derivative_1d")
    transport = monotone_map(mu, nu)
    return GridFunction(transport.x, cost.derivative(transport.x - transport.y))


@dataclass(frozen=True)
class Potentials1D:
    """Kantorovich pair (f, g) sampled on the two measures' grids."""

    f: GridFunction
    g: GridFunction
    fprime: GridFunction
    transport: GridFunction
    dual_value: float

    def feasibility_violation(self, cost: CostSpec) -> float:
        """max over grid pairs of f(x) + g(y) - c(x, y), clipped at 0."""
        worst = np.max(self.g.y - c_transform(cost, self.f, self.g.x))
        return max(float(worst), 0.0)


def c_transform(cost: CostSpec, f: GridFunction, y: np.ndarray) -> np.ndarray:
    """g(y) = min_x { c(x - y) - f(x) } over the samples of f."""
    out = np.empty(y.size)
    for start in range(0, y.size, C_TRANSFORM_BLOCK):
        block = y[start:start + C_TRANSFORM_BLOCK]
        out[start:start + C_TRANSFORM_BLOCK] = np.min(
            cost(f.x[:, None] - block[None, :]) - f.y[:, None], axis=0
        )
    return out


def potentials_1d(cost: CostSpec, mu: Measure1D, nu: Measure1D) -> Potentials1D:
    """Potentials from the monotone map; f pinned to 0 at the left grid edge."""
    _require_convex(cost, "potentials_1d")
    transport = monotone_map(mu, nu)
    x = transport.x
    slope = cost.derivative(x - transport.y)
    f = GridFunction(x, cumulative_trapezoid(slope, x, initial=0.0))

    y = nu.grid
    g_values = c_transform(cost, f, y)
    finite = np.isfinite(g_values)
    g = GridFunction(y[finite], g_values[finite])

    dual = float(trapezoid(f.y * mu.pdf(x), x) + trapezoid(g.y * nu.pdf(g.x), g.x))
    logger.debug(
        "potentials computed",
        extra={"extra_data": {"cost": cost.name, "grid": int(x.size), "dual_value": dual}},
    )
    return Potentials1D(f=f, g=g, fprime=GridFunction(x, slope), transport=transport, dual_value=dual)


def transport_cost_along_map(cost: CostSpec, mu: Measure1D, transport: GridFunction) -> float:
    """Trapezoid value of the integral of c(x, T(x)) d mu(x) on the map's grid."""
    return float(trapezoid(cost(transport.x - transport.y) * mu.pdf(transport.x), transport.x))

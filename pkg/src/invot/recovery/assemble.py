"""
Assembly of a cost from its conjugate graph.

The graph of grad h* is swapped into h' (or l' for costs of the distance),
integrated to h, and the additive constant k is resolved by a value
anchor, by the origin pin h(0) = 0, or left unresolved.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.optimize import isotonic_regression

from ..core.grid import GridFunction
from ..core.quadrature import integrate_unit_interval
from ..exceptions import AnchorInfeasible, DegenerateGraph, DivergentIntegral, InvalidCost, NonMonotoneGraph
from ..forward.costs import CostKind, CostSpec
from ..forward.quantile import two_sided_quantile
from ..measures.measure1d import Measure1D
from ..utils.logging import get_logger
from .conjugate import ConjugateGraph

logger = get_logger(__name__)

MONOTONE_TOL = 1e-6
EDGE_TOL = 1e-6
ORIGIN_TOL = 1e-6
ANCHOR_SLACK = 1e-3
DEFAULT_POINTS = 401


class KMethod(str, Enum):
    VALUE_MATCH = "value-match"
    ORIGIN_PIN = "origin-pin"
    UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class ValueAnchor:
    """An observed OT value alpha between mu and nu."""

    mu: Measure1D
    nu: Measure1D
    alpha: float


@dataclass(frozen=True)
class RecoveredCost:
    """A cost known on its identified domain.

    ``h`` and ``hprime`` are tabulated on the domain; ``inverse`` is the
    monotone graph (h')^{-1} (or (l')^{-1}) actually inverted. Evaluation
    outside the domain returns NaN.
    """

    kind: CostKind
    hprime: GridFunction
    h: GridFunction
    inverse: GridFunction
    k: Optional[float]
    k_method: KMethod
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def identified_domain(self) -> Tuple[float, float]:
        return self.h.domain

    def _argument(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == CostKind.CONCAVE:
            x = np.abs(x)
        lo, hi = self.identified_domain
        slack = EDGE_TOL * max(1.0, hi - lo)
        inside = (x >= lo - slack) & (x <= hi + slack)
        return np.where(inside, np.clip(x, lo, hi), np.nan)

    def __call__(self, x) -> np.ndarray:
        return self.h(self._argument(x))

    def derivative(self, x) -> np.ndarray:
        return self.hprime(self._argument(x))

    def to_cost(self) -> CostSpec:
        """The recovered cost as a CostSpec (NaN off the identified domain)."""
        return CostSpec(
            self.kind,
            f"recovered-{self.kind.value}",
            self.__call__,
            self.derivative,
            self.inverse,
            growth_p=2.0,
            cone_condition=False,
            spec={"kind": self.kind.value, "builtin": "grid", "x": self.h.x.tolist(), "h": self.h.y.tolist()},
        )

    def to_dict(self) -> Dict[str, Any]:
        lo, hi = self.identified_domain
        return {
            "kind": self.kind.value,
            "identified_domain": [lo, hi],
            "k": self.k,
            "k_method": self.k_method.value,
            "hprime": {"x": self.hprime.x.tolist(), "y": self.hprime.y.tolist()},
            "h": {"x": self.h.x.tolist(), "y": self.h.y.tolist()},
            "diagnostics": dict(self.diagnostics),
        }


def isotonic_projection(values: np.ndarray, increasing: bool = True, operation: str = "isotonic_projection"):
    """Pool-adjacent-violators fit and its max distance from ``values``.

    Raises:
        NonMonotoneGraph: the distance exceeds the monotonicity tolerance.
    """
    fit = isotonic_regression(np.asarray(values, dtype=float), increasing=increasing).x
    distance = float(np.max(np.abs(fit - values))) if fit.size else 0.0
    if distance > MONOTONE_TOL:
        raise NonMonotoneGraph(
            f"graph is {distance:.3e} away from monotone (tolerance {MONOTONE_TOL:g})",
            operation=operation,
            projection_distance=distance,
        )
    return fit, distance


def _pool_ties(keys: np.ndarray, values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    unique, inverse = np.unique(keys, return_inverse=True)
    means = np.bincount(inverse, weights=values) / np.bincount(inverse)
    return unique, means


def _anchor_value(cost: CostSpec, anchor: ValueAnchor, domain: Tuple[float, float]) -> float:
    """Quantile integral of the recovered cost over the anchor pair.

    Displacements within ANCHOR_SLACK of the identified domain are clamped
    onto it; the gridded tails of the anchor pair reach its edges only up
    to interpolation error.
    """
    mu, nu = anchor.mu.gridded(), anchor.nu.gridded()
    lo, hi = domain
    slack = ANCHOR_SLACK * max(1.0, hi - lo)

    def integrand(u):
        d = two_sided_quantile(mu, u) - two_sided_quantile(nu, u)
        outside = (d < lo - slack) | (d > hi + slack)
        return np.where(outside, np.nan, cost(np.clip(d, lo, hi)))

    try:
        return integrate_unit_interval(integrand, operation="assemble_convex_cost")
    except DivergentIntegral as exc:
        raise AnchorInfeasible(
            f"anchor pair transports outside the identified domain [{lo:.6g}, {hi:.6g}]: {exc.message}",
            operation="assemble_convex_cost",
        ) from exc


def assemble_convex_cost(
    graph: ConjugateGraph, value_anchor: Optional[ValueAnchor] = None, n: int = DEFAULT_POINTS
) -> RecoveredCost:
    """h' = graph^{-1} on an n-point grid, integrated to h, k resolved.

    Raises:
        DegenerateGraph: fewer than two distinct points.
        NonMonotoneGraph: z decreases in y by more than 1e-6.
        AnchorInfeasible: the anchor value cannot be evaluated.
    """
    if graph.kind != CostKind.CONVEX:
        raise InvalidCost("assemble_convex_cost needs a convex graph", operation="assemble_convex_cost")
    if graph.is_degenerate:
        raise DegenerateGraph("conjugate graph spans a single gradient", operation="assemble_convex_cost")

    z_fit, distance = isotonic_projection(graph.z, increasing=True, operation="assemble_convex_cost")
    z, y = _pool_ties(z_fit, graph.y)
    if z.size < 2:
        raise DegenerateGraph("conjugate graph maps to a single displacement", operation="assemble_convex_cost")

    grid = np.linspace(z[0], z[-1], n)
    hprime = np.interp(grid, z, y)
    h = cumulative_trapezoid(hprime, grid, initial=0.0)
    origin_inside = grid[0] <= 0.0 <= grid[-1]
    if origin_inside:
        h = h - np.interp(0.0, grid, h)

    base = RecoveredCost(
        CostKind.CONVEX,
        hprime=GridFunction(grid, hprime),
        h=GridFunction(grid, h),
        inverse=GridFunction(graph.y, z_fit),
        k=None,
        k_method=KMethod.UNRESOLVED,
        diagnostics={"isotonic_projection_distance": distance, "anchor_residual": None},
    )

    if value_anchor is not None:
        k = value_anchor.alpha - _anchor_value(base.to_cost(), value_anchor, base.identified_domain)
        shifted = GridFunction(grid, h + k)
        resolved = RecoveredCost(
            CostKind.CONVEX, base.hprime, shifted, base.inverse, k, KMethod.VALUE_MATCH, dict(base.diagnostics)
        )
        residual = _anchor_value(resolved.to_cost(), value_anchor, base.identified_domain) - value_anchor.alpha
        resolved.diagnostics["anchor_residual"] = residual
    elif origin_inside:
        resolved = RecoveredCost(
            CostKind.CONVEX, base.hprime, base.h, base.inverse, 0.0, KMethod.ORIGIN_PIN, dict(base.diagnostics)
        )
    else:
        resolved = base

    logger.info(
        "convex cost assembled",
        extra={
            "extra_data": {
                "points": len(graph),
                "domain": list(resolved.identified_domain),
                "k_method": resolved.k_method.value,
                "projection_distance": distance,
            }
        },
    )
    return resolved


def recover_concave(graph: ConjugateGraph) -> RecoveredCost:
    """l' and l from a concave graph, tabulated on the observed distances.

    The points give t = (l')^{-1}(s) with s = |y|, t = |z|; t must fall as s
    grows. l(0) = 0 is pinned when the smallest distance reaches the origin.

    Raises:
        DegenerateGraph: fewer than two distinct positive distances.
        SignInconsistent: raised when the graph is built.
    """
    if graph.kind != CostKind.CONCAVE:
        raise InvalidCost("recover_concave needs a concave graph", operation="recover_concave")
    s = np.abs(graph.y)
    t = np.abs(graph.z)
    keep = (s > 0) & (t > 0)
    s, t = s[keep], t[keep]
    order = np.argsort(s, kind="stable")
    s, t = s[order], t[order]
    if np.unique(s).size < 2:
        raise DegenerateGraph("concave graph needs two distinct gradient sizes", operation="recover_concave")

    t_fit, distance = isotonic_projection(t, increasing=False, operation="recover_concave")
    t_grid, lprime = _pool_ties(t_fit, s)
    if t_grid.size < 2:
        raise DegenerateGraph("concave graph maps to a single distance", operation="recover_concave")

    l = cumulative_trapezoid(lprime, t_grid, initial=0.0)
    if t_grid[0] <= ORIGIN_TOL * t_grid[-1]:
        l = l + t_grid[0] * lprime[0]
        k, method = 0.0, KMethod.ORIGIN_PIN
    else:
        k, method = None, KMethod.UNRESOLVED

    recovered = RecoveredCost(
        CostKind.CONCAVE,
        hprime=GridFunction(t_grid, lprime),
        h=GridFunction(t_grid, l),
        inverse=GridFunction(s, t_fit),
        k=k,
        k_method=method,
        diagnostics={"isotonic_projection_distance": distance, "anchor_residual": None},
    )
    logger.info(
        "concave cost assembled",
        extra={
            "extra_data": {"points": int(s.size), "domain": list(recovered.identified_domain), "k_method": method.value}
        },
    )
    return recovered

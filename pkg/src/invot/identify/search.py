"""
Identifiability diagnostics.

A finite lattice can only certify that two costs are distinguishable; when
no witness turns up the report says so and nothing more.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import minimize_scalar

from ..core.grid import GridFunction
from ..exceptions import InvalidCost, NegativeDensity, PerturbationMassError
from ..forward.costs import CostSpec
from ..forward.lp import monotone_coupling, ot_lp
from ..forward.quantile import ot_cost_quantile, potentials_1d, transport_cost_along_map
from ..measures.discrete import affine_pushforward, discretize
from ..measures.families import LocationScaleFamily
from ..measures.measure1d import Measure1D, cdf_and_quantile_from_density
from ..utils.logging import get_logger

logger = get_logger(__name__)

DEFAULT_A_RANGE = (-2.0, 2.0)
DEFAULT_B_RANGE = (1.1, 3.0)
DEFAULT_LATTICE_SHAPE = (9, 9)
DEFAULT_TOL = 1e-8
CERTIFICATE_TOL = 1e-9
MASS_TOL = 1e-10
NEGATIVE_TOL = 1e-14
OPEN_SET_NOTE = "hypothesis: values observed on an open set; not verifiable from finitely many samples"
NO_WITNESS_NOTE = "no witness found on the search lattice"

Param = Tuple[float, float]


@dataclass
class IdentifiabilityReport:
    """Outcome of a comparison between candidate costs."""

    distinguishable: bool
    witness: Optional[Dict[str, Any]]
    max_value_gap: float
    plans_agree: Optional[bool] = None
    certificates: List[Dict[str, Any]] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    lattice: List[Tuple[float, float, float]] = field(default_factory=list, repr=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "distinguishable": self.distinguishable,
            "witness": self.witness,
            "max_value_gap": self.max_value_gap,
            "plans_agree": self.plans_agree,
            "certificates": self.certificates,
            "notes": self.notes,
        }


def parameter_lattice(
    a_range: Tuple[float, float] = DEFAULT_A_RANGE,
    b_range: Tuple[float, float] = DEFAULT_B_RANGE,
    shape: Tuple[int, int] = DEFAULT_LATTICE_SHAPE,
) -> List[Param]:
    """Row-major (a, b) lattice."""
    a_values = np.linspace(a_range[0], a_range[1], shape[0])
    b_values = np.linspace(b_range[0], b_range[1], shape[1])
    return [(float(a), float(b)) for a in a_values for b in b_values]


def _signed_gap(c1: CostSpec, c2: CostSpec, family: LocationScaleFamily, a: float, b: float) -> float:
    member = family.member(a, b)
    return ot_cost_quantile(c1, member, family.generator) - ot_cost_quantile(c2, member, family.generator)


def _lp_gap(c1: CostSpec, c2: CostSpec, family: LocationScaleFamily, a: float, b: float, n: int) -> float:
    rows = discretize(family.member(a, b), n)
    cols = discretize(family.generator, n)
    return ot_lp(rows, cols, c1).value - ot_lp(rows, cols, c2).value


def values_equal_on_family(
    c1: CostSpec,
    c2: CostSpec,
    family: LocationScaleFamily,
    param_grid: Optional[Sequence[Param]] = None,
    tol: float = DEFAULT_TOL,
    jobs: int = 1,
    refine: bool = True,
    lp_crosscheck_n: Optional[int] = None,
) -> IdentifiabilityReport:
    """Compare alpha_{h1} and alpha_{h2} over (a, b) parameters.

    The witness is the first lattice point, in lattice order, whose gap
    exceeds ``tol``. Lattice points are evaluated on ``jobs`` threads.
    """
    if not (c1.is_convex and c2.is_convex):
        raise InvalidCost("values_equal_on_family compares convex costs", operation="values_equal_on_family")
    grid = parameter_lattice() if param_grid is None else [(float(a), float(b)) for a, b in param_grid]

    def evaluate(param: Param) -> float:
        return _signed_gap(c1, c2, family, *param)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            gaps = np.array(list(pool.map(evaluate, grid)))
    else:
        gaps = np.array([evaluate(p) for p in grid])

    magnitudes = np.abs(gaps)
    best = int(np.argmax(magnitudes))
    max_gap = float(magnitudes[best])
    hits = np.flatnonzero(magnitudes > tol)
    witness = None
    if hits.size:
        a, b = grid[hits[0]]
        witness = {"a": a, "b": b, "gap": float(gaps[hits[0]])}

    if refine and len(grid) > 1:
        refined = _refine_scale(c1, c2, family, grid, best)
        if refined is not None and refined[2] > max_gap:
            a, b, gap = refined
            max_gap = gap
            if witness is None and gap > tol:
                witness = {"a": a, "b": b, "gap": gap}

    report = IdentifiabilityReport(
        distinguishable=witness is not None,
        witness=witness,
        max_value_gap=max_gap,
        notes=[OPEN_SET_NOTE] if witness is not None else [NO_WITNESS_NOTE, OPEN_SET_NOTE],
        lattice=[(a, b, float(g)) for (a, b), g in zip(grid, gaps)],
    )

    if witness is not None and lp_crosscheck_n:
        lp_gap = _lp_gap(c1, c2, family, witness["a"], witness["b"], lp_crosscheck_n)
        report.certificates.append(
            {
                "a": witness["a"],
                "b": witness["b"],
                "quantile_gap": witness["gap"],
                "lp_gap": lp_gap,
                "sign_consistent": bool(np.sign(lp_gap) == np.sign(witness["gap"])),
            }
        )

    logger.info(
        "value comparison finished",
        extra={
            "extra_data": {
                "costs": [c1.name, c2.name],
                "points": len(grid),
                "max_value_gap": max_gap,
                "distinguishable": report.distinguishable,
            }
        },
    )
    return report


def _refine_scale(c1, c2, family, grid: List[Param], best: int) -> Optional[Tuple[float, float, float]]:
    """Bounded golden-section search in b around the best lattice point."""
    a, b = grid[best]
    same_row = sorted({p[1] for p in grid if p[0] == a})
    if len(same_row) < 2:
        return None
    idx = same_row.index(b)
    lo = same_row[max(idx - 1, 0)]
    hi = same_row[min(idx + 1, len(same_row) - 1)]
    result = minimize_scalar(lambda s: -abs(_signed_gap(c1, c2, family, a, s)), bounds=(lo, hi), method="bounded")
    return a, float(result.x), float(-result.fun)


def plans_only_nonidentifiability(
    costs: Sequence[CostSpec], mu: Measure1D, nu: Measure1D, n: int = 50, tol: float = DEFAULT_TOL
) -> IdentifiabilityReport:
    """Certify that one monotone plan is optimal for every cost while values differ."""
    if not costs:
        raise InvalidCost("need at least one cost", operation="plans_only_nonidentifiability")
    for cost in costs:
        if not cost.is_convex:
            raise InvalidCost(f"{cost.name} is not convex", operation="plans_only_nonidentifiability")
    rows, cols = discretize(mu, n), discretize(nu, n)
    certificates = []
    values = []
    for cost in costs:
        result = ot_lp(rows, cols, cost)
        monotone = monotone_coupling(rows, cols, cost)
        values.append(result.value)
        certificates.append(
            {
                "cost": cost.name,
                "value": result.value,
                "duality_gap": result.duality_gap,
                "monotone_plan": result.coupling.same_plan(monotone),
                "certified": result.duality_gap <= CERTIFICATE_TOL and result.coupling.same_plan(monotone),
            }
        )
    plans_agree = all(c["certified"] for c in certificates)
    spread = float(max(values) - min(values))
    distinguishable = spread > tol
    logger.info(
        "plans-only comparison",
        extra={
            "extra_data": {"costs": [c.name for c in costs], "n": n, "plans_agree": plans_agree, "value_spread": spread}
        },
    )
    return IdentifiabilityReport(
        distinguishable=distinguishable,
        witness={"mu": mu.name, "nu": nu.name} if distinguishable else None,
        max_value_gap=spread,
        plans_agree=plans_agree,
        certificates=certificates,
    )


@dataclass(frozen=True)
class FirstVariation:
    derivative: float
    inner_product: float

    @property
    def discrepancy(self) -> float:
        return abs(self.derivative - self.inner_product)

    @property
    def relative_discrepancy(self) -> float:
        scale = abs(self.inner_product)
        return self.discrepancy / scale if scale > 0 else self.discrepancy


def first_variation_check(
    cost: CostSpec, mu: Measure1D, nu: Measure1D, phi: GridFunction, t: float
) -> FirstVariation:
    """Right difference quotient of t -> alpha(mu + t phi, nu) against the integral of f phi.

    Raises:
        PerturbationMassError: phi does not integrate to zero.
        NegativeDensity: mu + t phi is negative somewhere.
    """
    mass = float(trapezoid(phi.y, phi.x))
    if abs(mass) > MASS_TOL:
        raise PerturbationMassError(f"perturbation integrates to {mass:.3e}", operation="first_variation_check")
    if not t > 0:
        raise PerturbationMassError("step t must be positive", operation="first_variation_check")

    x = mu.grid
    bump = np.interp(x, phi.x, phi.y, left=0.0, right=0.0)
    perturbed = mu.density + t * bump
    if np.any(perturbed < -NEGATIVE_TOL):
        raise NegativeDensity(
            f"mu + t phi is negative for t = {t}",
            operation="first_variation_check",
            indices=np.flatnonzero(perturbed < -NEGATIVE_TOL)[:10].tolist(),
        )
    base = cdf_and_quantile_from_density(x, mu.density, name=f"{mu.name}:base")
    moved = cdf_and_quantile_from_density(x, np.maximum(perturbed, 0.0), name=f"{mu.name}:perturbed")

    derivative = (ot_cost_quantile(cost, moved, nu) - ot_cost_quantile(cost, base, nu)) / t
    potentials = potentials_1d(cost, base, nu)
    inner = float(trapezoid(potentials.f(x) * bump, x))
    result = FirstVariation(derivative, inner)
    logger.debug(
        "first variation",
        extra={"extra_data": {"t": t, "derivative": derivative, "inner_product": inner}},
    )
    return result


@dataclass(frozen=True)
class ValueComparison:
    left: float
    right: float

    @property
    def gap(self) -> float:
        return abs(self.left - self.right)


def affine_reduction_check(
    cost: CostSpec, mu: Measure1D, nu: Measure1D, u, r, n: int = 100
) -> ValueComparison:
    """LP value of the pushforwards x u + r in R^d against the 1-D LP value."""
    rows, cols = discretize(mu, n), discretize(nu, n)
    lifted = ot_lp(affine_pushforward(mu, u, r, n, base=rows), affine_pushforward(nu, u, r, n, base=cols), cost)
    flat = ot_lp(rows, cols, cost)
    return ValueComparison(lifted.value, flat.value)


def potentials_value_identity(cost: CostSpec, mu: Measure1D, nu: Measure1D) -> ValueComparison:
    """Dual side of the potentials against the cost paid along the observed map."""
    potentials = potentials_1d(cost, mu, nu)
    primal = transport_cost_along_map(cost, mu, potentials.transport)
    return ValueComparison(potentials.dual_value, primal)


def ordered_costs_check(
    c1: CostSpec,
    c2: CostSpec,
    grid,
    family: Optional[LocationScaleFamily] = None,
    b: float = 1.5,
    tol: float = DEFAULT_TOL,
) -> Tuple[bool, Optional[Dict[str, float]]]:
    """Whether one cost dominates the other on ``grid``, with a witness parameter.

    The witness places the location at the largest strict gap; its OT
    value gap is computed under ``family`` (normal by default).
    """
    grid = np.asarray(grid, dtype=float)
    diff = c2(grid) - c1(grid)
    if np.all(diff >= -tol) and np.any(diff > tol):
        sign = 1.0
    elif np.all(diff <= tol) and np.any(diff < -tol):
        sign = -1.0
    else:
        return False, None
    family = family if family is not None else LocationScaleFamily.builtin("normal")
    a = float(grid[int(np.argmax(sign * diff))])
    gap = -_signed_gap(c1, c2, family, a, b)
    return True, {"a": a, "b": b, "gap": gap}

"""
Concave-cost transport on the line: the common mass stays put and only the
Jordan leftovers move.
"""

from dataclasses import dataclass
from typing import Optional

from ..exceptions import InvalidCost
from ..measures.discrete import discretize
from ..measures.jordan import JordanDecomposition, jordan_decompose, support_separation
from ..measures.measure1d import Measure1D, cdf_and_quantile_from_density
from ..utils.logging import get_logger
from .costs import CostSpec
from .lp import LPResult, ot_lp

logger = get_logger(__name__)

LEFTOVER_TOL = 1e-9
DEFAULT_LEFTOVER_ATOMS = 100


@dataclass(frozen=True)
class ConcaveTransport:
    value: float
    decomposition: JordanDecomposition
    separation: float
    unique_potentials: bool
    lp: Optional[LPResult] = None

    @property
    def leftover_mass(self) -> float:
        return self.decomposition.leftover_mass

    @property
    def coupling(self):
        return self.lp.coupling if self.lp is not None else None

    @property
    def potentials(self):
        return self.lp.potentials if self.lp is not None else None


def leftover_atoms(decomposition: JordanDecomposition, n: int):
    """Equal-mass discretizations of both leftovers, each of total mass P."""
    mass = decomposition.leftover_mass
    plus = cdf_and_quantile_from_density(decomposition.grid, decomposition.plus, name="leftover+")
    minus = cdf_and_quantile_from_density(decomposition.grid, decomposition.minus, name="leftover-")
    return discretize(plus, n, total_mass=mass), discretize(minus, n, total_mass=mass)


def concave_ot_1d(
    cost: CostSpec,
    mu: Measure1D,
    nu: Measure1D,
    n: int = DEFAULT_LEFTOVER_ATOMS,
    method: str = "simplex",
) -> ConcaveTransport:
    """Transport cost for l(|x - y|) with l concave.

    The value excludes the common mass min(mu, nu), which travels at cost
    l(0) = 0. ``unique_potentials`` holds when the leftover supports are
    separated by more than two grid steps.
    """
    if cost.is_convex:
        raise InvalidCost(f"concave_ot_1d needs a concave cost, got {cost.name}", operation="concave_ot_1d")

    decomposition = jordan_decompose(mu, nu)
    grid = decomposition.grid
    step = float(grid[1] - grid[0])
    separation = support_separation(grid, decomposition.plus, decomposition.minus)

    if decomposition.leftover_mass <= LEFTOVER_TOL:
        logger.debug("concave transport: no leftover mass")
        return ConcaveTransport(0.0, decomposition, separation, True)

    rows, cols = leftover_atoms(decomposition, n)
    result = ot_lp(rows, cols, cost, method=method)
    logger.debug(
        "concave transport",
        extra={
            "extra_data": {
                "leftover_mass": decomposition.leftover_mass,
                "separation": separation,
                "value": result.value,
            }
        },
    )
    return ConcaveTransport(
        value=result.value,
        decomposition=decomposition,
        separation=separation,
        unique_potentials=separation > 2.0 * step,
        lp=result,
    )


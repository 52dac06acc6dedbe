"""
The g-transform I_g[h](a, b) = integral of g((x - a)/b) h(x) dx and the OT
value surface of a location-scale family.

For F = G_{a,b} against G the quantile formula gives
alpha_h(G_{a,b}, G) = E h(a + (b - 1) X), X ~ G, which for b > 1 is
(1/(b - 1)) I_g[h](a, b - 1). For b < 1 the same holds with |b - 1| when G
is symmetric.
"""

from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

import numpy as np
from scipy.integrate import trapezoid

from ..core.grid import GridFunction
from ..exceptions import MisalignedSamples, NonFiniteInput, NonPositiveScale, UnsupportedRegime
from ..forward.costs import CostSpec
from ..forward.quantile import ot_cost_quantile
from ..measures.families import LocationScaleFamily
from ..utils.logging import get_logger

logger = get_logger(__name__)

DENSITY_FORM_POINTS = 4001
DENSITY_FORM_TAIL = 1e-14
UNIT_SCALE_TOL = 1e-12


@dataclass(frozen=True)
class GTransformSamples:
    """Observed (a, b, alpha) triples for one generator family."""

    a: np.ndarray
    b: np.ndarray
    values: np.ndarray
    family: str

    def __post_init__(self):
        a = np.atleast_1d(np.array(self.a, dtype=float))
        b = np.atleast_1d(np.array(self.b, dtype=float))
        values = np.atleast_1d(np.array(self.values, dtype=float))
        if not (a.shape == b.shape == values.shape) or a.ndim != 1:
            raise MisalignedSamples("a, b and alpha columns differ in length", operation="GTransformSamples")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and np.all(np.isfinite(values))):
            raise NonFiniteInput("value surface has non-finite entries", operation="GTransformSamples")
        if np.any(b <= 0):
            raise NonPositiveScale("value surface has b <= 0", operation="GTransformSamples")
        if np.unique(np.stack([a, b], axis=1), axis=0).shape[0] != a.size:
            raise MisalignedSamples("value surface repeats an (a, b) pair", operation="GTransformSamples")
        for name, arr in (("a", a), ("b", b), ("values", values)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return self.a.size

    @property
    def entries(self) -> List[Tuple[float, float, float]]:
        return [(float(a), float(b), float(v)) for a, b, v in zip(self.a, self.b, self.values)]

    def slice_at_b(self, b: float, tol: float = 1e-12) -> Tuple[np.ndarray, np.ndarray]:
        """Samples at fixed scale b, sorted by a."""
        keep = np.abs(self.b - b) <= tol * max(1.0, abs(b))
        order = np.argsort(self.a[keep])
        return self.a[keep][order], self.values[keep][order]

    def slice_at_a(self, a: float, tol: float = 1e-12) -> Tuple[np.ndarray, np.ndarray]:
        """Samples at fixed location a, sorted by b."""
        keep = np.abs(self.a - a) <= tol * max(1.0, abs(a))
        order = np.argsort(self.b[keep])
        return self.b[keep][order], self.values[keep][order]


def g_transform(h: GridFunction, family: LocationScaleFamily, a: float, b: float) -> float:
    """Trapezoid value of the kernel integral over the samples of h."""
    if not b > 0:
        raise NonPositiveScale(f"g-transform scale must be positive, got {b}", operation="g_transform")
    if not (np.all(np.isfinite(h.y)) and np.isfinite(a)):
        raise NonFiniteInput("non-finite g-transform input", operation="g_transform")
    value = float(trapezoid(family.g((h.x - a) / b) * h.y, h.x))
    if not np.isfinite(value):
        raise NonFiniteInput("g-transform is not finite", operation="g_transform")
    return value


def value_surface_locscale(
    cost: CostSpec, family: LocationScaleFamily, params: Iterable[Tuple[float, float]]
) -> GTransformSamples:
    """alpha_h(G_{a,b}, G) at every (a, b) by the quantile formula."""
    rows = [(float(a), float(b)) for a, b in params]
    values = [ot_cost_quantile(cost, family.member(a, b), family.generator) for a, b in rows]
    logger.debug(
        "value surface computed",
        extra={"extra_data": {"family": family.name.value, "cost": cost.name, "points": len(rows)}},
    )
    return GTransformSamples(
        a=[r[0] for r in rows], b=[r[1] for r in rows], values=values, family=family.name.value
    )


def kernel_scale(family: LocationScaleFamily, b: float, operation: str) -> float:
    """|b - 1|, rejecting b < 1 for asymmetric generators."""
    if b < 1 and not family.symmetric:
        raise UnsupportedRegime(
            f"b = {b} < 1 needs a symmetric generator, {family.name.value} is not",
            operation=operation,
        )
    return abs(b - 1.0)


def _standard_grid(family: LocationScaleFamily, n: int) -> np.ndarray:
    generator = family.generator
    lo = float(generator.quantile(DENSITY_FORM_TAIL))
    hi = float(generator.upper_quantile(DENSITY_FORM_TAIL))
    return np.linspace(lo, hi, n)


def density_form_value(
    cost: CostSpec,
    family: LocationScaleFamily,
    a: float,
    b: float,
    grid: Optional[np.ndarray] = None,
) -> float:
    """(1/|b - 1|) I_g[h](a, |b - 1|), the density side of alpha_h(G_{a,b}, G).

    At b = 1 the kernel collapses and the limit h(a) is returned.

    Raises:
        UnsupportedRegime: b < 1 with an asymmetric generator.
    """
    scale = kernel_scale(family, b, "density_form_value")
    if scale <= UNIT_SCALE_TOL:
        return float(cost(np.array(a)))
    x = a + scale * _standard_grid(family, DENSITY_FORM_POINTS) if grid is None else np.asarray(grid, dtype=float)
    h = GridFunction(x, cost(x))
    return g_transform(h, family, a, scale) / scale

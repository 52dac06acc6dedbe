"""
Recovery of a cost (or a cost difference) from OT values over a
location-scale family.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Sequence

import numpy as np

from ..core.grid import GridFunction
from ..exceptions import MethodFamilyMismatch, MissingSamples
from ..measures.families import LocationScaleFamily
from ..transforms.deconvolution import SpectralRegularization, deconvolve_location
from ..transforms.gtransform import GTransformSamples, kernel_scale
from ..transforms.laplace import DEFAULT_ORDER, POST_FAMILIES, SampledLaplace, post_laplace_invert
from ..utils.logging import get_logger

logger = get_logger(__name__)

UNIT_SCALE_TOL = 1e-12
DEFAULT_POST_POINTS = (0.5, 1.0, 1.5, 2.0)


class RecoveryMethod(str, Enum):
    FOURIER = "fourier"
    POST = "post"


@dataclass(frozen=True)
class ValueRecovery:
    h: GridFunction
    method: RecoveryMethod
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method.value,
            "h": {"x": self.h.x.tolist(), "y": self.h.y.tolist()},
            "diagnostics": dict(self.diagnostics),
        }


def _default_scale(samples: GTransformSamples) -> float:
    scales, counts = np.unique(samples.b, return_counts=True)
    return float(scales[np.argmax(counts)])


def _recover_fourier(samples, family, reg, b, poly_degree) -> ValueRecovery:
    if not family.symmetric:
        raise MethodFamilyMismatch(
            f"fourier recovery needs a symmetric generator, {family.name.value} is not",
            operation="recover_from_values_locscale",
        )
    b = _default_scale(samples) if b is None else float(b)
    a, alpha = samples.slice_at_b(b)
    if a.size == 0:
        raise MissingSamples(f"no samples at b = {b}", operation="recover_from_values_locscale")
    scale = kernel_scale(family, b, "recover_from_values_locscale")
    if scale <= UNIT_SCALE_TOL:
        # alpha(a, 1) = h(a)
        return ValueRecovery(GridFunction(a, alpha), RecoveryMethod.FOURIER, {"b": b, "kernel_scale": 0.0})

    result = deconvolve_location(GridFunction(a, scale * alpha), family, scale, reg, poly_degree=poly_degree)
    diagnostics = {"b": b, "kernel_scale": scale, "reg_eps": reg.eps, **result.diagnostics()}
    return ValueRecovery(result.h, RecoveryMethod.FOURIER, diagnostics)


def _recover_post(samples, family, x_points, order) -> ValueRecovery:
    if family.name not in POST_FAMILIES:
        raise MethodFamilyMismatch(
            f"post recovery needs a laplace or exponential-scale generator, got {family.name.value}",
            operation="recover_from_values_locscale",
        )
    b, alpha = samples.slice_at_a(0.0)
    above = b > 1.0
    if not np.any(above):
        raise MissingSamples(
            "post recovery needs samples at a = 0 with b > 1", operation="recover_from_values_locscale"
        )
    b, alpha = b[above], alpha[above]
    # L(s) = (b - 1) alpha(0, b) at s = 1 / (b - 1)
    transform = SampledLaplace(1.0 / (b - 1.0), (b - 1.0) * alpha)
    x = np.asarray(DEFAULT_POST_POINTS if x_points is None else x_points, dtype=float)
    h = np.array([post_laplace_invert(transform, float(xi), order=order, method="difference") for xi in x])
    return ValueRecovery(GridFunction(x, h), RecoveryMethod.POST, {"order": order, "rates": int(b.size)})


def recover_from_values_locscale(
    samples: GTransformSamples,
    family: LocationScaleFamily,
    method=RecoveryMethod.FOURIER,
    reg: SpectralRegularization = SpectralRegularization(),
    b: Optional[float] = None,
    poly_degree: Optional[int] = None,
    x_points: Optional[Sequence[float]] = None,
    order: int = DEFAULT_ORDER,
) -> ValueRecovery:
    """h on the sampling grid from observed values alpha(a, b).

    ``fourier`` deconvolves the slice at fixed b (default: the best-sampled
    scale) with kernel scale |b - 1|. ``post`` inverts the Laplace transform
    L(s) = (b - 1) alpha(0, b), s = 1/(b - 1), at ``x_points``; it assumes a
    symmetric h. Applied to a difference surface alpha_1 - alpha_2 both
    recover h_1 - h_2.

    Raises:
        MethodFamilyMismatch: the generator does not fit the method.
    """
    method = RecoveryMethod(method)
    if samples.family != family.name.value:
        raise MethodFamilyMismatch(
            f"samples were taken under {samples.family}, not {family.name.value}",
            operation="recover_from_values_locscale",
        )
    if method == RecoveryMethod.FOURIER:
        recovery = _recover_fourier(samples, family, reg, b, poly_degree)
    else:
        recovery = _recover_post(samples, family, x_points, order)
    logger.info(
        "cost recovered from values",
        extra={"extra_data": {"method": method.value, "family": family.name.value, "points": len(recovery.h)}},
    )
    return recovery

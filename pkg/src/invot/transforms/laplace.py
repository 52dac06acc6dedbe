"""
Post's inversion of the Laplace transform.

h(x) ~ ((-1)^n / n!) s^{n+1} L^{(n)}(s) at s = n / x. The n-th derivative
comes from a Cauchy contour integral when L accepts complex arguments, and
from Richardson-paired central differences otherwise.
"""

from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np
from scipy.special import comb, gammaln

from ..exceptions import (
    ConfigValidationError,
    MethodFamilyMismatch,
    MissingSamples,
    NonPositiveScale,
    UnstableDerivative,
)
from ..measures.families import FamilyName
from ..utils.logging import get_logger

logger = get_logger(__name__)

DEFAULT_ORDER = 10
CONTOUR_POINTS = 64
CONTOUR_RADIUS = 0.5
MAX_RELATIVE_STEP = 0.05
STENCIL_REACH = 0.8
STABILITY_TOL = 0.5
SAMPLE_MATCH_TOL = 1e-9
POST_FAMILIES = {FamilyName.LAPLACE, FamilyName.EXPONENTIAL_SCALE}

LaplaceFunction = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SampledLaplace:
    """L(s) known only at tabulated rates; lookups off the table fail."""

    s: np.ndarray
    values: np.ndarray
    tol: float = SAMPLE_MATCH_TOL

    def __post_init__(self):
        order = np.argsort(np.asarray(self.s, dtype=float))
        object.__setattr__(self, "s", np.asarray(self.s, dtype=float)[order])
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float)[order])

    def __call__(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        idx = np.clip(np.searchsorted(self.s, s), 1, self.s.size - 1)
        left, right = self.s[idx - 1], self.s[idx]
        nearest = np.where(np.abs(s - left) <= np.abs(s - right), idx - 1, idx)
        miss = np.abs(self.s[nearest] - s) > self.tol * np.maximum(1.0, np.abs(s))
        if np.any(miss):
            raise MissingSamples(
                "Laplace samples missing at the requested rates",
                operation="post_laplace_invert",
                rates=s[miss][:10].tolist(),
            )
        return self.values[nearest]


def _accepts_complex(L: LaplaceFunction, s0: float) -> bool:
    if isinstance(L, SampledLaplace):
        return False
    try:
        sample = np.asarray(L(np.array([s0 + 0.25j * s0])))
    except (TypeError, ValueError):
        return False
    return np.iscomplexobj(sample) and bool(np.all(np.isfinite(sample)))


def contour_derivative(L: LaplaceFunction, s0: float, n: int, points: int = CONTOUR_POINTS) -> float:
    """n!/r^n times the mean of L(s0 + r e^{i t}) e^{-i n t} on a circle of radius s0/2."""
    radius = CONTOUR_RADIUS * s0
    theta = 2.0 * np.pi * np.arange(points) / points
    z = s0 + radius * np.exp(1j * theta)
    mean = np.mean(np.asarray(L(z)) * np.exp(-1j * n * theta))
    return float(np.exp(gammaln(n + 1) - n * np.log(radius)) * mean.real)


def difference_step(s0: float, n: int) -> float:
    """Central-difference step keeping the stencil inside (0, inf)."""
    return s0 * min(MAX_RELATIVE_STEP, STENCIL_REACH / n)


def stencil(s0: float, n: int, step: float) -> np.ndarray:
    return s0 + (0.5 * n - np.arange(n + 1)) * step


def _central_difference(L: LaplaceFunction, s0: float, n: int, step: float) -> float:
    weights = np.array([(-1) ** k * comb(n, k, exact=True) for k in range(n + 1)], dtype=float)
    return float(np.dot(weights, np.asarray(L(stencil(s0, n, step)), dtype=float)) / step**n)


def difference_derivative(L: LaplaceFunction, s0: float, n: int, step: Optional[float] = None) -> float:
    """Richardson pair of central differences at steps delta and delta/2."""
    step = difference_step(s0, n) if step is None else step
    coarse = _central_difference(L, s0, n, step)
    fine = _central_difference(L, s0, n, 0.5 * step)
    return (4.0 * fine - coarse) / 3.0


def _post_value(L: LaplaceFunction, x: float, n: int, method: str) -> float:
    s0 = n / x
    if method == "contour":
        derivative = contour_derivative(L, s0, n)
    else:
        derivative = difference_derivative(L, s0, n)
    # (-1)^n s^{n+1} / n! in log space
    factor = np.exp((n + 1) * np.log(s0) - gammaln(n + 1))
    return float((-1) ** n * factor * derivative)


def post_laplace_invert(
    L: LaplaceFunction,
    x: float,
    order: int = DEFAULT_ORDER,
    method: str = "auto",
    check_stability: bool = True,
) -> float:
    """Post approximation of h(x) from its Laplace transform L.

    Raises:
        UnstableDerivative: orders n and n + 2 disagree by more than 50%.
    """
    if not x > 0:
        raise NonPositiveScale(f"Post inversion needs x > 0, got {x}", operation="post_laplace_invert")
    if order < 2:
        raise ConfigValidationError(f"Post order must be >= 2, got {order}", operation="post_laplace_invert")
    if method == "auto":
        method = "contour" if _accepts_complex(L, order / x) else "difference"
    if method not in ("contour", "difference"):
        raise ConfigValidationError(f"unknown derivative method {method!r}", operation="post_laplace_invert")

    value = _post_value(L, x, order, method)
    if check_stability:
        next_value = _post_value(L, x, order + 2, method)
        scale = max(abs(value), abs(next_value))
        if scale > 0 and abs(value - next_value) > STABILITY_TOL * scale:
            raise UnstableDerivative(
                f"orders {order} and {order + 2} give {value:.6g} and {next_value:.6g}",
                operation="post_laplace_invert",
                x=x,
            )
    logger.debug(
        "post inversion",
        extra={"extra_data": {"x": x, "order": order, "method": method, "value": value}},
    )
    return value


def post_rates(x_points, order: int = DEFAULT_ORDER) -> np.ndarray:
    """Every rate the difference path evaluates for orders n and n + 2."""
    rates: List[np.ndarray] = []
    for x in np.atleast_1d(np.asarray(x_points, dtype=float)):
        for n in (order, order + 2):
            s0 = n / x
            step = difference_step(s0, n)
            rates.append(stencil(s0, n, step))
            rates.append(stencil(s0, n, 0.5 * step))
    return np.unique(np.concatenate(rates))


def post_sampling_plan(x_points, order: int = DEFAULT_ORDER, family=FamilyName.EXPONENTIAL_SCALE) -> np.ndarray:
    """Scales b (at a = 0) whose OT values feed the sampled Post path.

    With L(s) = (b - 1) alpha(0, b) at b = 1 + 1/s.
    """
    family = FamilyName(family)
    if family not in POST_FAMILIES:
        raise MethodFamilyMismatch(
            f"Post inversion needs a laplace or exponential-scale family, got {family.value}",
            operation="post_sampling_plan",
        )
    return np.unique(1.0 + 1.0 / post_rates(x_points, order))

"""
Exception hierarchy for invot.

Input problems (exit code 1 from the CLI) derive from InputError, numerical
failures (exit code 2) from NumericalError.
"""

import json
from typing import Any, Dict, Optional


class InvotError(Exception):
    """Base exception for invot."""

    exit_code = 2

    def __init__(self, message: str, operation: Optional[str] = None, **details: Any):
        super().__init__(message)
        self.message = message
        self.operation = operation
        self.details = details

    def to_dict(self) -> Dict[str, Any]:
        """Machine-readable error record."""
        record: Dict[str, Any] = {
            "error": type(self).__name__,
            "message": self.message,
            "operation": self.operation,
        }
        if self.details:
            record["details"] = self.details
        return record

    def to_json_line(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, default=str)


class InputError(InvotError):
    """Invalid input, configuration or precondition."""

    exit_code = 1


class NumericalError(InvotError):
    """A numerical stage failed to produce a trustworthy result."""

    exit_code = 2


# --- input errors -----------------------------------------------------------


class ParseError(InputError):
    """Exception raised when a config or data file cannot be parsed."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None, **kw):
        super().__init__(message, line=line, column=column, **kw)
        self.line = line
        self.column = column


class ConfigValidationError(InputError):
    """Exception raised for out-of-range configuration knobs."""

    pass


class NonFiniteInput(InputError):
    """NaN or infinite values in numeric input."""

    pass


class AllZeroDensity(InputError):
    """Density integrates to (numerically) zero."""

    pass


class NonPositiveScale(InputError):
    """Scale parameter b <= 0."""

    pass


class NonUnitDirection(InputError):
    """Direction vector for an affine pushforward is not of unit length."""

    pass


class NotSPD(InputError):
    """Covariance matrix is not symmetric positive definite."""

    pass


class GridMismatch(InputError):
    """Two measures could not be resampled onto a shared grid."""

    pass


class Infeasible(InputError):
    """Transport problem with unequal total masses."""

    pass


class SizeExceeded(InputError):
    """LP instance above the desk-scale cap."""

    pass


class MisalignedSamples(InputError):
    """Map and potential-derivative samples live on different abscissae."""

    pass


class MethodFamilyMismatch(InputError):
    """Inversion method does not fit the generator family."""

    pass


class NegativeDensity(InputError):
    """A perturbed density became negative."""

    pass


class UnsupportedRegime(InputError):
    """Parameter regime not supported for the given generator."""

    pass


class MissingSamples(InputError):
    """Sampled data lacks points a method needs."""

    pass


class PerturbationMassError(InputError):
    """Density perturbation does not integrate to zero."""

    pass


class InvalidCost(InputError):
    """Cost definition violates its class invariants."""

    pass


# --- numerical errors -------------------------------------------------------


class DivergentIntegral(NumericalError):
    """Endpoint refinement of a quantile integral did not converge."""

    pass


class KernelSpectrumDegenerate(NumericalError):
    """Too much of the kernel spectrum falls below the clamp."""

    pass


class UnstableDerivative(NumericalError):
    """Post inversion orders n and n+2 disagree."""

    pass


class DegenerateGraph(NumericalError):
    """Conjugate graph has fewer than two distinct points."""

    pass


class NonMonotoneGraph(NumericalError):
    """Conjugate graph violates monotonicity beyond tolerance."""

    pass


class AnchorInfeasible(NumericalError):
    """Additive constant could not be matched to the value anchor."""

    pass


class SignInconsistent(NumericalError):
    """Concave graph point with z * sign(y) < 0."""

    pass


class SolverStalled(NumericalError):
    """Transportation simplex hit its iteration limit."""

    pass

"""
Spectral inversion of the location g-transform.

On a uniform grid x_k = x_0 + k dx the samples v_k = I_g[h](x_k, s) are the
discrete convolution of h with the kernel c_m = g(-m dx / s) dx. The
inversion divides Fourier coefficients by the kernel spectrum, zeroing
every coefficient where the kernel falls below eps times its maximum.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy import fft
from scipy.signal.windows import tukey
from scipy.special import comb

from ..core.grid import GridFunction
from ..exceptions import ConfigValidationError, KernelSpectrumDegenerate, MisalignedSamples
from ..measures.families import LocationScaleFamily
from ..utils.logging import get_logger

logger = get_logger(__name__)

MAX_CLAMPED_FRACTION = 0.9
SPACING_TOL = 1e-9
TAPER_FRACTION = 0.1
MAX_POLY_DEGREE = 4
HELD_OUT_FRACTION = 0.5


class Window(str, Enum):
    NONE = "none"
    COSINE_TAPER = "cosine-taper"


@dataclass(frozen=True)
class SpectralRegularization:
    """Cutoff, padding and data window of the spectral division."""

    eps: float = 1e-3
    padding: int = 4
    window: Window = Window.COSINE_TAPER

    def __post_init__(self):
        if not 0 < self.eps < 1:
            raise ConfigValidationError(
                f"reg eps must lie in (0, 1), got {self.eps}", operation="SpectralRegularization"
            )
        if self.padding < 2:
            raise ConfigValidationError(f"padding must be >= 2, got {self.padding}", operation="SpectralRegularization")
        object.__setattr__(self, "window", Window(self.window))


@dataclass(frozen=True)
class DeconvolutionResult:
    h: GridFunction
    min_kernel_modulus: float
    clamped_fraction: float
    retained: np.ndarray
    n_pad: int
    polynomial: Optional[np.ndarray] = None

    def diagnostics(self) -> dict:
        out = {
            "min_kernel_modulus": self.min_kernel_modulus,
            "clamped_fraction": self.clamped_fraction,
            "n_pad": self.n_pad,
        }
        if self.polynomial is not None:
            out["polynomial_coefficients"] = self.polynomial.tolist()
        return out


def uniform_spacing(x: np.ndarray, operation: str) -> float:
    x = np.asarray(x, dtype=float)
    if x.size < 4:
        raise MisalignedSamples("need at least 4 equally spaced samples", operation=operation)
    steps = np.diff(x)
    dx = float(np.mean(steps))
    if dx <= 0 or np.max(np.abs(steps - dx)) > SPACING_TOL * max(1.0, abs(dx)):
        raise MisalignedSamples("samples are not equally spaced", operation=operation)
    return dx


def kernel_spectrum(family: LocationScaleFamily, scale: float, dx: float, n_pad: int) -> np.ndarray:
    """FFT of c_m = g(-m dx / scale) dx in wrap-around layout."""
    m = np.fft.fftfreq(n_pad, d=1.0 / n_pad)
    return fft.fft(family.g(-m * dx / scale) * dx)


def forward_location(
    h: GridFunction, family: LocationScaleFamily, scale: float, reg: SpectralRegularization = SpectralRegularization()
) -> GridFunction:
    """Discrete location transform v_k = sum_j g((x_j - x_k)/scale) h_j dx."""
    dx = uniform_spacing(h.x, "forward_location")
    n = h.x.size
    n_pad = reg.padding * n
    spectrum = kernel_spectrum(family, scale, dx, n_pad)
    v = fft.ifft(fft.fft(h.y, n=n_pad) * spectrum)[:n].real
    return GridFunction(h.x, v)


def _spectral_divide(x, v, family, scale, reg, operation):
    dx = uniform_spacing(x, operation)
    n = x.size
    n_pad = reg.padding * n
    spectrum = kernel_spectrum(family, scale, dx, n_pad)
    modulus = np.abs(spectrum)
    retained = modulus >= reg.eps * modulus.max()
    clamped = 1.0 - float(np.mean(retained))
    if clamped > MAX_CLAMPED_FRACTION:
        raise KernelSpectrumDegenerate(
            f"{clamped:.1%} of the kernel spectrum is below the cutoff; sample more coarsely or raise eps",
            operation=operation,
            clamped_fraction=clamped,
            spacing=dx,
        )
    data = v * tukey(n, TAPER_FRACTION) if reg.window == Window.COSINE_TAPER else v
    coeffs = fft.fft(data, n=n_pad)
    quotient = np.zeros_like(coeffs)
    quotient[retained] = coeffs[retained] / spectrum[retained]
    h = fft.ifft(quotient)[:n].real
    min_modulus = float(modulus[retained].min() / modulus.max())
    return h, retained, clamped, min_modulus, n_pad


def kernel_moments(family: LocationScaleFamily, scale: float, degree: int) -> np.ndarray:
    """m_r = scale^{r+1} E[G^r] for r = 0..degree."""
    return np.array([scale ** (r + 1) * (1.0 if r == 0 else family.moment(r)) for r in range(degree + 1)])


def polynomial_preimage(data_coeffs: np.ndarray, moments: np.ndarray) -> np.ndarray:
    """Coefficients c of h from e_i = sum_{j >= i} c_j C(j, i) m_{j-i}, by back substitution."""
    degree = data_coeffs.size - 1
    c = np.zeros(degree + 1)
    for i in range(degree, -1, -1):
        tail = sum(c[j] * comb(j, i, exact=True) * moments[j - i] for j in range(i + 1, degree + 1))
        c[i] = (data_coeffs[i] - tail) / moments[0]
    return c


def deconvolve_location(
    values: GridFunction,
    family: LocationScaleFamily,
    scale: float,
    reg: SpectralRegularization = SpectralRegularization(),
    poly_degree: Optional[int] = None,
) -> DeconvolutionResult:
    """Recover h on the sampling grid from v(a) = I_g[h](a, scale).

    With ``poly_degree`` a polynomial of that degree is fitted to the data on
    the central half of the window, inverted exactly through the kernel
    moments, and only the residual goes through the spectral division.

    Raises:
        KernelSpectrumDegenerate: more than 90% of the spectrum is clamped.
        MisalignedSamples: the a-grid is not uniform.
    """
    x = values.x
    v = values.y
    poly = None
    if poly_degree is not None:
        if not 0 <= poly_degree <= MAX_POLY_DEGREE:
            raise ConfigValidationError(
                f"polynomial degree must be in [0, {MAX_POLY_DEGREE}]", operation="deconvolve_location"
            )
        lo, hi = np.quantile(x, [0.5 - HELD_OUT_FRACTION / 2, 0.5 + HELD_OUT_FRACTION / 2])
        central = (x >= lo) & (x <= hi)
        data_coeffs = np.polynomial.polynomial.polyfit(x[central], v[central], poly_degree)
        poly = polynomial_preimage(data_coeffs, kernel_moments(family, scale, poly_degree))
        v = v - np.polynomial.polynomial.polyval(x, data_coeffs)

    h, retained, clamped, min_modulus, n_pad = _spectral_divide(x, v, family, scale, reg, "deconvolve_location")
    if poly is not None:
        h = h + np.polynomial.polynomial.polyval(x, poly)

    logger.debug(
        "deconvolution",
        extra={
            "extra_data": {
                "n": int(x.size),
                "n_pad": n_pad,
                "eps": reg.eps,
                "clamped_fraction": clamped,
                "min_kernel_modulus": min_modulus,
            }
        },
    )
    return DeconvolutionResult(
        h=GridFunction(x, h),
        min_kernel_modulus=min_modulus,
        clamped_fraction=clamped,
        retained=retained,
        n_pad=n_pad,
        polynomial=poly,
    )

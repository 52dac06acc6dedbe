"""
Closed-form quadratic transport between Gaussian measures.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import stats
from scipy.stats import qmc

from ..measures.gaussian import GaussianMeasure
from ..utils.logging import get_logger

logger = get_logger(__name__)

EIGEN_CLAMP = 1e-14
DEFAULT_MC_SAMPLES = 2**20


def sqrtm_psd(matrix: np.ndarray) -> np.ndarray:
    """Symmetric square root through eigh, eigenvalues clamped at 1e-14."""
    w, v = np.linalg.eigh(matrix)
    return (v * np.sqrt(np.maximum(w, EIGEN_CLAMP))) @ v.T


def inv_sqrtm_psd(matrix: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(matrix)
    return (v / np.sqrt(np.maximum(w, EIGEN_CLAMP))) @ v.T


@dataclass(frozen=True)
class GaussianTransport:
    """Optimal affine map T(x) = D x - D a + b for the cost |x - y|^2."""

    source: GaussianMeasure
    target: GaussianMeasure
    D: np.ndarray
    cost: float

    @property
    def shift(self) -> np.ndarray:
        return self.target.mean - self.D @ self.source.mean

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return x @ self.D.T + self.shift

    def gradient(self, x) -> np.ndarray:
        """grad f(x) = 2([I - D] x + D a - b)."""
        x = np.asarray(x, dtype=float)
        return 2.0 * (x - self.apply(x))

    def pushforward(self) -> GaussianMeasure:
        cov = self.D @ self.source.covariance @ self.D.T
        return GaussianMeasure(self.D @ self.source.mean + self.shift, 0.5 * (cov + cov.T))

    def identified_gradient_range(self, tol: float = 1e-10) -> Tuple[np.ndarray, np.ndarray]:
        """Offset 2(Da - b) and an orthonormal basis (columns) of range(I - D)."""
        offset = 2.0 * (self.D @ self.source.mean - self.target.mean)
        u, s, _ = np.linalg.svd(np.eye(self.D.shape[0]) - self.D)
        rank = int(np.sum(s > tol * max(1.0, s.max(initial=0.0))))
        return offset, u[:, :rank]

    def monte_carlo_cost(self, n_samples: int = DEFAULT_MC_SAMPLES, seed: int = 0) -> float:
        """Scrambled Sobol estimate of E|x - T(x)|^2, x ~ source."""
        d = self.source.dim
        m = max(int(np.ceil(np.log2(max(n_samples, 2)))), 1)
        u = qmc.Sobol(d, scramble=True, seed=seed).random_base2(m)
        x = self.source.mean + stats.norm.ppf(u) @ sqrtm_psd(self.source.covariance).T
        return float(np.mean(np.sum((x - self.apply(x)) ** 2, axis=1)))


def gaussian_ot(mu: GaussianMeasure, nu: GaussianMeasure) -> GaussianTransport:
    """Quadratic-cost transport between N(a, A) and N(b, B).

    D = A^{-1/2} (A^{1/2} B A^{1/2})^{1/2} A^{-1/2} and the cost is
    |a - b|^2 + tr(A + B - 2 (A^{1/2} B A^{1/2})^{1/2}).
    """
    a_half = sqrtm_psd(mu.covariance)
    a_inv_half = inv_sqrtm_psd(mu.covariance)
    middle = sqrtm_psd(a_half @ nu.covariance @ a_half)
    D = a_inv_half @ middle @ a_inv_half
    D = 0.5 * (D + D.T)
    cost = float(
        np.sum((mu.mean - nu.mean) ** 2)
        + np.trace(mu.covariance + nu.covariance - 2.0 * middle)
    )
    logger.debug("gaussian transport", extra={"extra_data": {"dim": mu.dim, "cost": cost}})
    return GaussianTransport(mu, nu, D, max(cost, 0.0))

"""
Multivariate Gaussian measures.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..exceptions import NonFiniteInput, NonUnitDirection, NotSPD

SYMMETRY_TOL = 1e-12
EIGEN_FLOOR = 1e-12


@dataclass(frozen=True)
class GaussianMeasure:
    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        mean = np.atleast_1d(np.array(self.mean, dtype=float))
        cov = np.atleast_2d(np.array(self.covariance, dtype=float))
        if cov.shape != (mean.size, mean.size):
            raise NotSPD("covariance shape does not match the mean", operation="GaussianMeasure")
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise NonFiniteInput("non-finite Gaussian parameters", operation="GaussianMeasure")
        if np.max(np.abs(cov - cov.T)) > SYMMETRY_TOL * max(1.0, np.max(np.abs(cov))):
            raise NotSPD("covariance is not symmetric", operation="GaussianMeasure")
        smallest = float(np.linalg.eigvalsh(cov)[0])
        if smallest <= EIGEN_FLOOR:
            raise NotSPD(
                f"covariance has eigenvalue {smallest:.3e}", operation="GaussianMeasure"
            )
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)

    @property
    def dim(self) -> int:
        return self.mean.size


def gaussian_rank_one_pushforward(a: float, b: float, u, r) -> Tuple[np.ndarray, np.ndarray]:
    """Mean and (rank-one) covariance of x -> x u + r applied to N(a, b^2)."""
    u = np.asarray(u, dtype=float).ravel()
    r = np.asarray(r, dtype=float).ravel()
    if abs(np.linalg.norm(u) - 1.0) > 1e-9:
        raise NonUnitDirection("direction must be a unit vector", operation="gaussian_rank_one_pushforward")
    return a * u + r, b * b * np.outer(u, u)

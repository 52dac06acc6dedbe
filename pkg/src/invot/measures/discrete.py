"""
Finite atomic measures used by the LP oracle.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..exceptions import NonFiniteInput, NonUnitDirection
from ..utils.logging import get_logger
from .measure1d import Measure1D

logger = get_logger(__name__)


@dataclass(frozen=True)
class DiscreteMeasure:
    """Atoms (n, d) with positive weights summing to ``total_mass``."""

    atoms: np.ndarray
    weights: np.ndarray
    total_mass: float = 1.0

    def __post_init__(self):
        atoms = np.array(self.atoms, dtype=float)
        if atoms.ndim == 1:
            atoms = atoms[:, None]
        weights = np.array(self.weights, dtype=float)
        if atoms.ndim != 2 or weights.shape != (atoms.shape[0],):
            raise NonFiniteInput("atoms and weights do not line up", operation="DiscreteMeasure")
        if not (np.all(np.isfinite(atoms)) and np.all(np.isfinite(weights))):
            raise NonFiniteInput("non-finite atoms or weights", operation="DiscreteMeasure")
        if np.any(weights <= 0):
            raise NonFiniteInput("weights must be positive", operation="DiscreteMeasure")
        if abs(weights.sum() - self.total_mass) > 1e-12 * max(1.0, atoms.shape[0]):
            raise NonFiniteInput(
                f"weights sum to {weights.sum():.17g}, expected {self.total_mass:.17g}",
                operation="DiscreteMeasure",
            )
        if atoms.shape[0] > 1 and np.unique(atoms, axis=0).shape[0] < atoms.shape[0]:
            logger.warning("discrete measure has repeated atoms")
        atoms.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @property
    def size(self) -> int:
        return self.atoms.shape[0]

    @property
    def dim(self) -> int:
        return self.atoms.shape[1]

    @property
    def locations(self) -> np.ndarray:
        """Atom positions as a flat array (1-D measures only)."""
        if self.dim != 1:
            raise ValueError("locations is only defined for 1-D measures")
        return self.atoms[:, 0]


def discretize(mu: Measure1D, n: int, total_mass: float = 1.0) -> DiscreteMeasure:
    """Equal-mass atoms at quantile levels (i - 1/2)/n."""
    if n < 1:
        raise ValueError("n must be at least 1")
    levels = (np.arange(1, n + 1) - 0.5) / n
    atoms = mu.quantile(levels)
    return DiscreteMeasure(atoms, np.full(n, total_mass / n), total_mass)


def affine_pushforward(
    mu: Measure1D, u, r, n: int, base: Optional[DiscreteMeasure] = None
) -> DiscreteMeasure:
    """Atoms x_i u + r of the 1-D discretization, weights unchanged.

    Raises:
        NonUnitDirection: | ||u|| - 1 | > 1e-9.
    """
    u = np.asarray(u, dtype=float).ravel()
    r = np.asarray(r, dtype=float).ravel()
    if u.shape != r.shape:
        raise NonUnitDirection("direction and offset dimensions differ", operation="affine_pushforward")
    norm = float(np.linalg.norm(u))
    if abs(norm - 1.0) > 1e-9:
        raise NonUnitDirection(f"direction has norm {norm:.17g}", operation="affine_pushforward")
    base = base if base is not None else discretize(mu, n)
    atoms = base.locations[:, None] * u[None, :] + r[None, :]
    return DiscreteMeasure(atoms, base.weights, base.total_mass)

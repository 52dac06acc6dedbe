"""
Jordan decomposition of mu - nu on a shared grid.
"""

from typing import NamedTuple

import numpy as np

from ..exceptions import GridMismatch
from ..utils.logging import get_logger
from .measure1d import Measure1D

logger = get_logger(__name__)

MAX_SHARED_POINTS = 20001
CANCELLATION_TOL = 1e-9


class JordanDecomposition(NamedTuple):
    """Cell-average densities of [mu - nu]_+ and [nu - mu]_+ at cell midpoints ``grid``."""

    plus: np.ndarray
    minus: np.ndarray
    common_mass: float
    grid: np.ndarray

    @property
    def leftover_mass(self) -> float:
        return 1.0 - self.common_mass


def shared_grid(mu: Measure1D, nu: Measure1D) -> np.ndarray:
    """Uniform grid over the hull of both grids at the finer of the two spacings."""
    lo = min(mu.grid[0], nu.grid[0])
    hi = max(mu.grid[-1], nu.grid[-1])
    step = min(np.min(np.diff(mu.grid)), np.min(np.diff(nu.grid)))
    if not (np.isfinite(lo) and np.isfinite(hi) and step > 0):
        raise GridMismatch("cannot build a shared grid", operation="jordan_decompose")
    n = int(np.ceil((hi - lo) / step)) + 1
    n = min(max(n, 2), MAX_SHARED_POINTS)
    return np.linspace(lo, hi, n)


def jordan_decompose(mu: Measure1D, nu: Measure1D) -> JordanDecomposition:
    """Split mu - nu into mutually singular non-negative parts.

    Both measures are binned into exact cell masses (CDF differences) on a
    shared grid; the parts are cell averages at the cell midpoints. They are
    rescaled to the average of their masses so that they balance exactly.
    """
    edges = shared_grid(mu, nu)
    width = np.diff(edges)
    grid = 0.5 * (edges[:-1] + edges[1:])
    dmu = np.diff(mu.cdf_at(edges)) / width
    dnu = np.diff(nu.cdf_at(edges)) / width
    if not (np.all(np.isfinite(dmu)) and np.all(np.isfinite(dnu))):
        raise GridMismatch("binned densities are not finite", operation="jordan_decompose")

    diff = dmu - dnu
    diff[np.abs(diff) <= CANCELLATION_TOL * max(dmu.max(), dnu.max())] = 0.0
    plus = np.maximum(diff, 0.0)
    minus = np.maximum(-diff, 0.0)
    plus_mass = float(np.dot(plus, width))
    minus_mass = float(np.dot(minus, width))
    target = 0.5 * (plus_mass + minus_mass)
    if plus_mass > 0 and minus_mass > 0:
        plus *= target / plus_mass
        minus *= target / minus_mass
    else:
        plus[:] = 0.0
        minus[:] = 0.0
        target = 0.0

    logger.debug(
        "jordan decomposition",
        extra={"extra_data": {"grid_n": grid.size, "plus_mass": plus_mass, "minus_mass": minus_mass}},
    )
    return JordanDecomposition(plus, minus, min(1.0, max(0.0, 1.0 - target)), grid)


def support_separation(grid: np.ndarray, plus: np.ndarray, minus: np.ndarray) -> float:
    """Distance between the supports of two non-negative grid densities."""
    a = grid[plus > 0]
    b = grid[minus > 0]
    if a.size == 0 or b.size == 0:
        return float("inf")
    idx = np.searchsorted(b, a)
    left = b[np.clip(idx - 1, 0, b.size - 1)]
    right = b[np.clip(idx, 0, b.size - 1)]
    return float(np.min(np.minimum(np.abs(a - left), np.abs(a - right))))

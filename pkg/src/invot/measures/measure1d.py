"""
One-dimensional absolutely continuous probability measures.

A Measure1D always carries density / CDF / quantile grids. Measures built
from a closed-form law additionally keep the standardized scipy distribution
plus (loc, scale), and answer cdf / quantile queries exactly from it.
"""

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy import stats
from scipy.integrate import cumulative_trapezoid, trapezoid

from ..exceptions import AllZeroDensity, NonFiniteInput, NegativeDensity, NonPositiveScale
from ..utils.logging import get_logger

logger = get_logger(__name__)

DEFAULT_GRID_N = 1001
DEFAULT_TAIL_MASS = 1e-8


def _frozen(values) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


def quantile_levels(m: int) -> np.ndarray:
    """Uniformly spaced u-levels (k - 1/2)/m in (0, 1)."""
    return (np.arange(1, m + 1) - 0.5) / m


@dataclass(frozen=True)
class Measure1D:
    """Probability measure on an interval, carried as grids.

    ``law`` is a standardized scipy distribution (e.g. ``scipy.stats.norm``);
    when present the measure is ``loc + scale * law``.
    """

    grid: np.ndarray
    density: np.ndarray
    cdf: np.ndarray
    quantile_levels: np.ndarray
    quantile_table: np.ndarray
    law: Optional[stats.rv_continuous] = field(default=None, compare=False)
    loc: float = 0.0
    scale: float = 1.0
    name: str = "grid"

    def __post_init__(self):
        for attr in ("grid", "density", "cdf", "quantile_levels", "quantile_table"):
            object.__setattr__(self, attr, _frozen(getattr(self, attr)))
        if self.grid.ndim != 1 or self.grid.size < 2:
            raise NonFiniteInput("measure grid needs at least 2 points", operation="Measure1D")
        if self.density.shape != self.grid.shape or self.cdf.shape != self.grid.shape:
            raise NonFiniteInput("grid, density and cdf lengths differ", operation="Measure1D")
        if np.any(np.diff(self.grid) <= 0):
            raise NonFiniteInput("measure grid must be strictly ascending", operation="Measure1D")

    # -- evaluation ---------------------------------------------------------

    def pdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.law is not None:
            return self.law.pdf((x - self.loc) / self.scale) / self.scale
        return np.interp(x, self.grid, self.density, left=0.0, right=0.0)

    def cdf_at(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.law is not None:
            return self.law.cdf((x - self.loc) / self.scale)
        return _piecewise_quadratic_cdf(self.grid, self.density, self.cdf, x)

    def sf_at(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.law is not None:
            return self.law.sf((x - self.loc) / self.scale)
        return 1.0 - self.cdf_at(x)

    def quantile(self, u) -> np.ndarray:
        """Left-continuous inverse of the CDF."""
        u = np.asarray(u, dtype=float)
        if self.law is not None:
            return self.loc + self.scale * self.law.ppf(u)
        return _invert_piecewise_quadratic_cdf(self.grid, self.density, self.cdf, u)

    def upper_quantile(self, s) -> np.ndarray:
        """Quantile at level 1 - s, accurate for small s."""
        s = np.asarray(s, dtype=float)
        if self.law is not None:
            return self.loc + self.scale * self.law.isf(s)
        return self.quantile(1.0 - s)

    def mean(self) -> float:
        return float(trapezoid(self.grid * self.density, self.grid))

    # -- transformations ----------------------------------------------------

    def affine(self, a: float, b: float) -> "Measure1D":
        """Law of a + b X for X ~ self."""
        if not b > 0:
            raise NonPositiveScale(f"scale must be positive, got {b}", operation="affine")
        return replace(
            self,
            grid=a + b * self.grid,
            density=self.density / b,
            quantile_table=a + b * self.quantile_table,
            loc=a + b * self.loc,
            scale=b * self.scale,
        )

    def gridded(self) -> "Measure1D":
        """Same measure with the closed-form law dropped."""
        return replace(self, law=None, loc=0.0, scale=1.0, name=f"{self.name}:grid")


# -- construction -------------------------------------------------------------


def cdf_and_quantile_from_density(
    grid, density, m: Optional[int] = None, name: str = "grid"
) -> Measure1D:
    """Normalize a tabulated density and build its CDF and quantile table.

    Between grid points the density is linear, so the CDF is piecewise
    quadratic and is inverted in closed form within each cell.

    Raises:
        NonFiniteInput: NaN or Inf in the grid or density.
        NegativeDensity: a negative density value.
        AllZeroDensity: total mass below 1e-14.
    """
    grid = np.asarray(grid, dtype=float)
    density = np.asarray(density, dtype=float)
    if grid.shape != density.shape or grid.ndim != 1 or grid.size < 2:
        raise NonFiniteInput(
            "grid and density must be 1-D of equal length >= 2",
            operation="cdf_and_quantile_from_density",
        )
    if not (np.all(np.isfinite(grid)) and np.all(np.isfinite(density))):
        raise NonFiniteInput("non-finite grid or density", operation="cdf_and_quantile_from_density")
    if np.any(density < 0):
        raise NegativeDensity(
            "density has negative values",
            operation="cdf_and_quantile_from_density",
            indices=np.flatnonzero(density < 0)[:10].tolist(),
        )
    mass = float(trapezoid(density, grid))
    if mass < 1e-14:
        raise AllZeroDensity(
            f"density integrates to {mass:.3e}", operation="cdf_and_quantile_from_density"
        )

    density = density / mass
    cdf = cumulative_trapezoid(density, grid, initial=0.0)
    cdf = np.clip(cdf / cdf[-1], 0.0, 1.0)
    m = grid.size if m is None else m
    levels = quantile_levels(m)
    table = _invert_piecewise_quadratic_cdf(grid, density, cdf, levels)
    return Measure1D(grid, density, cdf, levels, table, name=name)


def from_law(
    law: stats.rv_continuous,
    loc: float = 0.0,
    scale: float = 1.0,
    n: int = DEFAULT_GRID_N,
    tail_mass: float = DEFAULT_TAIL_MASS,
    name: Optional[str] = None,
) -> Measure1D:
    """Tabulate ``loc + scale * law``, truncating unbounded tails at ``tail_mass``."""
    if not scale > 0:
        raise NonPositiveScale(f"scale must be positive, got {scale}", operation="from_law")
    lo, hi = law.support()
    lo = lo if np.isfinite(lo) else law.ppf(0.5 * tail_mass)
    hi = hi if np.isfinite(hi) else law.isf(0.5 * tail_mass)
    z = np.linspace(lo, hi, n)
    density = law.pdf(z)
    density = density / trapezoid(density, z)
    cdf = cumulative_trapezoid(density, z, initial=0.0)
    cdf = np.clip(cdf / cdf[-1], 0.0, 1.0)
    levels = quantile_levels(n)
    return Measure1D(
        grid=loc + scale * z,
        density=density / scale,
        cdf=cdf,
        quantile_levels=levels,
        quantile_table=loc + scale * law.ppf(levels),
        law=law,
        loc=loc,
        scale=scale,
        name=name or law.name,
    )


def uniform(lo: float, hi: float, n: int = DEFAULT_GRID_N) -> Measure1D:
    """Uniform distribution on [lo, hi]."""
    return from_law(stats.uniform, loc=lo, scale=hi - lo, n=n, name="uniform")


def normal(mean: float = 0.0, sd: float = 1.0, n: int = DEFAULT_GRID_N) -> Measure1D:
    return from_law(stats.norm, loc=mean, scale=sd, n=n, name="normal")


# -- piecewise-quadratic CDF helpers -------------------------------------------


def _piecewise_quadratic_cdf(grid, density, cdf, x):
    idx = np.clip(np.searchsorted(grid, x, side="right") - 1, 0, grid.size - 2)
    width = grid[idx + 1] - grid[idx]
    s = np.clip(x - grid[idx], 0.0, width)
    d0, d1 = density[idx], density[idx + 1]
    value = cdf[idx] + d0 * s + 0.5 * (d1 - d0) * s * s / width
    value = np.where(x <= grid[0], 0.0, value)
    value = np.where(x >= grid[-1], 1.0, value)
    return np.clip(value, 0.0, 1.0)


def _invert_piecewise_quadratic_cdf(grid, density, cdf, u):
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    # first grid index with cdf >= u; the cell to its left holds the quantile
    j = np.clip(np.searchsorted(cdf, u, side="left"), 1, grid.size - 1)
    i = j - 1
    width = grid[j] - grid[i]
    d0, d1 = density[i], density[j]
    delta = np.maximum(u - cdf[i], 0.0)
    slope = 0.5 * (d1 - d0) / width
    disc = np.maximum(d0 * d0 + 4.0 * slope * delta, 0.0)
    denom = d0 + np.sqrt(disc)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(denom > 0, 2.0 * delta / denom, 0.0)
    s = np.clip(s, 0.0, width)
    return np.where(u <= 0.0, grid[0], grid[i] + s)

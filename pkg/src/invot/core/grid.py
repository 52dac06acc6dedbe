"""
Sampled real functions.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..exceptions import NonFiniteInput


@dataclass(frozen=True)
class GridFunction:
    """Samples (x_i, y_i) with ascending x.

    Evaluation interpolates linearly inside [x_0, x_last] and returns NaN
    outside, the out-of-domain marker.
    """

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        y = np.array(self.y, dtype=float)
        if x.ndim != 1 or x.shape != y.shape:
            raise NonFiniteInput("grid function arrays must be 1-D of equal length", operation="GridFunction")
        if x.size > 1 and np.any(np.diff(x) < 0):
            order = np.argsort(x, kind="stable")
            x, y = x[order], y[order]
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return self.x.size

    @property
    def domain(self) -> Tuple[float, float]:
        return float(self.x[0]), float(self.x[-1])

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.interp(t, self.x, self.y, left=np.nan, right=np.nan)

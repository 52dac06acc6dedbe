"""
Transport costs: convex costs of the difference h(x - y) and concave costs of
the distance l(|x - y|).
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Callable, Dict, List

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.spatial.distance import cdist

from ..exceptions import InvalidCost

Array = np.ndarray


class CostKind(str, Enum):
    CONVEX = "convex"
    CONCAVE = "concave"


@dataclass(frozen=True)
class CostSpec:
    """A cost with derivative and conjugate-gradient access.

    For convex costs ``h`` acts on the signed difference and
    ``conjugate_gradient`` is (h')^{-1}. For concave costs ``h`` is l on
    [0, inf) and ``conjugate_gradient`` is (l')^{-1} on (0, inf).
    """

    kind: CostKind
    name: str
    h: Callable[[Array], Array] = field(repr=False)
    derivative: Callable[[Array], Array] = field(repr=False)
    conjugate_gradient: Callable[[Array], Array] = field(repr=False)
    growth_p: float
    offset: float = 0.0
    cone_condition: bool = True
    spec: Dict[str, Any] = field(default_factory=dict, compare=False, repr=False)

    @property
    def is_convex(self) -> bool:
        return self.kind == CostKind.CONVEX

    def __call__(self, z) -> Array:
        z = np.asarray(z, dtype=float)
        if self.is_convex:
            return self.h(z) + self.offset
        return self.h(np.abs(z)) + self.offset

    def radial(self, distance) -> Array:
        """Cost as a function of Euclidean distance (h symmetrized on [0, inf))."""
        return self.h(np.asarray(distance, dtype=float)) + self.offset

    def pairwise(self, x, y) -> Array:
        """Cost matrix between two atom arrays of shape (n, d) and (m, d)."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        x = x[:, None] if x.ndim == 1 else x
        y = y[:, None] if y.ndim == 1 else y
        if x.shape[1] == 1 and self.is_convex:
            return self(x[:, 0][:, None] - y[:, 0][None, :])
        return self.radial(cdist(x, y))

    def shifted(self, k: float) -> "CostSpec":
        """Same cost plus the constant k."""
        return replace(self, name=f"{self.name}+{k:g}", offset=self.offset + k)

    def to_dict(self) -> Dict[str, Any]:
        out = dict(self.spec)
        if self.offset:
            out["offset"] = self.offset
        return out


# -- builtins ---------------------------------------------------------------


def power_cost(p: float) -> CostSpec:
    """Convex |x|^p, p > 1."""
    if not p > 1:
        raise InvalidCost(f"convex power cost needs p > 1, got {p}", operation="power_cost")

    def h(z):
        return np.abs(z) ** p

    def dh(z):
        return p * np.sign(z) * np.abs(z) ** (p - 1)

    def dh_inv(y):
        return np.sign(y) * (np.abs(y) / p) ** (1.0 / (p - 1))

    return CostSpec(
        CostKind.CONVEX, f"power:{p:g}", h, dh, dh_inv, growth_p=p,
        spec={"kind": "convex", "builtin": "power", "p": p},
    )


def concave_power_cost(p: float) -> CostSpec:
    """Concave t^p of the distance, 0 < p < 1."""
    if not 0 < p < 1:
        raise InvalidCost(f"concave power cost needs 0 < p < 1, got {p}", operation="concave_power_cost")

    def l(t):
        return np.abs(t) ** p

    def dl(t):
        with np.errstate(divide="ignore"):
            return p * np.abs(t) ** (p - 1)

    def dl_inv(s):
        with np.errstate(divide="ignore"):
            return (np.abs(s) / p) ** (1.0 / (p - 1))

    return CostSpec(
        CostKind.CONCAVE, f"concave-power:{p:g}", l, dl, dl_inv, growth_p=p,
        spec={"kind": "concave", "builtin": "power", "p": p},
    )


def grid_cost_diagnostics(kind, x, values) -> List[str]:
    """Invariant violations of a tabulated cost, one message per problem."""
    kind = CostKind(kind)
    x = np.asarray(x, dtype=float)
    values = np.asarray(values, dtype=float)
    problems: List[str] = []
    if x.ndim != 1 or x.shape != values.shape or x.size < 3:
        return ["cost grid needs matching 1-D x and value arrays with at least 3 points"]
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(values))):
        return ["cost grid contains non-finite values"]
    if np.any(np.diff(x) <= 0):
        bad = np.flatnonzero(np.diff(x) <= 0).tolist()
        return [f"cost grid abscissae not strictly ascending at indices {bad}"]

    slope = np.gradient(values, x)
    if kind == CostKind.CONVEX:
        bad = np.flatnonzero(np.diff(slope) <= 0)
        if bad.size:
            problems.append(f"h' not strictly increasing at indices {bad.tolist()}")
        if x[0] <= 0 <= x[-1]:
            h0 = float(np.interp(0.0, x, values))
            if abs(h0) > 1e-9 * max(1.0, np.max(np.abs(values))):
                problems.append(f"h(0) = {h0:.6g}, expected 0")
    else:
        if x[0] < 0:
            problems.append("concave cost grid must start at t >= 0")
        bad = np.flatnonzero(np.diff(slope) >= 0)
        if bad.size:
            problems.append(f"l' not strictly decreasing at indices {bad.tolist()}")
        if np.any(slope <= 0):
            problems.append(f"l' not positive at indices {np.flatnonzero(slope <= 0).tolist()}")
        if x[0] == 0 and abs(values[0]) > 1e-12:
            problems.append(f"l(0) = {values[0]:.6g}, expected 0")
    return problems


def grid_cost(kind, x, values, growth_p: float = 2.0) -> CostSpec:
    """Tabulated cost; Hermite-interpolated with finite-difference slopes.

    Raises:
        InvalidCost: the table violates the class invariants.
    """
    kind = CostKind(kind)
    problems = grid_cost_diagnostics(kind, x, values)
    if problems:
        raise InvalidCost("; ".join(problems), operation="grid_cost")
    x = np.asarray(x, dtype=float)
    values = np.asarray(values, dtype=float)
    slope = np.gradient(values, x)
    spline = CubicHermiteSpline(x, values, slope)
    dspline = spline.derivative()

    if kind == CostKind.CONVEX:
        def conj(y):
            return np.interp(y, slope, x)
    else:
        def conj(s):
            return np.interp(s, slope[::-1], x[::-1])

    return CostSpec(
        kind, f"{kind.value}-grid", spline, dspline, conj, growth_p=growth_p,
        cone_condition=False,
        spec={"kind": kind.value, "builtin": "grid", "x": x.tolist(), "h": values.tolist()},
    )


def cost_from_dict(spec: Dict[str, Any]) -> CostSpec:
    """Build a CostSpec from its JSON description."""
    kind = CostKind(spec.get("kind", "convex"))
    builtin = spec.get("builtin", "power")
    if builtin == "power":
        p = float(spec["p"])
        cost = power_cost(p) if kind == CostKind.CONVEX else concave_power_cost(p)
    elif builtin == "grid":
        values = spec.get("h", spec.get("l"))
        cost = grid_cost(kind, spec["x"], values, growth_p=float(spec.get("growth_p", 2.0)))
    else:
        raise InvalidCost(f"unknown builtin cost {builtin!r}", operation="cost_from_dict")
    offset = float(spec.get("offset", 0.0))
    return cost.shifted(offset) if offset else cost

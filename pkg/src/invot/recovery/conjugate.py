"""
Graphs of the conjugate gradient built from observed maps and potentials.

A point (y, z) records grad h*(y) = z: y is a potential gradient f'(x) and
z = x - T(x) the displacement of the observed map at the same x.
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from ..core.grid import GridFunction
from ..exceptions import DegenerateGraph, MisalignedSamples, NonMonotoneGraph, SignInconsistent
from ..forward.costs import CostKind
from ..forward.lp import LPResult
from ..utils.logging import get_logger

logger = get_logger(__name__)

DUPLICATE_Y_TOL = 1e-10
DUPLICATE_Z_TOL = 1e-6
SIGN_TOL = 1e-8


@dataclass(frozen=True)
class ConjugateGraph:
    """Points of grad h* sorted by y; ``identified_domain`` is the y-hull."""

    y: np.ndarray
    z: np.ndarray
    kind: CostKind = CostKind.CONVEX

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float).ravel()
        z = np.asarray(self.z, dtype=float).ravel()
        if y.shape != z.shape:
            raise MisalignedSamples("graph coordinates differ in length", operation="ConjugateGraph")
        keep = np.isfinite(y) & np.isfinite(z)
        y, z = y[keep], z[keep]
        if y.size == 0:
            raise DegenerateGraph("conjugate graph has no finite points", operation="ConjugateGraph")
        order = np.lexsort((z, y))
        y, z = y[order], z[order]
        kind = CostKind(self.kind)

        if kind == CostKind.CONCAVE:
            worst = float(np.min(z * np.sign(y)))
            if worst < -SIGN_TOL:
                raise SignInconsistent(
                    f"displacement opposes the gradient sign (z*sign(y) = {worst:.3e})",
                    operation="ConjugateGraph",
                )

        same = np.diff(y) <= DUPLICATE_Y_TOL
        if np.any(same & (np.abs(np.diff(z)) > DUPLICATE_Z_TOL)):
            raise NonMonotoneGraph(
                "duplicate gradients carry different displacements",
                operation="ConjugateGraph",
                indices=np.flatnonzero(same)[:10].tolist(),
            )

        y.setflags(write=False)
        z.setflags(write=False)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "kind", kind)

    def __len__(self) -> int:
        return self.y.size

    @property
    def identified_domain(self) -> Tuple[float, float]:
        return float(self.y[0]), float(self.y[-1])

    @property
    def is_degenerate(self) -> bool:
        return self.y.size < 2 or self.y[-1] - self.y[0] <= DUPLICATE_Y_TOL


def conjugate_graph_from_map(
    transport: GridFunction, fprime: GridFunction, kind: CostKind = CostKind.CONVEX
) -> ConjugateGraph:
    """Points (f'(x_i), x_i - T(x_i)).

    Raises:
        MisalignedSamples: the two sample sets sit on different x.
    """
    if transport.x.shape != fprime.x.shape or not np.allclose(transport.x, fprime.x, rtol=0.0, atol=1e-12):
        raise MisalignedSamples(
            "map and potential-gradient samples are not aligned", operation="conjugate_graph_from_map"
        )
    return ConjugateGraph(fprime.y, transport.x - transport.y, kind)


def conjugate_graph_from_lp(result: LPResult, kind: CostKind = CostKind.CONVEX) -> ConjugateGraph:
    """Graph from a 1-D LP: barycentric map of the plan, gradient of the row duals."""
    rows = result.coupling.rows
    x = rows.locations
    order = np.argsort(x)
    x = x[order]
    targets = result.coupling.barycentric_map()[order, 0]
    u = result.potentials.u[order]
    if x.size < 2:
        raise DegenerateGraph("need at least two row atoms", operation="conjugate_graph_from_lp")
    y = np.gradient(u, x)
    return ConjugateGraph(y, x - targets, kind)


def merge_conjugate_graphs(
    graphs: Sequence[ConjugateGraph], tol: float = DUPLICATE_Y_TOL
) -> Tuple[ConjugateGraph, float]:
    """Union of graphs; z averaged where y values agree within ``tol``.

    Returns the merged graph and the largest z spread among merged groups.
    """
    if not graphs:
        raise DegenerateGraph("no graphs to merge", operation="merge_conjugate_graphs")
    kinds = {g.kind for g in graphs}
    if len(kinds) != 1:
        raise MisalignedSamples("cannot merge convex and concave graphs", operation="merge_conjugate_graphs")
    y = np.concatenate([g.y for g in graphs])
    z = np.concatenate([g.z for g in graphs])
    order = np.lexsort((z, y))
    y, z = y[order], z[order]

    groups: List[Tuple[float, float]] = []
    spread = 0.0
    start = 0
    for i in range(1, y.size + 1):
        if i == y.size or y[i] - y[i - 1] > tol:
            block = z[start:i]
            spread = max(spread, float(block.max() - block.min()))
            groups.append((float(np.mean(y[start:i])), float(np.mean(block))))
            start = i
    merged_y, merged_z = (np.array(col) for col in zip(*groups))
    logger.debug(
        "merged conjugate graphs",
        extra={"extra_data": {"graphs": len(graphs), "points": int(merged_y.size), "spread": spread}},
    )
    return ConjugateGraph(merged_y, merged_z, kinds.pop()), spread

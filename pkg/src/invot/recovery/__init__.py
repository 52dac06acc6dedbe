"""Cost recovery from maps, potentials, plans and OT values."""

from .assemble import KMethod, RecoveredCost, ValueAnchor, assemble_convex_cost, isotonic_projection, recover_concave
from .conjugate import ConjugateGraph, conjugate_graph_from_lp, conjugate_graph_from_map, merge_conjugate_graphs
from .values import RecoveryMethod, ValueRecovery, recover_from_values_locscale

__all__ = [
    "ConjugateGraph",
    "KMethod",
    "RecoveredCost",
    "RecoveryMethod",
    "ValueAnchor",
    "ValueRecovery",
    "assemble_convex_cost",
    "conjugate_graph_from_lp",
    "conjugate_graph_from_map",
    "isotonic_projection",
    "merge_conjugate_graphs",
    "recover_concave",
    "recover_from_values_locscale",
]

"""
Exact transportation LP between two discrete measures.

The default solver is a transportation simplex on the spanning-tree basis:
north-west corner start, duals from the tree, Bland's rule for the entering
cell and lowest index among tied leaving cells. ``method="highs"`` solves the
same LP with scipy's HiGHS interface.
"""

from collections import deque
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from ..exceptions import Infeasible, SizeExceeded, SolverStalled
from ..measures.discrete import DiscreteMeasure
from ..utils.logging import get_logger
from .costs import CostSpec

logger = get_logger(__name__)

MAX_PRODUCT_SIZE = 10**6
MASS_TOL = 1e-9

Cell = Tuple[int, int]


@dataclass(frozen=True)
class Coupling:
    """A discrete transport plan between ``rows`` and ``cols``."""

    rows: DiscreteMeasure
    cols: DiscreteMeasure
    plan: np.ndarray
    value: float

    def entries(self, tol: float = 0.0) -> List[Tuple[int, int, float]]:
        i, j = np.nonzero(self.plan > tol)
        return [(int(a), int(b), float(self.plan[a, b])) for a, b in zip(i, j)]

    def marginal_error(self) -> float:
        return float(
            max(
                np.max(np.abs(self.plan.sum(axis=1) - self.rows.weights)),
                np.max(np.abs(self.plan.sum(axis=0) - self.cols.weights)),
            )
        )

    def barycentric_map(self) -> np.ndarray:
        """Plan-weighted mean target of every row atom, shape (n, d)."""
        return (self.plan @ self.cols.atoms) / self.rows.weights[:, None]

    def same_plan(self, other: "Coupling", tol: float = 1e-9) -> bool:
        return self.plan.shape == other.plan.shape and bool(
            np.max(np.abs(self.plan - other.plan)) <= tol
        )


@dataclass(frozen=True)
class AtomPotentials:
    """Dual variables u (rows) and v (columns)."""

    u: np.ndarray
    v: np.ndarray
    dual_value: float


@dataclass(frozen=True)
class LPResult:
    coupling: Coupling
    potentials: AtomPotentials
    duality_gap: float
    dual_violation: float
    iterations: int
    method: str

    @property
    def value(self) -> float:
        return self.coupling.value


def northwest_corner(a: np.ndarray, b: np.ndarray, tol: float) -> Tuple[np.ndarray, List[Cell]]:
    """Staircase basic feasible solution with exactly m + n - 1 basic cells."""
    m, n = a.size, b.size
    flows = np.zeros((m, n))
    supply = np.array(a, dtype=float)
    demand = np.array(b, dtype=float)
    basis: List[Cell] = []
    i = j = 0
    for _ in range(m + n - 1):
        q = max(min(supply[i], demand[j]), 0.0)
        flows[i, j] = q
        basis.append((i, j))
        supply[i] -= q
        demand[j] -= q
        if i == m - 1 and j == n - 1:
            break
        if (supply[i] <= tol or j == n - 1) and i < m - 1:
            i += 1
        else:
            j += 1
    return flows, basis


class _TransportationSimplex:
    """Per-call workspace for one transportation problem."""

    def __init__(self, a: np.ndarray, b: np.ndarray, costs: np.ndarray):
        self.a = a
        self.b = b
        self.C = costs
        self.m, self.n = costs.shape
        self.mass_tol = 1e-12 * max(1.0, float(a.sum()))
        self.rc_tol = 1e-12 * max(1.0, float(np.max(np.abs(costs))))

    def initial_basis(self) -> Tuple[np.ndarray, List[Cell]]:
        flows, basis = northwest_corner(self.a, self.b, self.mass_tol)
        rflows, rbasis = northwest_corner(self.a, self.b[::-1], self.mass_tol)
        rflows = rflows[:, ::-1]
        rbasis = [(i, self.n - 1 - j) for i, j in rbasis]
        if np.sum(rflows * self.C) < np.sum(flows * self.C):
            return rflows, rbasis
        return flows, basis

    def _adjacency(self, basis: List[Cell]) -> List[List[int]]:
        adj: List[List[int]] = [[] for _ in range(self.m + self.n)]
        for i, j in basis:
            adj[i].append(self.m + j)
            adj[self.m + j].append(i)
        return adj

    def duals(self, adj: List[List[int]]) -> Tuple[np.ndarray, np.ndarray]:
        m = self.m
        u = np.zeros(m)
        v = np.zeros(self.n)
        seen = np.zeros(m + self.n, dtype=bool)
        seen[0] = True
        stack = [0]
        while stack:
            node = stack.pop()
            for nb in adj[node]:
                if seen[nb]:
                    continue
                seen[nb] = True
                if node < m:
                    v[nb - m] = self.C[node, nb - m] - u[node]
                else:
                    u[nb] = self.C[nb, node - m] - v[node - m]
                stack.append(nb)
        if not seen.all():
            raise SolverStalled("basis is not a spanning tree", operation="ot_lp")
        return u, v

    def _tree_path(self, adj: List[List[int]], start: int, goal: int) -> List[int]:
        parent = np.full(self.m + self.n, -1)
        parent[start] = start
        queue = deque([start])
        while queue:
            node = queue.popleft()
            if node == goal:
                break
            for nb in adj[node]:
                if parent[nb] < 0:
                    parent[nb] = node
                    queue.append(nb)
        path = [goal]
        while path[-1] != start:
            path.append(int(parent[path[-1]]))
        path.reverse()
        return path

    def _cell(self, p: int, q: int) -> Cell:
        return (p, q - self.m) if p < self.m else (q, p - self.m)

    def solve(self, max_iterations: int):
        flows, basis = self.initial_basis()
        iterations = 0
        while True:
            adj = self._adjacency(basis)
            u, v = self.duals(adj)
            reduced = self.C - u[:, None] - v[None, :]
            for i, j in basis:
                reduced[i, j] = 0.0
            candidates = np.flatnonzero(reduced.ravel() < -self.rc_tol)
            if candidates.size == 0:
                return flows, u, v, iterations
            if iterations >= max_iterations:
                raise SolverStalled(
                    f"no optimum after {iterations} pivots", operation="ot_lp", size=[self.m, self.n]
                )
            ie, je = divmod(int(candidates[0]), self.n)

            path = self._tree_path(adj, ie, self.m + je)
            cells = [self._cell(path[t], path[t + 1]) for t in range(len(path) - 1)]
            minus = cells[0::2]
            plus = cells[1::2]
            theta = min(flows[c] for c in minus)
            leaving = min(
                (c for c in minus if flows[c] <= theta + self.mass_tol),
                key=lambda c: c[0] * self.n + c[1],
            )
            for c in plus:
                flows[c] += theta
            for c in minus:
                flows[c] = max(flows[c] - theta, 0.0)
            flows[ie, je] = theta
            flows[leaving] = 0.0
            basis[basis.index(leaving)] = (ie, je)
            iterations += 1


def _solve_highs(a: np.ndarray, b: np.ndarray, costs: np.ndarray):
    m, n = costs.shape
    rows = sparse.kron(sparse.identity(m), np.ones((1, n)))
    cols = sparse.kron(np.ones((1, m)), sparse.identity(n))
    a_eq = sparse.vstack([rows, cols]).tocsr()
    b_eq = np.concatenate([a, b * (a.sum() / b.sum())])
    res = linprog(costs.ravel(), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if res.status != 0:
        raise SolverStalled(f"HiGHS failed: {res.message}", operation="ot_lp")
    duals = res.eqlin.marginals
    return np.maximum(res.x.reshape(m, n), 0.0), duals[:m], duals[m:], int(res.nit)


def ot_lp(
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    cost: CostSpec,
    method: str = "simplex",
    max_size: int = MAX_PRODUCT_SIZE,
) -> LPResult:
    """Optimal plan, dual atom potentials and the duality-gap certificate.

    Raises:
        Infeasible: total masses differ by more than 1e-9.
        SizeExceeded: n * m above ``max_size``.
    """
    m, n = mu.size, nu.size
    if m * n > max_size:
        raise SizeExceeded(f"LP size {m}x{n} exceeds cap {max_size}", operation="ot_lp")
    if abs(mu.weights.sum() - nu.weights.sum()) > MASS_TOL:
        raise Infeasible(
            f"total masses differ: {mu.weights.sum():.17g} vs {nu.weights.sum():.17g}",
            operation="ot_lp",
        )

    costs = cost.pairwise(mu.atoms, nu.atoms)
    if mu.dim == 1:
        pr = np.argsort(mu.locations, kind="stable")
        pc = np.argsort(nu.locations, kind="stable")
    else:
        pr, pc = np.arange(m), np.arange(n)
    a, b = mu.weights[pr], nu.weights[pc]
    sub = costs[np.ix_(pr, pc)]

    if method == "simplex":
        solver = _TransportationSimplex(a, b, sub)
        flows, u_s, v_s, iterations = solver.solve(max_iterations=50 * m * n + 100)
    elif method == "highs":
        flows, u_s, v_s, iterations = _solve_highs(a, b, sub)
    else:
        raise ValueError(f"unknown LP method {method!r}")

    plan = np.zeros((m, n))
    plan[np.ix_(pr, pc)] = flows
    u = np.zeros(m)
    v = np.zeros(n)
    u[pr] = u_s
    v[pc] = v_s

    value = float(np.sum(plan * costs))
    dual_value = float(mu.weights @ u + nu.weights @ v)
    violation = float(max(0.0, np.max(u[:, None] + v[None, :] - costs)))
    gap = abs(value - dual_value)
    logger.debug(
        "transport LP solved",
        extra={"extra_data": {"size": [m, n], "method": method, "iterations": iterations, "gap": gap}},
    )
    return LPResult(
        coupling=Coupling(mu, nu, plan, value),
        potentials=AtomPotentials(u, v, dual_value),
        duality_gap=gap,
        dual_violation=violation,
        iterations=iterations,
        method=method,
    )


def monotone_coupling(mu: DiscreteMeasure, nu: DiscreteMeasure, cost: CostSpec) -> Coupling:
    """Quantile (north-west corner on sorted atoms) coupling of two 1-D measures."""
    pr = np.argsort(mu.locations, kind="stable")
    pc = np.argsort(nu.locations, kind="stable")
    flows, _ = northwest_corner(mu.weights[pr], nu.weights[pc], 1e-12)
    plan = np.zeros((mu.size, nu.size))
    plan[np.ix_(pr, pc)] = flows
    costs = cost.pairwise(mu.atoms, nu.atoms)
    return Coupling(mu, nu, plan, float(np.sum(plan * costs)))

"""Asymmetric TSP: assignment-problem bound with subtour-elimination branching."""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from .base import (AnytimeRecord, ConfigurationError, ContractViolation, InfeasibleError,
                   SearchProblem)

Arc = Tuple[int, int]


@dataclass(frozen=True, eq=False)
class AtspInstance:
    """``n`` cities with an ``n x n`` integer cost matrix; the diagonal is ignored."""

    cost: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.cost)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ConfigurationError("cost matrix must be square")
        if c.shape[0] < 3:
            raise ConfigurationError("need at least 3 cities")
        if not np.issubdtype(c.dtype, np.integer):
            if not np.all(np.mod(c, 1) == 0):
                raise ConfigurationError("costs must be integers")
        c = c.astype(np.int64).copy()
        np.fill_diagonal(c, 0)
        if (c < 0).any():
            raise ConfigurationError("costs must be non-negative")
        c.setflags(write=False)
        object.__setattr__(self, "cost", c)

    @property
    def n(self) -> int:
        return self.cost.shape[0]

    def tour_cost(self, order: Sequence[int]) -> int:
        c = self.cost
        return int(sum(c[order[i], order[(i + 1) % len(order)]] for i in range(len(order))))

    def to_text(self) -> str:
        rows = [" ".join(str(int(v)) for v in row) for row in self.cost]
        return f"{self.n}\n" + "\n".join(rows) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "AtspInstance":
        tokens = text.split()
        if not tokens:
            raise ConfigurationError("empty instance file")
        n = int(tokens[0])
        vals = tokens[1:]
        if len(vals) != n * n:
            raise ConfigurationError(f"expected {n * n} costs, found {len(vals)}")
        return cls(np.array([int(v) for v in vals], dtype=np.int64).reshape(n, n))


@dataclass(frozen=True)
class Tour:
    order: Tuple[int, ...]
    cost: int

    @classmethod
    def from_successors(cls, succ: Sequence[int], instance) -> "Tour":
        order, city = [0], succ[0]
        while city != 0:
            order.append(city)
            city = succ[city]
        if len(order) != len(succ):
            raise ContractViolation("successor map is not a single cycle")
        return cls(tuple(order), instance.tour_cost(order))


def generate_atsp(n: int, structure="i_times_j", seed: int = 0) -> AtspInstance:
    """Seeded random instance.

    ``structure`` is ``"i_times_j"`` (entry (i, j), 1-based, uniform on
    ``{0, ..., i*j}``) or ``("uniform_range", hi)`` (uniform on ``{0..hi}``).
    """
    if n < 3:
        raise ConfigurationError("need at least 3 cities")
    rng = np.random.default_rng(seed)
    if structure == "i_times_j":
        idx = np.arange(1, n + 1, dtype=np.int64)
        hi = np.outer(idx, idx)
        cost = rng.integers(0, hi + 1, dtype=np.int64)
    elif isinstance(structure, (tuple, list)) and structure[0] == "uniform_range":
        cost = rng.integers(0, int(structure[1]) + 1, size=(n, n), dtype=np.int64)
    else:
        raise ConfigurationError(f"unknown ATSP structure {structure!r}")
    return AtspInstance(cost)


# --------------------------------------------------------------------------
# assignment problem
# --------------------------------------------------------------------------

def _lsap(c: np.ndarray) -> np.ndarray:
    """Min-cost perfect assignment by shortest augmenting paths with potentials.

    Returns ``col`` with ``col[i]`` the column assigned to row ``i``.
    """
    n = c.shape[0]
    u = np.zeros(n + 1, dtype=np.int64)
    v = np.zeros(n + 1, dtype=np.int64)
    p = np.zeros(n + 1, dtype=np.int64)      # p[j]: row matched to column j (1-based, 0 = free)
    way = np.zeros(n + 1, dtype=np.int64)
    big = np.iinfo(np.int64).max // 4
    cost = np.zeros((n + 1, n + 1), dtype=np.int64)
    cost[1:, 1:] = c
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, big, dtype=np.int64)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            free = ~used
            free[0] = False
            cur = cost[i0] - u[i0] - v
            better = free & (cur < minv)
            minv[better] = cur[better]
            way[better] = j0
            cand = np.where(free, minv, big)
            j1 = int(np.argmin(cand))
            delta = cand[j1]
            u[p[used]] += delta
            v[used] -= delta
            minv[free] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    col = np.empty(n, dtype=np.int64)
    col[p[1:] - 1] = np.arange(n)
    return col


def _big_cost(instance: AtspInstance) -> int:
    return int(instance.cost.max(axis=1).sum()) + 1


def solve_assignment(instance: AtspInstance, included=(), excluded=()):
    """Assignment relaxation under arc constraints.

    Returns ``(value, successors)``. Forbidden arcs (the diagonal, excluded
    arcs, and arcs competing with included ones) are priced at a ceiling
    above any tour; an optimum that needs one means the constraints are
    infeasible and :class:`InfeasibleError` is raised.
    """
    n = instance.n
    big = _big_cost(instance)
    c = instance.cost.copy()
    np.fill_diagonal(c, big)
    for i, j in excluded:
        c[i, j] = big
    for i, j in included:
        keep = instance.cost[i, j]
        if (i, j) in excluded or i == j:
            raise InfeasibleError(f"arc {(i, j)} both included and excluded")
        c[i, :] = big
        c[:, j] = big
        c[i, j] = keep
    col = _lsap(c)
    chosen = c[np.arange(n), col]
    if (chosen >= big).any():
        raise InfeasibleError("no assignment satisfies the arc constraints")
    return int(chosen.sum()), tuple(int(x) for x in col)


def subtours(succ: Sequence[int]) -> List[List[int]]:
    """Cycles of a successor map, each starting at its lowest city, sorted by that city."""
    seen = [False] * len(succ)
    out = []
    for start in range(len(succ)):
        if seen[start]:
            continue
        cyc, city = [], start
        while not seen[city]:
            seen[city] = True
            cyc.append(city)
            city = succ[city]
        out.append(cyc)
    return out


@dataclass(frozen=True, eq=False)
class AtspNode:
    included: FrozenSet[Arc]
    excluded: FrozenSet[Arc]
    ap_value: int
    ap_solution: Tuple[int, ...]
    cycles: Tuple[Tuple[int, ...], ...] = field(default=())

    @property
    def is_tour(self) -> bool:
        return len(self.cycles) == 1


def make_atsp_node(instance, included=frozenset(), excluded=frozenset()) -> AtspNode:
    value, succ = solve_assignment(instance, included, excluded)
    cycles = tuple(tuple(c) for c in subtours(succ))
    return AtspNode(frozenset(included), frozenset(excluded), value, succ, cycles)


def carpaneto_toth_children(node: AtspNode, instance: Optional[AtspInstance] = None,
                            constraints_only: bool = False):
    """Partition a node's tour set along the free arcs of one subtour.

    The subtour with the fewest arcs not already included is chosen (ties go
    to the subtour containing the lowest city). With free arcs a1..at in
    tour order, child i excludes ai and includes a1..a(i-1). Children whose
    assignment problem is infeasible are dropped.
    """
    if node.is_tour:
        raise ContractViolation("node's assignment is already a single tour")
    best = None
    for cyc in node.cycles:
        arcs = [(cyc[k], cyc[(k + 1) % len(cyc)]) for k in range(len(cyc))]
        free = [a for a in arcs if a not in node.included]
        if best is None or len(free) < len(best):
            best = free
    specs = []
    for i, arc in enumerate(best):
        specs.append((node.included | frozenset(best[:i]), node.excluded | {arc}))
    if constraints_only:
        return specs
    if instance is None:
        raise ConfigurationError("instance required to evaluate children")
    children = []
    for inc, exc in specs:
        try:
            children.append(make_atsp_node(instance, inc, exc))
        except InfeasibleError:
            continue
    return children


class AtspProblem(SearchProblem):
    def __init__(self, instance: AtspInstance):
        self.instance = instance
        self._root = make_atsp_node(instance)

    def root(self):
        return self._root

    def expand(self, node):
        if node.is_tour:
            return []
        return [(child, child.ap_value - node.ap_value)
                for child in carpaneto_toth_children(node, self.instance)]

    def is_goal(self, node):
        return node.is_tour

    def original_cost(self, node):
        return node.ap_value

    def describe(self, node):
        if node.is_tour:
            return Tour.from_successors(node.ap_solution, self.instance).order
        return node.cycles


def tour_satisfies(order: Sequence[int], included, excluded) -> bool:
    arcs = {(order[k], order[(k + 1) % len(order)]) for k in range(len(order))}
    return included <= arcs and not (excluded & arcs)


# --------------------------------------------------------------------------
# local search baseline
# --------------------------------------------------------------------------

def local_search_baseline(instance: AtspInstance, budget: int = 100_000, seed: int = 0,
                          time_limit: Optional[float] = None) -> AnytimeRecord:
    """Random-restart local search with direction-preserving 3-exchange.

    A move swaps two consecutive segments of the tour (arcs (a,a'), (b,b'),
    (c,c') become (a,b'), (c,a'), (b,c')), which never reverses a segment and
    so suits asymmetric costs. Improvement is first-found. ``budget`` counts
    move evaluations; the record is stamped with that count.
    """
    if budget < 1:
        raise ConfigurationError("budget must be positive")
    rng = random.Random(seed)
    c = instance.cost.tolist()
    n = instance.n
    record = AnytimeRecord()
    start = time.perf_counter()
    evals = 0

    def out_of_budget():
        return evals >= budget or (time_limit is not None and time.perf_counter() - start > time_limit)

    while not out_of_budget():
        tour = list(range(n))
        rng.shuffle(tour)
        cost = sum(c[tour[k]][tour[(k + 1) % n]] for k in range(n))
        evals += 1
        record.add(evals, time.perf_counter() - start, cost)
        improved = True
        while improved and not out_of_budget():
            improved = False
            for i in range(n - 2):
                a, a2 = tour[i], tour[i + 1]
                for j in range(i + 1, n - 1):
                    b, b2 = tour[j], tour[j + 1]
                    for k in range(j + 1, n):
                        cc, cc2 = tour[k], tour[(k + 1) % n]
                        evals += 1
                        delta = (c[a][b2] + c[cc][a2] + c[b][cc2]
                                 - c[a][a2] - c[b][b2] - c[cc][cc2])
                        if delta < 0:
                            tour = tour[:i + 1] + tour[j + 1:k + 1] + tour[i + 1:j + 1] + tour[k + 1:]
                            cost += delta
                            record.add(evals, time.perf_counter() - start, cost)
                            improved = True
                            break
                        if evals >= budget:
                            break
                    if improved or evals >= budget:
                        break
                if improved or evals >= budget:
                    break
    return record

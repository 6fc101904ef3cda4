"""Symmetric TSP: Held-Karp 1-tree bound with three-way edge branching."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from .base import ConfigurationError, ContractViolation, InfeasibleError, SearchProblem

Edge = Tuple[int, int]
SPECIAL = 0


def _edge(i: int, j: int) -> Edge:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True, eq=False)
class StspInstance:
    cost: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.cost)
        if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] < 3:
            raise ConfigurationError("need a square cost matrix with n >= 3")
        c = c.astype(np.int64).copy()
        np.fill_diagonal(c, 0)
        if not np.array_equal(c, c.T):
            raise ConfigurationError("cost matrix must be symmetric")
        if (c < 0).any():
            raise ConfigurationError("costs must be non-negative")
        c.setflags(write=False)
        object.__setattr__(self, "cost", c)

    @property
    def n(self) -> int:
        return self.cost.shape[0]

    def tour_cost(self, order: Sequence[int]) -> int:
        c = self.cost
        return int(sum(int(c[order[i], order[(i + 1) % len(order)]]) for i in range(len(order))))

    def to_text(self) -> str:
        n = self.n
        rows = [" ".join(str(int(self.cost[i, j])) for j in range(i + 1, n)) for i in range(n - 1)]
        return f"{n}\n" + "\n".join(rows) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "StspInstance":
        tokens = text.split()
        if not tokens:
            raise ConfigurationError("empty instance file")
        n = int(tokens[0])
        vals = [int(v) for v in tokens[1:]]
        if len(vals) != n * (n - 1) // 2:
            raise ConfigurationError(f"expected {n * (n - 1) // 2} upper-triangular costs")
        c = np.zeros((n, n), dtype=np.int64)
        c[np.triu_indices(n, 1)] = vals
        return cls(c + c.T)


def generate_stsp(n: int, hi: int = 2**32 - 1, seed: int = 0) -> StspInstance:
    """Costs drawn uniformly from ``{0, ..., hi}``."""
    if n < 3:
        raise ConfigurationError("need at least 3 cities")
    rng = np.random.default_rng(seed)
    c = np.zeros((n, n), dtype=np.int64)
    iu = np.triu_indices(n, 1)
    c[iu] = rng.integers(0, hi, size=len(iu[0]), dtype=np.int64, endpoint=True)
    return StspInstance(c + c.T)


@dataclass(frozen=True, eq=False)
class OneTree:
    edges: Tuple[Edge, ...]
    special_city: int
    degrees: Tuple[int, ...]
    value: float

    @property
    def is_tour(self) -> bool:
        return all(d == 2 for d in self.degrees)

    def tour_order(self) -> Tuple[int, ...]:
        adj = {i: [] for i in range(len(self.degrees))}
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        order, prev, city = [self.special_city], None, self.special_city
        while True:
            nxt = adj[city][0] if adj[city][0] != prev else adj[city][1]
            if nxt == self.special_city:
                break
            order.append(nxt)
            prev, city = city, nxt
        return tuple(order)


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def normalize_constraints(n: int, required, forbidden):
    """Propagate degree constraints to a fixpoint.

    A city with two required edges has all its other edges forbidden; a city
    with exactly two allowed edges has both required. Raises
    :class:`InfeasibleError` for over-full degrees, under-connected cities,
    or required edges closing a cycle shorter than ``n``.
    """
    req, forb = set(required), set(forbidden)
    if req & forb:
        raise InfeasibleError("edge both required and forbidden")
    changed = True
    while changed:
        changed = False
        req_deg = [0] * n
        for i, j in req:
            req_deg[i] += 1
            req_deg[j] += 1
        for v in range(n):
            if req_deg[v] > 2:
                raise InfeasibleError(f"city {v} has {req_deg[v]} required edges")
            allowed = [_edge(v, w) for w in range(n) if w != v and _edge(v, w) not in forb]
            if len(allowed) < 2:
                raise InfeasibleError(f"city {v} has fewer than two allowed edges")
            if req_deg[v] == 2 and len(allowed) > 2:
                for e in allowed:
                    if e not in req:
                        forb.add(e)
                changed = True
            elif len(allowed) == 2 and req_deg[v] < 2:
                for e in allowed:
                    req.add(e)
                changed = True
        if req & forb:
            raise InfeasibleError("constraint propagation produced a conflict")
    uf = _UnionFind(n)
    for i, j in sorted(req):
        if not uf.union(i, j) and len(req) < n:
            raise InfeasibleError("required edges close a subtour")
    return frozenset(req), frozenset(forb)


def one_tree(instance: StspInstance, required=frozenset(), forbidden=frozenset(), pi=None) -> OneTree:
    """Minimum 1-tree under costs ``c(i,j) + pi_i + pi_j`` honoring constraints.

    The spanning tree covers every city except the special one (city 0);
    the special city is joined by its required edges plus its cheapest
    allowed edges up to degree two. ``value`` is the adjusted cost minus
    ``2 * sum(pi)``, a lower bound on every tour satisfying the constraints.
    """
    n = instance.n
    pi = np.zeros(n) if pi is None else np.asarray(pi, dtype=float)
    w = instance.cost.astype(float) + pi[:, None] + pi[None, :]
    key_w = w.copy()
    for i, j in forbidden:
        key_w[i, j] = key_w[j, i] = math.inf
    for i, j in required:
        if SPECIAL not in (i, j):
            key_w[i, j] = key_w[j, i] = -math.inf

    # Prim over cities 1..n-1; required edges carry -inf so they enter first
    others = n - 1
    sub = key_w[1:, 1:]
    in_tree = np.zeros(others, dtype=bool)
    in_tree[0] = True
    key = sub[0].copy()
    parent = np.zeros(others, dtype=np.int64)
    edges: List[Edge] = []
    for _ in range(others - 1):
        cand = np.where(in_tree, math.inf, key)
        v = int(np.argmin(cand))
        if not cand[v] < math.inf:
            raise InfeasibleError("forbidden edges disconnect the cities")
        in_tree[v] = True
        edges.append(_edge(int(parent[v]) + 1, v + 1))
        row = sub[v]
        better = row < key
        key[better] = row[better]
        parent[better] = v

    req_special = sorted(_edge(i, j) for i, j in required if SPECIAL in (i, j))
    if len(req_special) > 2:
        raise InfeasibleError("special city has more than two required edges")
    special_edges = list(req_special)
    if len(special_edges) < 2:
        taken = {j for e in special_edges for j in e if j != SPECIAL}
        row = key_w[SPECIAL]
        options = sorted((row[j], j) for j in range(1, n) if j not in taken and row[j] < math.inf)
        need = 2 - len(special_edges)
        if len(options) < need:
            raise InfeasibleError("special city lacks allowed edges")
        special_edges += [_edge(SPECIAL, j) for _, j in options[:need]]
    edges += special_edges

    req_set = frozenset(required)
    tree_edges = set(edges)
    if not req_set <= tree_edges:
        raise InfeasibleError("required edges could not all enter the 1-tree")
    degrees = [0] * n
    total = 0.0
    for i, j in edges:
        degrees[i] += 1
        degrees[j] += 1
        total += w[i, j]
    return OneTree(tuple(edges), SPECIAL, tuple(degrees), total - 2.0 * float(pi.sum()))


def greedy_tour_cost(instance: StspInstance) -> int:
    n = instance.n
    c = instance.cost
    visited = [False] * n
    visited[0] = True
    city, total = 0, 0
    for _ in range(n - 1):
        row = np.where(visited, np.iinfo(np.int64).max, c[city])
        nxt = int(np.argmin(row))
        total += int(c[city, nxt])
        visited[nxt] = True
        city = nxt
    return total + int(c[city, 0])


def _floor_bound(value: float) -> int:
    # integer tour costs: round the float bound down with a relative safety margin
    return math.ceil(value - 1e-9 * max(1.0, abs(value)) - 1e-6)


def held_karp_bound(instance: StspInstance, required=frozenset(), forbidden=frozenset(),
                    pi=None, max_steps: Optional[int] = None, upper_estimate: Optional[float] = None):
    """Subgradient ascent on the 1-tree Lagrangian.

    Step ``k`` (of ``M = max_steps``, default ``n // 2``) moves
    ``pi_i += t_k (deg_i - 2)`` with ``t_k = t0 (M - k) / M`` and
    ``t0 = (upper_estimate - value0) / n``. Stops early on a tour. Returns
    ``(bound, tree, pi)`` for the step with the best bound; for a tour the
    bound is the tour's exact integer cost.
    """
    n = instance.n
    steps = max(1, n // 2 if max_steps is None else int(max_steps))
    pi = np.zeros(n) if pi is None else np.array(pi, dtype=float)
    if upper_estimate is None:
        upper_estimate = greedy_tour_cost(instance)
    best = None
    t0 = None
    for k in range(steps):
        tree = one_tree(instance, required, forbidden, pi)
        if tree.is_tour:
            return instance.tour_cost(tree.tour_order()), tree, pi
        if best is None or tree.value > best[0]:
            best = (tree.value, tree, pi.copy())
        if t0 is None:
            gap = upper_estimate - tree.value
            t0 = max(gap, 1e-3 * abs(tree.value), 1.0) / n
        t = t0 * (steps - k) / steps
        pi = pi + t * (np.asarray(tree.degrees, dtype=float) - 2.0)
    value, tree, best_pi = best
    return _floor_bound(value), tree, best_pi


@dataclass(frozen=True, eq=False)
class StspNode:
    required: FrozenSet[Edge]
    forbidden: FrozenSet[Edge]
    pi: Tuple[float, ...]
    bound: int
    tree: OneTree

    @property
    def is_tour(self) -> bool:
        return self.tree.is_tour


def vj_children(node: StspNode, instance: Optional[StspInstance] = None,
                constraints_only: bool = False):
    """Branch on the highest-degree city ``v`` of the node's 1-tree.

    With ``e1``, ``e2`` the two cheapest free 1-tree edges at ``v``:
    (A) forbid e1; (B) require e1, forbid e2; (C) require e1 and e2. When
    ``v`` already has a required edge, or only one free 1-tree edge, only
    (A) and (B: require e1) are generated. Infeasible children are dropped.
    """
    tree = node.tree
    if tree.is_tour:
        raise ContractViolation("1-tree is already a tour")
    deg = tree.degrees
    v = max(range(len(deg)), key=lambda i: (deg[i], -i))
    cost = instance.cost if instance is not None else None
    free = [e for e in tree.edges if v in e and e not in node.required]
    free.sort(key=lambda e: (int(cost[e]) if cost is not None else 0, e))
    n_req = sum(1 for e in node.required if v in e)
    e1 = free[0]
    specs = [(node.required, node.forbidden | {e1})]
    if n_req == 0 and len(free) >= 2:
        e2 = free[1]
        specs.append((node.required | {e1}, node.forbidden | {e2}))
        specs.append((node.required | {e1, e2}, node.forbidden))
    else:
        specs.append((node.required | {e1}, node.forbidden))
    if constraints_only:
        return specs
    if instance is None:
        raise ConfigurationError("instance required to evaluate children")
    n = instance.n
    out = []
    for req, forb in specs:
        try:
            req, forb = normalize_constraints(n, req, forb)
            bound, t, pi = held_karp_bound(instance, req, forb, node.pi)
        except InfeasibleError:
            continue
        out.append(StspNode(req, forb, tuple(pi), max(bound, node.bound), t))
    return out


class StspProblem(SearchProblem):
    def __init__(self, instance: StspInstance, max_steps: Optional[int] = None):
        self.instance = instance
        self.max_steps = max_steps
        self._ub = greedy_tour_cost(instance)
        bound, tree, pi = held_karp_bound(instance, max_steps=max_steps, upper_estimate=self._ub)
        self._root = StspNode(frozenset(), frozenset(), tuple(pi), bound, tree)

    def root(self):
        return self._root

    def expand(self, node):
        if node.is_tour:
            return []
        out = []
        n = self.instance.n
        for req, forb in vj_children(node, self.instance, constraints_only=True):
            try:
                req, forb = normalize_constraints(n, req, forb)
                bound, tree, pi = held_karp_bound(self.instance, req, forb, node.pi,
                                                  self.max_steps, self._ub)
            except InfeasibleError:
                continue
            if not tree.is_tour:
                bound = max(bound, node.bound)
            child = StspNode(req, forb, tuple(pi), bound, tree)
            out.append((child, child.bound - node.bound))
        return out

    def is_goal(self, node):
        return node.is_tour

    def original_cost(self, node):
        return node.bound

    def describe(self, node):
        return node.tree.tour_order() if node.is_tour else (len(node.required), len(node.forbidden))

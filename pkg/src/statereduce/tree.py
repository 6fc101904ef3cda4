"""Incremental random trees T(b, d) generated lazily from (seed, path) hashes.

Every node carries a 64-bit key derived from its parent's key and its child
index, and all randomness at a node (child count, edge costs) is drawn from
that key. A node therefore has the same children no matter which algorithm
visits it, or in which order.
"""
from __future__ import annotations

import math
import numbers
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .base import ConfigurationError, SearchProblem
from ._validation import check_seed

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_BRANCH_SALT = 0xD6E8FEB86659FD93
_INDEX_MUL = 0xD1B54A32D192ED03


def _mix(x: int) -> int:
    """splitmix64 finalizer."""
    z = (x + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def child_key(parent_key: int, index: int) -> int:
    return _mix(parent_key ^ (((index + 1) * _INDEX_MUL) & _MASK))


def _unit(h: int) -> float:
    # 53 high bits -> [0, 1)
    return (h >> 11) * (1.0 / (1 << 53))


# --------------------------------------------------------------------------
# distributions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BranchingDistribution:
    """Child-count distribution.

    ``fixed`` always yields ``mean`` children (``mean`` must be integral).
    ``poisson`` yields ``1 + Poisson(mean - 1)`` so the mean is exact and no
    internal node is a deadend.
    """

    kind: str
    mean: float
    _cdf: Tuple[float, ...] = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in ("fixed", "poisson"):
            raise ConfigurationError(f"unknown branching kind {self.kind!r}")
        if not isinstance(self.mean, numbers.Real) or not self.mean > 1:
            raise ConfigurationError(f"mean branching factor must be > 1, got {self.mean!r}")
        if self.kind == "fixed":
            if float(self.mean) != int(self.mean):
                raise ConfigurationError("fixed branching needs an integer factor")
            object.__setattr__(self, "mean", int(self.mean))
        else:
            lam = float(self.mean) - 1.0
            cdf, term, acc, k = [], math.exp(-lam), 0.0, 0
            while acc < 1.0 - 1e-15 and k < 1000:
                acc += term
                cdf.append(acc)
                k += 1
                term *= lam / k
            cdf[-1] = 1.0
            object.__setattr__(self, "_cdf", tuple(cdf))

    @classmethod
    def fixed(cls, b: int) -> "BranchingDistribution":
        return cls("fixed", b)

    @classmethod
    def poisson(cls, mean: float) -> "BranchingDistribution":
        return cls("poisson", mean)

    @property
    def max_children(self) -> int:
        return self.mean if self.kind == "fixed" else len(self._cdf)

    def draw(self, h: int) -> int:
        if self.kind == "fixed":
            return self.mean
        return 1 + bisect_right(self._cdf, _unit(h))

    def to_text(self) -> str:
        return f"{self.kind}:{self.mean:g}"

    @classmethod
    def from_text(cls, text: str) -> "BranchingDistribution":
        kind, _, value = text.strip().partition(":")
        try:
            return cls(kind, float(value) if "." in value else int(value))
        except ValueError as exc:
            raise ConfigurationError(f"bad branching spec {text!r}") from exc


@dataclass(frozen=True)
class EdgeCostDistribution:
    """Non-negative edge-cost distribution.

    ``uniform_integer`` draws from ``{lo, ..., hi}`` with exact integer
    arithmetic; ``discrete`` draws ``values[i]`` with ``probabilities[i]``.
    """

    kind: str
    lo: int = 0
    hi: int = 0
    values: Tuple = ()
    probabilities: Tuple[float, ...] = ()
    _cum: Tuple[float, ...] = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        if self.kind == "uniform_integer":
            if not all(isinstance(v, numbers.Integral) for v in (self.lo, self.hi)):
                raise ConfigurationError("uniform_integer bounds must be integers")
            if self.lo < 0 or self.hi < self.lo:
                raise ConfigurationError(f"invalid range [{self.lo}, {self.hi}]")
            if self.hi >= 2**64:
                raise ConfigurationError("edge costs must fit in 64 bits")
        elif self.kind == "discrete":
            vals, probs = tuple(self.values), tuple(float(p) for p in self.probabilities)
            if not vals or len(vals) != len(probs):
                raise ConfigurationError("discrete distribution needs matching values/probabilities")
            if any(v < 0 for v in vals):
                raise ConfigurationError("edge costs must be non-negative")
            if any(p < 0 for p in probs) or abs(math.fsum(probs) - 1.0) > 1e-12:
                raise ConfigurationError("probabilities must be >= 0 and sum to 1")
            cum, acc = [], 0.0
            for p in probs:
                acc += p
                cum.append(acc)
            cum[-1] = 1.0
            object.__setattr__(self, "values", vals)
            object.__setattr__(self, "probabilities", probs)
            object.__setattr__(self, "_cum", tuple(cum))
        else:
            raise ConfigurationError(f"unknown cost distribution kind {self.kind!r}")

    @classmethod
    def uniform_integer(cls, lo: int, hi: int) -> "EdgeCostDistribution":
        return cls("uniform_integer", lo=lo, hi=hi)

    @classmethod
    def discrete(cls, values: Sequence, probabilities: Sequence[float]) -> "EdgeCostDistribution":
        return cls("discrete", values=tuple(values), probabilities=tuple(probabilities))

    @classmethod
    def constant(cls, value) -> "EdgeCostDistribution":
        return cls.discrete([value], [1.0])

    @classmethod
    def zero_inflated(cls, p0: float, hi: int) -> "EdgeCostDistribution":
        """Cost 0 with probability ``p0``, otherwise uniform on ``{1, ..., hi}``."""
        if not 0 <= p0 <= 1 or hi < 1:
            raise ConfigurationError("need 0 <= p0 <= 1 and hi >= 1")
        rest = (1.0 - p0) / hi
        return cls.discrete([0] + list(range(1, hi + 1)), [p0] + [rest] * hi)

    @property
    def p0(self) -> float:
        if self.kind == "uniform_integer":
            return 1.0 / (self.hi - self.lo + 1) if self.lo == 0 else 0.0
        return math.fsum(p for v, p in zip(self.values, self.probabilities) if v == 0)

    def cdf(self, x) -> float:
        if self.kind == "uniform_integer":
            if x < self.lo:
                return 0.0
            return min(1.0, (math.floor(x) - self.lo + 1) / (self.hi - self.lo + 1))
        return math.fsum(p for v, p in zip(self.values, self.probabilities) if v <= x)

    def draw(self, h: int):
        if self.kind == "uniform_integer":
            # multiply-shift keeps the draw exact and unbiased to within 2^-64
            return self.lo + ((h * (self.hi - self.lo + 1)) >> 64)
        return self.values[bisect_right(self._cum, _unit(h), hi=len(self._cum) - 1)]

    def to_text(self) -> str:
        if self.kind == "uniform_integer":
            return f"uniform:{self.lo}:{self.hi}"
        hi = len(self.values) - 1
        if hi >= 1 and self.values == tuple(range(hi + 1)):
            candidate = EdgeCostDistribution.zero_inflated(self.probabilities[0], hi)
            if candidate.probabilities == self.probabilities:
                return f"zero_inflated:{self.probabilities[0]!r}:{hi}"
        return "discrete:" + ",".join(f"{v!r}@{p!r}" for v, p in zip(self.values, self.probabilities))

    @classmethod
    def from_text(cls, text: str) -> "EdgeCostDistribution":
        kind, _, rest = text.strip().partition(":")
        try:
            if kind == "uniform":
                lo, hi = rest.split(":")
                return cls.uniform_integer(int(lo), int(hi))
            if kind == "zero_inflated":
                p0, hi = rest.split(":")
                return cls.zero_inflated(float(p0), int(hi))
            if kind == "discrete":
                pairs = [item.split("@") for item in rest.split(",")]
                vals = [float(v) if any(c in v for c in ".eE") else int(v) for v, _ in pairs]
                return cls.discrete(vals, [float(p) for _, p in pairs])
        except ValueError as exc:
            raise ConfigurationError(f"bad cost distribution {text!r}") from exc
        raise ConfigurationError(f"unknown cost distribution {text!r}")


@dataclass(frozen=True)
class TreeSpec:
    depth: int
    branching: BranchingDistribution
    edge_cost: EdgeCostDistribution
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.depth, bool) or not isinstance(self.depth, numbers.Integral) or self.depth < 1:
            raise ConfigurationError(f"depth must be a positive integer, got {self.depth!r}")
        if not isinstance(self.branching, BranchingDistribution):
            raise ConfigurationError("branching must be a BranchingDistribution")
        if not isinstance(self.edge_cost, EdgeCostDistribution):
            raise ConfigurationError("edge_cost must be an EdgeCostDistribution")
        check_seed(self.seed)

    def with_seed(self, seed: int) -> "TreeSpec":
        return TreeSpec(self.depth, self.branching, self.edge_cost, seed)

    def to_config(self) -> str:
        return (f"depth={self.depth}\nbranching={self.branching.to_text()}\n"
                f"cost_dist={self.edge_cost.to_text()}\nseed={self.seed}\n")

    @classmethod
    def from_config(cls, text: str) -> "TreeSpec":
        fields = {}
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigurationError(f"expected key=value, got {line!r}")
            fields[key.strip()] = value.strip()
        missing = {"depth", "branching", "cost_dist"} - fields.keys()
        if missing:
            raise ConfigurationError(f"missing tree config keys: {sorted(missing)}")
        return cls(int(fields["depth"]),
                   BranchingDistribution.from_text(fields["branching"]),
                   EdgeCostDistribution.from_text(fields["cost_dist"]),
                   int(fields.get("seed", 0)))


# --------------------------------------------------------------------------
# lazily generated tree
# --------------------------------------------------------------------------

class TreeNode:
    __slots__ = ("key", "cost", "depth", "parent", "index")

    def __init__(self, key, cost, depth, parent=None, index=-1):
        self.key = key
        self.cost = cost
        self.depth = depth
        self.parent = parent
        self.index = index

    @property
    def path(self) -> Tuple[int, ...]:
        out = []
        node = self
        while node.parent is not None:
            out.append(node.index)
            node = node.parent
        return tuple(reversed(out))

    def __repr__(self):
        return f"TreeNode(path={self.path}, cost={self.cost!r})"


class TreeProblem(SearchProblem):
    """A :class:`TreeSpec` exposed as a search problem."""

    def __init__(self, spec: TreeSpec):
        self.spec = spec
        self._root = TreeNode(_mix(spec.seed), 0, 0)

    def root(self):
        return self._root

    def children_draw(self, node: TreeNode) -> List[Tuple[int, object]]:
        """``(child_key, edge_cost)`` for each child of ``node``."""
        spec = self.spec
        if node.depth >= spec.depth:
            return []
        key = node.key
        count = spec.branching.draw(_mix(key ^ _BRANCH_SALT))
        draw = spec.edge_cost.draw
        out = []
        for i in range(count):
            ck = child_key(key, i)
            out.append((ck, draw(_mix(ck))))
        return out

    def expand(self, node: TreeNode):
        depth = node.depth + 1
        cost = node.cost
        return [(TreeNode(ck, cost + g, depth, node, i), g)
                for i, (ck, g) in enumerate(self.children_draw(node))]

    def is_goal(self, node: TreeNode) -> bool:
        return node.depth == self.spec.depth

    def original_cost(self, node: TreeNode):
        return node.cost

    def describe(self, node: TreeNode):
        return node.path

    def node_at(self, path: Sequence[int]) -> TreeNode:
        node = self._root
        for i in path:
            kids = self.expand(node)
            if not 0 <= i < len(kids):
                raise IndexError(f"no child {i} at {node.path}")
            node = kids[i][0]
        return node

    def enumerate_leaves(self, limit: Optional[int] = None):
        """Yield every depth-d node; ``limit`` caps the number of nodes visited."""
        stack = [self._root]
        seen = 0
        while stack:
            node = stack.pop()
            seen += 1
            if limit is not None and seen > limit:
                raise ConfigurationError(f"tree has more than {limit} nodes")
            if self.is_goal(node):
                yield node
            else:
                stack.extend(child for child, _ in self.expand(node))

    def count_nodes(self, limit: Optional[int] = None) -> int:
        stack = [self._root]
        n = 0
        while stack:
            node = stack.pop()
            n += 1
            if limit is not None and n > limit:
                return n
            stack.extend(child for child, _ in self.expand(node))
        return n


def make_tree(spec: TreeSpec) -> TreeProblem:
    if not isinstance(spec, TreeSpec):
        raise ConfigurationError("make_tree expects a TreeSpec")
    return TreeProblem(spec)


def expected_same_cost_children(spec: TreeSpec) -> float:
    """Expected number of zero-cost children per node, ``b * p0``."""
    return float(spec.branching.mean) * spec.edge_cost.p0


# --------------------------------------------------------------------------
# phase-transition sweep
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GrowthCell:
    p0: float
    depth: int
    bfs_mean: Optional[float]
    dfbnb_mean: Optional[float]
    trials: int
    truncated: bool


@dataclass(frozen=True)
class GrowthTable:
    branching: int
    cells: Tuple[GrowthCell, ...]

    def series(self, p0: float, algorithm: str = "bfs"):
        """``(depths, means)`` for one p0, skipping truncated cells."""
        attr = {"bfs": "bfs_mean", "dfbnb": "dfbnb_mean"}[algorithm]
        rows = [(c.depth, getattr(c, attr)) for c in self.cells
                if c.p0 == p0 and not c.truncated]
        return [d for d, _ in rows], [m for _, m in rows]

    def to_csv(self) -> str:
        lines = ["b,p0,depth,bfs_mean,dfbnb_mean,trials,truncated"]
        for c in self.cells:
            fmt = lambda v: "" if v is None else f"{v:.6f}"
            lines.append(f"{self.branching},{c.p0:g},{c.depth},{fmt(c.bfs_mean)},"
                         f"{fmt(c.dfbnb_mean)},{c.trials},{int(c.truncated)}")
        return "\n".join(lines) + "\n"


def trial_seed(seed: int, *indices: int) -> int:
    key = check_seed(seed)
    for i in indices:
        key = child_key(key, i)
    return key


def sweep_phase_transition(b: int, p0_list: Sequence[float], d_list: Sequence[int],
                           trials: int, seed: int = 0, hi: int = 2**16 - 1,
                           budget: Optional[int] = 1_000_000) -> GrowthTable:
    """Mean nodes generated by BFS and DFBnB per ``(p0, d)`` cell.

    Trees have fixed branching ``b`` and edge costs that are 0 with
    probability ``p0`` and otherwise uniform on ``{1, ..., hi}``. A cell in
    which any run hits ``budget`` is flagged truncated and carries no means.
    """
    from .search import best_first_search, dfbnb

    if trials < 1:
        raise ConfigurationError("trials must be >= 1")
    branching = BranchingDistribution.fixed(b)
    cells = []
    for i, p0 in enumerate(p0_list):
        costs = EdgeCostDistribution.zero_inflated(p0, hi)
        for d in d_list:
            bfs_total = dfbnb_total = 0
            truncated = False
            for t in range(trials):
                tree = make_tree(TreeSpec(d, branching, costs, trial_seed(seed, i, d, t)))
                r1 = best_first_search(tree, budget)
                r2 = dfbnb(tree, budget=budget)
                if r1.truncated or r2.truncated:
                    truncated = True
                    break
                bfs_total += r1.nodes_generated
                dfbnb_total += r2.nodes_generated
            cells.append(GrowthCell(float(p0), int(d),
                                    None if truncated else bfs_total / trials,
                                    None if truncated else dfbnb_total / trials,
                                    trials, truncated))
    return GrowthTable(b, tuple(cells))


def growth_fits(depths: Sequence[int], means: Sequence[float]) -> dict:
    """Exponential and quadratic fits of mean node counts against depth.

    The exponential model is a line through ``log(mean)``; the quadratic is
    a degree-2 polynomial weighted by ``1 / mean``. Both residuals are
    relative, ``sum(((fit - mean) / mean) ** 2)``, so they compare directly.
    """
    import numpy as np

    d = np.asarray(depths, dtype=float)
    y = np.asarray(means, dtype=float)
    if len(d) < 4:
        raise ConfigurationError("need at least four depths to compare fits")
    slope, intercept = np.polyfit(d, np.log(y), 1)
    exp_fit = np.exp(intercept + slope * d)
    quad = np.polyfit(d, y, 2, w=1.0 / y)
    quad_fit = np.polyval(quad, d)
    return {
        "log_slope": float(slope),
        "exp_residual": float(np.sum(((exp_fit - y) / y) ** 2)),
        "quad_residual": float(np.sum(((quad_fit - y) / y) ** 2)),
        "quad_coefficients": tuple(float(c) for c in quad),
    }

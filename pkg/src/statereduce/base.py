"""Shared search abstractions: problems, results, anytime records, errors."""
from __future__ import annotations

import abc
import csv
import io
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable, List, Sequence, Tuple

from sklearn.base import BaseEstimator


class SearchError(Exception):
    """Base class for errors raised by this package."""


class ConfigurationError(SearchError, ValueError):
    pass


class InfeasibleError(SearchError):
    """A constrained subproblem admits no solution."""


class EstimationError(SearchError, ValueError):
    pass


class ResourceError(SearchError, MemoryError):
    """Raised when a search exceeds its memory cap."""


class ContractViolation(SearchError, AssertionError):
    pass


class IntegrityError(SearchError, ValueError):
    pass


class SearchProblem(abc.ABC):
    """A monotonic state-space tree.

    Subclasses expose the root state, an expansion into ``(child, increment)``
    pairs with ``increment >= 0``, a goal test, and the cost of a state in the
    original (unreduced) space. The cost a search assigns to a node is the
    sum of increments along its path, starting from :meth:`root_cost`.
    """

    @abc.abstractmethod
    def root(self) -> Any:
        ...

    @abc.abstractmethod
    def expand(self, state: Any) -> List[Tuple[Any, Any]]:
        ...

    @abc.abstractmethod
    def is_goal(self, state: Any) -> bool:
        ...

    @abc.abstractmethod
    def original_cost(self, state: Any) -> Any:
        ...

    def root_cost(self) -> Any:
        return self.original_cost(self.root())

    def describe(self, state: Any) -> Hashable:
        """Compact, comparable descriptor of a state (used in results and CSV)."""
        return state


@dataclass
class AnytimeRecord:
    """Incumbent stream: ``(nodes_generated, wall_time, original_cost)`` rows."""

    events: List[Tuple[int, float, Any]] = field(default_factory=list)

    def add(self, nodes: int, wall_time: float, cost) -> None:
        if self.events:
            last_nodes, _, last_cost = self.events[-1]
            if not cost < last_cost:
                return
            nodes = max(nodes, last_nodes)
        self.events.append((int(nodes), float(wall_time), cost))

    def best_at(self, nodes: int):
        """Best incumbent cost available after ``nodes`` generations, or None."""
        best = None
        for n, _, c in self.events:
            if n > nodes:
                break
            best = c
        return best

    @property
    def final_cost(self):
        return self.events[-1][2] if self.events else None

    def shifted(self, nodes_offset: int, time_offset: float = 0.0) -> "AnytimeRecord":
        return AnytimeRecord([(n + nodes_offset, t + time_offset, c) for n, t, c in self.events])

    def merge(self, other: "AnytimeRecord") -> None:
        for n, t, c in other.events:
            self.add(n, t, c)

    def to_rows(self, include_time: bool = True) -> List[Tuple]:
        if include_time:
            return [(n, f"{t:.6f}", c) for n, t, c in self.events]
        return [(n, c) for n, _, c in self.events]

    def to_csv(self, include_time: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["nodes_generated", "wall_time_seconds", "cost"] if include_time
                   else ["nodes_generated", "cost"])
        w.writerows(self.to_rows(include_time))
        return buf.getvalue()

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence]) -> "AnytimeRecord":
        rec = cls()
        for n, t, c in rows:
            rec.add(int(n), float(t), c)
        return rec


@dataclass
class SearchResult:
    """Outcome of one search run.

    ``best_cost``/``best_solution`` refer to the optimum of the space that was
    actually searched (which may be a reduced space); ``best_original_cost``
    is the cheapest goal found as measured in the original space, and is what
    the anytime record tracks.
    """

    best_cost: Any = None
    best_solution: Any = None
    best_original_cost: Any = None
    best_original_solution: Any = None
    solution_cost: Any = None
    nodes_generated: int = 0
    nodes_expanded: int = 0
    optimal_proven: bool = False
    truncated: bool = False
    peak_open: int = 0
    anytime: AnytimeRecord = field(default_factory=AnytimeRecord)
    iterations: List[dict] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.best_cost is not None


class SearchEstimator(BaseEstimator):
    """Estimator base for searches: ``fit(problem)`` stores ``result_``."""

    def fit(self, problem, y=None):
        raise NotImplementedError

    def _store(self, result: SearchResult):
        self.result_ = result
        self.best_cost_ = result.best_original_cost
        self.best_solution_ = result.best_original_solution
        self.nodes_generated_ = result.nodes_generated
        self.optimal_proven_ = result.optimal_proven
        self.anytime_ = result.anytime
        return self

    def predict(self, problem=None):
        """Best original-space cost found by the last fit."""
        from ._validation import check_is_fitted

        check_is_fitted(self, "result_")
        return self.best_cost_

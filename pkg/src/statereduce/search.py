"""Best-first search and depth-first branch-and-bound over a SearchProblem."""
from __future__ import annotations

import heapq
import math
import time
from operator import itemgetter
from typing import Optional

from .base import AnytimeRecord, ResourceError, SearchEstimator, SearchResult
from ._validation import check_budget, check_nonnegative, check_problem

INF = math.inf
_by_increment = itemgetter(1)


def best_first_search(problem, budget: Optional[int] = None,
                      memory_cap: Optional[int] = None) -> SearchResult:
    """Expand a minimum-cost open node until a goal is selected.

    Ties on cost go to the deeper node, then to the lexicographically smaller
    path of child indices. ``budget`` limits node generations; a truncated run
    has no incumbent, since BFS produces its first goal only at termination.
    """
    check_problem(problem)
    budget = check_budget(budget)
    start = time.perf_counter()
    is_goal, expand = problem.is_goal, problem.expand

    root = problem.root()
    generated, expanded = 1, 0
    heap = [(problem.root_cost(), 0, (), root)]
    peak = 1
    result = SearchResult()
    while heap:
        cost, negdepth, path, state = heapq.heappop(heap)
        if is_goal(state):
            orig = problem.original_cost(state)
            result.best_cost = cost
            result.best_solution = state
            result.best_original_cost = orig
            result.optimal_proven = True
            result.anytime.add(generated, time.perf_counter() - start, orig)
            break
        children = expand(state)
        if budget is not None and generated + len(children) > budget:
            result.truncated = True
            break
        generated += len(children)
        expanded += 1
        depth = negdepth - 1
        for i, (child, inc) in enumerate(children):
            heapq.heappush(heap, (cost + inc, depth, path + (i,), child))
        if len(heap) > peak:
            peak = len(heap)
            if memory_cap is not None and peak > memory_cap:
                raise ResourceError(f"open list exceeded {memory_cap} nodes")
    result.nodes_generated = generated
    result.nodes_expanded = expanded
    result.peak_open = peak
    return result


def _dfbnb_run(problem, bound=INF, original_bound=INF, budget=None, memory_cap=None,
               offset=0, start=None, record=None, original_of=None) -> SearchResult:
    """DFBnB core shared by the plain search and the iterative drivers.

    A node is pruned when its (searched-space) cost is ``>= bound`` or
    ``>= original_bound``. ``bound`` tightens to the best searched-space goal,
    ``original_bound`` to the best original-space goal; for unreduced
    problems the two coincide. Anytime events are stamped with ``offset`` plus
    this run's generation count.

    With ``original_of`` (state -> original-space node cost) a node is also
    pruned once its original cost reaches ``original_bound``; this is sound
    whenever original node costs are monotone along paths.
    """
    if start is None:
        start = time.perf_counter()
    if record is None:
        record = AnytimeRecord()
    is_goal, expand, original_cost = problem.is_goal, problem.expand, problem.original_cost

    result = SearchResult(anytime=record)
    u, U = bound, original_bound
    lim = min(u, U)
    generated, expanded, peak = 1, 0, 1
    stack = [(problem.root_cost(), problem.root())]
    pop, push = stack.pop, stack.append
    while stack:
        cost, state = pop()
        if cost >= lim:
            continue
        if original_of is not None and original_of(state) >= U:
            continue
        if is_goal(state):
            u = cost
            result.best_cost, result.best_solution = cost, state
            orig = original_cost(state)
            if orig < U:
                U = orig
                result.best_original_cost = orig
                result.best_original_solution = state
                record.add(offset + generated, time.perf_counter() - start, orig)
            lim = min(u, U)
            continue
        children = expand(state)
        n = len(children)
        if budget is not None and generated + n > budget:
            result.truncated = True
            break
        generated += n
        expanded += 1
        if n > 1:
            children.sort(key=_by_increment)
        for child, inc in reversed(children):
            c = cost + inc
            if c < lim:
                push((c, child))
        if len(stack) > peak:
            peak = len(stack)
            if memory_cap is not None and peak > memory_cap:
                raise ResourceError(f"open list exceeded {memory_cap} nodes")
    result.nodes_generated = generated
    result.nodes_expanded = expanded
    result.peak_open = peak
    result.optimal_proven = not result.truncated and result.best_cost is not None
    return result


def dfbnb(problem, initial_upper_bound=INF, budget: Optional[int] = None,
          memory_cap: Optional[int] = None) -> SearchResult:
    """Depth-first branch-and-bound.

    Children are visited in ascending order of cost increment (stable), and
    a node is pruned when its cost is ``>=`` the incumbent. Each improvement
    of the incumbent appends an anytime event.
    """
    check_problem(problem)
    check_nonnegative(initial_upper_bound, "initial_upper_bound", allow_inf=True)
    budget = check_budget(budget)
    return _dfbnb_run(problem, initial_upper_bound, initial_upper_bound, budget, memory_cap)


class BestFirstSearch(SearchEstimator):
    """Estimator wrapper around :func:`best_first_search`."""

    def __init__(self, budget=None, memory_cap=None):
        self.budget = budget
        self.memory_cap = memory_cap

    def fit(self, problem, y=None):
        return self._store(best_first_search(problem, self.budget, self.memory_cap))


class DFBnB(SearchEstimator):
    """Estimator wrapper around :func:`dfbnb`."""

    def __init__(self, initial_upper_bound=INF, budget=None, memory_cap=None):
        self.initial_upper_bound = initial_upper_bound
        self.budget = budget
        self.memory_cap = memory_cap

    def fit(self, problem, y=None):
        return self._store(dfbnb(problem, self.initial_upper_bound, self.budget, self.memory_cap))

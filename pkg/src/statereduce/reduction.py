"""Quantitative (epsilon) and structural (delta) state-space reduction.

Both reductions are wrappers that rewrite or filter the cost increments a
problem produces during expansion; the searches themselves are unchanged.
The iterative drivers chain reduced searches into anytime algorithms that
end with a provably optimal answer when given enough budget.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from operator import attrgetter, itemgetter
from typing import Optional

from sklearn.base import BaseEstimator, TransformerMixin

from .base import ConfigurationError, SearchEstimator, SearchProblem, SearchResult
from .sampling import OnlineSampler
from .search import INF, _dfbnb_run
from ._validation import (check_budget, check_is_fitted, check_nonnegative,
                          check_probability, check_problem)

_by_increment = itemgetter(1)
_original_of = attrgetter("original_cost")


@dataclass(frozen=True)
class EpsilonPolicy:
    epsilon: float = 0

    def __post_init__(self):
        check_nonnegative(self.epsilon, "epsilon")


@dataclass(frozen=True)
class DeltaPolicy:
    delta: float = INF
    rescue_min_child: bool = True

    def __post_init__(self):
        check_nonnegative(self.delta, "delta", allow_inf=True)


class ReducedNodeState:
    __slots__ = ("inner", "reduced_cost", "original_cost")

    def __init__(self, inner, reduced_cost, original_cost):
        self.inner = inner
        self.reduced_cost = reduced_cost
        self.original_cost = original_cost

    def __repr__(self):
        return (f"ReducedNodeState(reduced_cost={self.reduced_cost!r}, "
                f"original_cost={self.original_cost!r})")


class _ReducedProblem(SearchProblem):
    def __init__(self, problem, observe=None):
        self.problem = check_problem(problem)
        self.observe = observe
        c0 = problem.root_cost()
        self._root = ReducedNodeState(problem.root(), c0, c0)

    def root(self):
        return self._root

    def root_cost(self):
        return self._root.reduced_cost

    def is_goal(self, state):
        return self.problem.is_goal(state.inner)

    def original_cost(self, state):
        return self.problem.original_cost(state.inner)

    def describe(self, state):
        return self.problem.describe(state.inner)

    def _children(self, state):
        kids = self.problem.expand(state.inner)
        if self.observe is not None and kids:
            self.observe[0].extend(g for _, g in kids)
            self.observe[1].append(len(kids))
        return kids


class EpsilonReducedProblem(_ReducedProblem):
    """Searches the epsilon-tree: increments ``<= epsilon`` become zero.

    Children are returned ordered by their original increment, so a stable
    sort on the reduced increment still prefers the cheaper original edge.
    ``zeroed`` counts the positive increments that were rewritten.
    """

    def __init__(self, problem, epsilon, observe=None):
        super().__init__(problem, observe)
        self.epsilon = epsilon
        self.zeroed = 0

    def expand(self, state):
        kids = self._children(state)
        if len(kids) > 1:
            kids = sorted(kids, key=_by_increment)
        eps = self.epsilon
        rc, oc = state.reduced_cost, state.original_cost
        out = []
        for child, g in kids:
            if g <= eps:
                if g > 0:
                    self.zeroed += 1
                out.append((ReducedNodeState(child, rc, oc + g), 0))
            else:
                out.append((ReducedNodeState(child, rc + g, oc + g), g))
        return out


class DeltaReducedProblem(_ReducedProblem):
    """Searches the delta-tree: children with increment ``> delta`` are cut.

    When every child of a node would be cut and ``rescue`` is on, the child
    with the smallest increment (first on ties) is kept. ``pruned`` counts
    cut children and ``min_pruned_cost`` is the cheapest node cost cut.
    """

    def __init__(self, problem, delta, rescue=True, observe=None):
        super().__init__(problem, observe)
        self.delta = delta
        self.rescue = rescue
        self.pruned = 0
        self.min_pruned_cost = INF

    def expand(self, state):
        kids = self._children(state)
        delta = self.delta
        oc = state.original_cost
        keep = [(c, g) for c, g in kids if g <= delta]
        if len(keep) < len(kids):
            if not keep and self.rescue:
                keep = [min(kids, key=_by_increment)]
            self.pruned += len(kids) - len(keep)
            kept = {id(c) for c, _ in keep}
            for c, g in kids:
                if id(c) not in kept and oc + g < self.min_pruned_cost:
                    self.min_pruned_cost = oc + g
        return [(ReducedNodeState(c, oc + g, oc + g), g) for c, g in keep]


def epsilon_wrap(problem, policy) -> EpsilonReducedProblem:
    if not isinstance(policy, EpsilonPolicy):
        policy = EpsilonPolicy(policy)
    return EpsilonReducedProblem(problem, policy.epsilon)


def delta_wrap(problem, policy) -> DeltaReducedProblem:
    if not isinstance(policy, DeltaPolicy):
        policy = DeltaPolicy(policy)
    return DeltaReducedProblem(problem, policy.delta, policy.rescue_min_child)


def epsilon_dfbnb(problem, epsilon, budget: Optional[int] = None) -> SearchResult:
    """DFBnB on the epsilon-tree.

    ``best_solution`` is the optimal goal of the reduced space and
    ``best_cost`` its reduced cost; ``solution_cost`` on the returned result
    is that goal's cost in the original space.
    """
    wrapped = epsilon_wrap(problem, epsilon)
    result = _dfbnb_run(wrapped, INF, INF, check_budget(budget))
    result.solution_cost = (wrapped.original_cost(result.best_solution)
                            if result.best_solution is not None else None)
    return result


def _start_from_dive(problem, sampler, budget):
    if sampler is None:
        sampler = OnlineSampler(budget=budget)
    if not hasattr(sampler, "sample_"):
        sampler.fit(problem)
    sample = sampler.sample_
    result = SearchResult(anytime=sampler.dive_record())
    result.best_original_cost = sample.first_goal_original_cost
    result.best_original_solution = sample.first_goal
    result.nodes_generated = sample.nodes_generated
    return sampler, result


def _absorb(total: SearchResult, run: SearchResult):
    total.nodes_generated += run.nodes_generated
    total.nodes_expanded += run.nodes_expanded
    total.peak_open = max(total.peak_open, run.peak_open)
    if run.best_original_cost is not None and (
            total.best_original_cost is None or run.best_original_cost < total.best_original_cost):
        total.best_original_cost = run.best_original_cost
        total.best_original_solution = run.best_original_solution


def _finish(total: SearchResult):
    total.best_cost = total.best_original_cost
    total.best_solution = total.best_original_solution
    return total


def _remaining(budget, used):
    return None if budget is None else budget - used


def iterative_epsilon_dfbnb(problem, sampler=None, budget: Optional[int] = None,
                            halving: float = 2.0, max_iterations: Optional[int] = None,
                            prune_on_original: bool = True) -> SearchResult:
    """Anytime DFBnB over a shrinking sequence of epsilon-trees.

    The first iteration uses epsilon* learned from the first dive, each later
    one divides epsilon by ``halving``. Nodes are pruned when their reduced
    cost reaches the best original cost found so far, and, with
    ``prune_on_original``, also when their original cost does. The run is
    proven optimal after an iteration in which no increment was zeroed.
    """
    check_problem(problem)
    budget = check_budget(budget)
    if not halving > 1:
        raise ConfigurationError("halving factor must be > 1")
    start = time.perf_counter()
    sampler, total = _start_from_dive(problem, sampler, budget)
    if not sampler.sample_.child_counts:
        total.optimal_proven = True
        return _finish(total)
    record = total.anytime
    eps = sampler.epsilon_star_
    k = 0
    while True:
        remaining = _remaining(budget, total.nodes_generated)
        if remaining is not None and remaining < 1:
            total.truncated = True
            break
        k += 1
        observe = ([], []) if sampler.reestimate else None
        wrapped = EpsilonReducedProblem(problem, eps, observe)
        U = total.best_original_cost if total.best_original_cost is not None else INF
        run = _dfbnb_run(wrapped, INF, U, remaining, offset=total.nodes_generated,
                         start=start, record=record,
                         original_of=_original_of if prune_on_original else None)
        _absorb(total, run)
        total.iterations.append({"iteration": k, "parameter": eps, "nodes": run.nodes_generated,
                                 "incumbent": total.best_original_cost, "reductions": wrapped.zeroed})
        if run.truncated:
            total.truncated = True
            break
        if wrapped.zeroed == 0:
            total.optimal_proven = total.best_original_cost is not None
            break
        if max_iterations is not None and k >= max_iterations:
            break
        if observe is not None:
            sampler.update(*observe)
        eps = eps / halving
    return _finish(total)


def iterative_delta_dfbnb(problem, sampler=None, budget: Optional[int] = None,
                          quantile_step: float = 0.1, rescue_min_child: bool = True) -> SearchResult:
    """Anytime DFBnB over a growing sequence of delta-trees.

    Iteration ``k`` cuts increments above the empirical ``k * quantile_step``
    quantile of the sampled increments, bounded by the incumbent from earlier
    iterations. It stops as proven optimal once an iteration cut nothing that
    could still have improved the incumbent. Once the quantile passes 1, a
    final unreduced pass settles optimality.
    """
    check_problem(problem)
    budget = check_budget(budget)
    quantile_step = check_probability(quantile_step, "quantile_step")
    start = time.perf_counter()
    sampler, total = _start_from_dive(problem, sampler, budget)
    if not sampler.sample_.child_counts:
        total.optimal_proven = True
        return _finish(total)
    record = total.anytime
    k = 0
    while True:
        remaining = _remaining(budget, total.nodes_generated)
        if remaining is not None and remaining < 1:
            total.truncated = True
            break
        k += 1
        p = round(k * quantile_step, 12)
        delta = sampler.delta_at_quantile(p) if p <= 1 else INF
        observe = ([], []) if sampler.reestimate else None
        wrapped = DeltaReducedProblem(problem, delta, rescue_min_child, observe)
        U = total.best_original_cost if total.best_original_cost is not None else INF
        run = _dfbnb_run(wrapped, INF, U, remaining, offset=total.nodes_generated,
                         start=start, record=record)
        _absorb(total, run)
        U = total.best_original_cost if total.best_original_cost is not None else INF
        total.iterations.append({"iteration": k, "parameter": delta, "nodes": run.nodes_generated,
                                 "incumbent": total.best_original_cost, "reductions": wrapped.pruned})
        if run.truncated:
            total.truncated = True
            break
        # a cut child costing >= the final incumbent could not have improved it
        if wrapped.min_pruned_cost >= U:
            total.optimal_proven = total.best_original_cost is not None
            break
        if observe is not None:
            sampler.update(*observe)
    return _finish(total)


def iterations_csv(result: SearchResult) -> str:
    import csv
    import io

    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=["iteration", "parameter", "nodes", "incumbent", "reductions"],
                       lineterminator="\n")
    w.writeheader()
    w.writerows(result.iterations)
    return buf.getvalue()


# --------------------------------------------------------------------------
# estimator front-ends
# --------------------------------------------------------------------------

class EpsilonReduction(TransformerMixin, BaseEstimator):
    """Quantitative reduction as a transformer.

    ``epsilon="auto"`` learns epsilon* from the problem's first dive during
    ``fit``; a number is used as given. ``transform(problem)`` returns the
    wrapped problem.
    """

    def __init__(self, epsilon="auto", scale=1.0):
        self.epsilon = epsilon
        self.scale = scale

    def fit(self, problem, y=None):
        check_problem(problem)
        if self.epsilon == "auto":
            self.sampler_ = OnlineSampler().fit(problem)
            self.epsilon_ = self.sampler_.epsilon_star_ * self.scale
        else:
            self.epsilon_ = check_nonnegative(self.epsilon, "epsilon") * self.scale
        return self

    def transform(self, problem):
        check_is_fitted(self, "epsilon_")
        return epsilon_wrap(problem, self.epsilon_)


class DeltaReduction(TransformerMixin, BaseEstimator):
    """Structural reduction as a transformer.

    With ``delta=None`` the cut-off is the empirical ``quantile`` of the
    increments seen on the first dive.
    """

    def __init__(self, delta=None, quantile=0.1, rescue_min_child=True):
        self.delta = delta
        self.quantile = quantile
        self.rescue_min_child = rescue_min_child

    def fit(self, problem, y=None):
        check_problem(problem)
        if self.delta is None:
            self.sampler_ = OnlineSampler().fit(problem)
            self.delta_ = self.sampler_.delta_at_quantile(self.quantile)
        else:
            self.delta_ = check_nonnegative(self.delta, "delta", allow_inf=True)
        return self

    def transform(self, problem):
        check_is_fitted(self, "delta_")
        return delta_wrap(problem, DeltaPolicy(self.delta_, self.rescue_min_child))


class EpsilonDFBnB(SearchEstimator):
    def __init__(self, epsilon="auto", budget=None):
        self.epsilon = epsilon
        self.budget = budget

    def fit(self, problem, y=None):
        eps = self.epsilon
        if eps == "auto":
            eps = OnlineSampler().fit(problem).epsilon_star_
        self.epsilon_ = eps
        self._store(epsilon_dfbnb(problem, eps, self.budget))
        self.best_cost_ = self.result_.solution_cost
        return self


class IterativeEpsilonDFBnB(SearchEstimator):
    def __init__(self, budget=None, halving=2.0, reestimate=False):
        self.budget = budget
        self.halving = halving
        self.reestimate = reestimate

    def fit(self, problem, y=None):
        sampler = OnlineSampler(budget=self.budget, reestimate=self.reestimate)
        return self._store(iterative_epsilon_dfbnb(problem, sampler, self.budget, self.halving))


class IterativeDeltaDFBnB(SearchEstimator):
    def __init__(self, budget=None, quantile_step=0.1, rescue_min_child=True, reestimate=False):
        self.budget = budget
        self.quantile_step = quantile_step
        self.rescue_min_child = rescue_min_child
        self.reestimate = reestimate

    def fit(self, problem, y=None):
        sampler = OnlineSampler(budget=self.budget, reestimate=self.reestimate)
        return self._store(iterative_delta_dfbnb(problem, sampler, self.budget,
                                                 self.quantile_step, self.rescue_min_child))

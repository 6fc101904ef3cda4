"""Online estimation of branching factor and increment distribution.

The estimates come from the search's own first dive: every node generated
on the way to the first goal contributes its cost increment, and every
expanded node its child count.
"""
from __future__ import annotations

import csv
import io
import math
import time
from bisect import bisect_right
from dataclasses import dataclass, field
from operator import itemgetter
from typing import Any, List, Optional

from sklearn.base import BaseEstimator

from .base import AnytimeRecord, EstimationError
from ._validation import check_budget, check_is_fitted, check_probability, check_problem


@dataclass
class OnlineSample:
    increments: List = field(default_factory=list)
    child_counts: List[int] = field(default_factory=list)
    sealed: bool = False
    nodes_generated: int = 0
    first_goal: Any = None
    first_goal_cost: Any = None
    first_goal_original_cost: Any = None
    wall_time: float = 0.0
    _sorted: Optional[list] = field(default=None, repr=False, compare=False)

    def _require_sealed(self):
        if not self.sealed:
            raise EstimationError("sample is not sealed: no goal was reached")
        if not self.increments or not self.child_counts:
            raise EstimationError("sample is empty")

    @property
    def sorted_increments(self) -> list:
        if self._sorted is None or len(self._sorted) != len(self.increments):
            self._sorted = sorted(self.increments)
        return self._sorted

    @property
    def branching_factor(self) -> float:
        self._require_sealed()
        return sum(self.child_counts) / len(self.child_counts)

    def ecdf(self, x) -> float:
        xs = self.sorted_increments
        return bisect_right(xs, x) / len(xs) if xs else 0.0

    def pooled(self, increments, child_counts) -> "OnlineSample":
        """New sealed sample with extra observations added."""
        return OnlineSample(list(self.increments) + list(increments),
                            list(self.child_counts) + list(child_counts),
                            sealed=self.sealed, nodes_generated=self.nodes_generated,
                            first_goal=self.first_goal, first_goal_cost=self.first_goal_cost,
                            first_goal_original_cost=self.first_goal_original_cost)


@dataclass(frozen=True)
class EpsilonStar:
    value: Any
    lambda_hat: float
    b_hat: float
    n_samples: int
    reached_boundary: bool = True


def collect_first_dive(problem, budget: Optional[int] = None) -> OnlineSample:
    """Run DFBnB's initial descent and record what it generates.

    Children are visited in ascending increment order. Deadends are
    backtracked over exactly as DFBnB would; the sample seals when the first
    goal is selected. Raises :class:`EstimationError` when no goal is reached
    within ``budget`` node generations.
    """
    check_problem(problem)
    budget = check_budget(budget)
    start = time.perf_counter()
    sample = OnlineSample()
    generated = 1
    stack = [(problem.root_cost(), problem.root())]
    while stack:
        cost, state = stack.pop()
        if problem.is_goal(state):
            sample.sealed = True
            sample.first_goal = state
            sample.first_goal_cost = cost
            sample.first_goal_original_cost = problem.original_cost(state)
            break
        children = problem.expand(state)
        if budget is not None and generated + len(children) > budget:
            break
        generated += len(children)
        sample.child_counts.append(len(children))
        sample.increments.extend(inc for _, inc in children)
        children.sort(key=itemgetter(1))
        for child, inc in reversed(children):
            stack.append((cost + inc, child))
    sample.nodes_generated = generated
    sample.wall_time = time.perf_counter() - start
    if not sample.sealed:
        raise EstimationError(f"no goal reached within {generated} node generations")
    return sample


def epsilon_star(sample: OnlineSample) -> EpsilonStar:
    """Smallest sampled increment ``e`` with ``b_hat * F_hat(e) >= 1``.

    Falls back to the largest sampled increment when the boundary cannot be
    reached (``b_hat < 1``).
    """
    sample._require_sealed()
    xs = sample.sorted_increments
    n = len(xs)
    total_children, n_expanded = sum(sample.child_counts), len(sample.child_counts)
    # b_hat * k/n >= 1  <=>  total_children * k >= n_expanded * n  (exact)
    k_min = -(-(n_expanded * n) // total_children) if total_children else n + 1
    if k_min <= n:
        value = xs[k_min - 1]
        reached = True
    else:
        value = xs[-1]
        reached = False
    below = xs[:bisect_right(xs, value)]
    lam = math.fsum(below) / len(below)
    return EpsilonStar(value, lam, total_children / n_expanded, n, reached)


def delta_at_quantile(sample: OnlineSample, p: float):
    """Smallest sampled increment ``q`` with ``F_hat(q) >= p``."""
    p = check_probability(p)
    sample._require_sealed()
    xs = sample.sorted_increments
    k = max(1, math.ceil(p * len(xs) - 1e-9))
    return xs[min(k, len(xs)) - 1]


def summarize(sample: OnlineSample, quantiles=(0.1, 0.25, 0.5, 0.75, 0.9, 1.0)) -> dict:
    est = epsilon_star(sample)
    row = {"b_hat": est.b_hat, "sample_size": est.n_samples,
           "epsilon_star": est.value, "lambda_hat": est.lambda_hat,
           "dive_nodes": sample.nodes_generated}
    for q in quantiles:
        row[f"q{q:g}"] = delta_at_quantile(sample, q)
    return row


def summary_csv(rows: List[dict]) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return buf.getvalue()


class OnlineSampler(BaseEstimator):
    """Estimator that learns increment statistics from a problem's first dive.

    After ``fit(problem)``: ``sample_``, ``epsilon_star_``, ``lambda_hat_``,
    ``b_hat_``. With ``reestimate=True`` the iterative drivers pool increments
    observed in each iteration into the sample between iterations.
    """

    def __init__(self, budget=None, reestimate=False):
        self.budget = budget
        self.reestimate = reestimate

    def fit(self, problem, y=None):
        self.sample_ = collect_first_dive(problem, self.budget)
        self._refresh()
        return self

    def _refresh(self):
        if not self.sample_.child_counts:
            # the root itself is a goal: nothing to estimate
            self.epsilon_star_, self.lambda_hat_, self.b_hat_, self.estimate_ = 0, 0.0, 0.0, None
            return
        est = epsilon_star(self.sample_)
        self.epsilon_star_ = est.value
        self.lambda_hat_ = est.lambda_hat
        self.b_hat_ = est.b_hat
        self.estimate_ = est

    def delta_at_quantile(self, p):
        check_is_fitted(self, "sample_")
        return delta_at_quantile(self.sample_, p)

    def update(self, increments, child_counts):
        check_is_fitted(self, "sample_")
        if self.reestimate and increments:
            self.sample_ = self.sample_.pooled(increments, child_counts)
            self._refresh()
        return self

    def dive_record(self, start=None) -> AnytimeRecord:
        """Anytime record holding the dive's goal as its single event."""
        check_is_fitted(self, "sample_")
        rec = AnytimeRecord()
        rec.add(self.sample_.nodes_generated, self.sample_.wall_time,
                self.sample_.first_goal_original_cost)
        return rec

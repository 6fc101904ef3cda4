"""Anytime performance profiles: ``prof = 1 - (cost - opt) / opt`` over a budget grid."""
from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .base import AnytimeRecord, ConfigurationError, IntegrityError

#: marker for "no incumbent yet" at a budget
UNDEFINED = None


@dataclass(frozen=True)
class PerformanceProfile:
    points: Tuple[Tuple[float, Optional[float]], ...]
    optimum: float

    @property
    def budgets(self) -> Tuple[float, ...]:
        return tuple(b for b, _ in self.points)

    @property
    def values(self) -> Tuple[Optional[float], ...]:
        return tuple(v for _, v in self.points)

    def at(self, budget) -> Optional[float]:
        best = UNDEFINED
        for b, v in self.points:
            if b > budget:
                break
            best = v
        return best


def relative_error(cost, optimum, guard: bool = False) -> float:
    """``(cost - opt) / opt``; with ``guard`` the denominator is ``max(opt, 1)``."""
    denom = max(optimum, 1) if guard else optimum
    if denom == 0:
        return 0.0 if cost == optimum else math.inf
    return (cost - optimum) / denom


def profile_from_record(record: AnytimeRecord, optimum, budgets: Sequence,
                        guard: bool = False, axis: str = "nodes") -> PerformanceProfile:
    """Profile of one run at each budget.

    ``axis`` picks the budget unit: ``"nodes"`` (generations) or ``"time"``
    (seconds). Budgets with no incumbent yet get :data:`UNDEFINED`.
    """
    if axis not in ("nodes", "time"):
        raise ConfigurationError(f"axis must be 'nodes' or 'time', got {axis!r}")
    budgets = list(budgets)
    if any(b2 < b1 for b1, b2 in zip(budgets, budgets[1:])):
        raise ConfigurationError("budgets must be ascending")
    if not guard and optimum <= 0:
        raise ConfigurationError("optimum must be positive unless the guard is enabled")
    col = 0 if axis == "nodes" else 1
    events = sorted(record.events, key=lambda e: e[col])
    for e in events:
        if e[2] < optimum:
            raise IntegrityError(f"incumbent cost {e[2]} is below the optimum {optimum}")
    points, i, best = [], 0, None
    for b in budgets:
        while i < len(events) and events[i][col] <= b:
            c = events[i][2]
            best = c if best is None or c < best else best
            i += 1
        points.append((b, UNDEFINED if best is None else 1.0 - relative_error(best, optimum, guard)))
    return PerformanceProfile(tuple(points), optimum)


@dataclass(frozen=True)
class AggregateProfile:
    budgets: Tuple
    mean: Tuple[Optional[float], ...]
    n_defined: Tuple[int, ...]
    n_runs: int

    def rows(self, algorithm="", domain="", config_hash=""):
        for b, m, k in zip(self.budgets, self.mean, self.n_defined):
            yield {"budget": b, "mean_profile": "" if m is None else f"{m:.12g}",
                   "n_defined": k, "algorithm": algorithm, "domain": domain,
                   "config_hash": config_hash}


def aggregate_profiles(profiles: Sequence[PerformanceProfile]) -> AggregateProfile:
    """Pointwise mean over runs with an incumbent; counts reported per budget.

    Values are summed with :func:`math.fsum`, so the mean does not depend on
    the order of ``profiles``.
    """
    profiles = list(profiles)
    if not profiles:
        raise ConfigurationError("no profiles to aggregate")
    budgets = profiles[0].budgets
    if any(p.budgets != budgets for p in profiles):
        raise ConfigurationError("profiles must share one budget grid")
    means, counts = [], []
    for j in range(len(budgets)):
        vals = [p.points[j][1] for p in profiles if p.points[j][1] is not UNDEFINED]
        counts.append(len(vals))
        means.append(math.fsum(vals) / len(vals) if vals else None)
    return AggregateProfile(tuple(budgets), tuple(means), tuple(counts), len(profiles))


def budget_grid(max_budget, points: int = 20, integer: bool = True) -> List:
    """``points`` evenly spaced budgets from ``max_budget/points`` to ``max_budget``."""
    if points < 1 or not max_budget > 0:
        raise ConfigurationError("need a positive budget and at least one grid point")
    grid = np.linspace(max_budget / points, max_budget, points)
    if integer:
        return sorted({max(1, int(math.ceil(g))) for g in grid})
    return [float(g) for g in grid]


def config_hash(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:12]


PROFILE_COLUMNS = ["budget", "mean_profile", "n_defined", "algorithm", "domain", "config_hash"]


def profiles_csv(entries) -> str:
    """CSV for ``(aggregate, algorithm, domain, config_hash)`` tuples."""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=PROFILE_COLUMNS, lineterminator="\n")
    w.writeheader()
    for agg, algorithm, domain, chash in entries:
        w.writerows(agg.rows(algorithm, domain, chash))
    return buf.getvalue()


def dominance(a: AggregateProfile, b: AggregateProfile, tol: float = 1e-12):
    """``(a >= b everywhere, fraction of budgets where a > b)``; undefined counts as -inf."""
    if a.budgets != b.budgets:
        raise ConfigurationError("profiles must share one budget grid")
    ge, gt = True, 0
    for x, y in zip(a.mean, b.mean):
        x = -math.inf if x is None else x
        y = -math.inf if y is None else y
        if x < y - tol:
            ge = False
        if x > y + tol:
            gt += 1
    return ge, gt / len(a.budgets)

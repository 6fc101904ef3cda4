"""Input validation helpers shared by the estimators."""
from __future__ import annotations

import math
import numbers

from sklearn.exceptions import NotFittedError

from .base import ConfigurationError, SearchProblem


def check_problem(problem) -> SearchProblem:
    if not isinstance(problem, SearchProblem):
        for name in ("root", "expand", "is_goal", "original_cost"):
            if not callable(getattr(problem, name, None)):
                raise ConfigurationError(
                    f"expected a SearchProblem, got {type(problem).__name__} without {name}()")
    return problem


def check_budget(budget, name="budget"):
    if budget is None:
        return None
    if isinstance(budget, bool) or not isinstance(budget, numbers.Integral):
        if isinstance(budget, float) and math.isinf(budget) and budget > 0:
            return None
        raise ConfigurationError(f"{name} must be a positive integer or None, got {budget!r}")
    if budget < 1:
        raise ConfigurationError(f"{name} must be >= 1, got {budget}")
    return int(budget)


def check_nonnegative(value, name, allow_inf=False):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigurationError(f"{name} must be a real number, got {value!r}")
    if math.isnan(value) or value < 0:
        raise ConfigurationError(f"{name} must be >= 0, got {value}")
    if math.isinf(value) and not allow_inf:
        raise ConfigurationError(f"{name} must be finite")
    return value


def check_probability(p, name="p", allow_zero=False):
    if isinstance(p, bool) or not isinstance(p, numbers.Real) or math.isnan(p):
        raise ConfigurationError(f"{name} must be a probability, got {p!r}")
    lo_ok = p >= 0 if allow_zero else p > 0
    if not lo_ok or p > 1:
        raise ConfigurationError(f"{name} out of range: {p}")
    return float(p)


def check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, numbers.Integral):
        raise ConfigurationError(f"seed must be an integer, got {seed!r}")
    if seed < 0 or seed >= 2**64:
        raise ConfigurationError("seed must fit in an unsigned 64-bit integer")
    return int(seed)


def check_is_fitted(estimator, attribute):
    if not hasattr(estimator, attribute):
        raise NotFittedError(
            f"This {type(estimator).__name__} instance is not fitted yet; call fit() first.")

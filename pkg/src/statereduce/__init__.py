"""Anytime tree search by state-space reduction.

Depth-first branch-and-bound run on simplified versions of a search space:
zeroing small cost increments (epsilon) or cutting large ones (delta), with
both parameters learned from the search's own first dive.
"""
from .base import (AnytimeRecord, ConfigurationError, ContractViolation, EstimationError,
                   InfeasibleError, IntegrityError, ResourceError, SearchError, SearchProblem,
                   SearchResult)
from .search import BestFirstSearch, DFBnB, best_first_search, dfbnb
from .reduction import (DeltaPolicy, DeltaReduction, EpsilonDFBnB, EpsilonPolicy,
                        EpsilonReduction, IterativeDeltaDFBnB, IterativeEpsilonDFBnB,
                        delta_wrap, epsilon_dfbnb, epsilon_wrap, iterative_delta_dfbnb,
                        iterative_epsilon_dfbnb)
from .sampling import OnlineSampler, collect_first_dive, delta_at_quantile, epsilon_star
from .tree import (BranchingDistribution, EdgeCostDistribution, TreeSpec,
                   expected_same_cost_children, make_tree, sweep_phase_transition)
from .profiling import PerformanceProfile, aggregate_profiles, profile_from_record

__version__ = "0.1.0"

__all__ = [
    "AnytimeRecord", "ConfigurationError", "ContractViolation", "EstimationError",
    "InfeasibleError", "IntegrityError", "ResourceError", "SearchError", "SearchProblem",
    "SearchResult", "BestFirstSearch", "DFBnB", "best_first_search", "dfbnb",
    "DeltaPolicy", "DeltaReduction", "EpsilonDFBnB", "EpsilonPolicy", "EpsilonReduction",
    "IterativeDeltaDFBnB", "IterativeEpsilonDFBnB", "delta_wrap", "epsilon_dfbnb",
    "epsilon_wrap", "iterative_delta_dfbnb", "iterative_epsilon_dfbnb", "OnlineSampler",
    "collect_first_dive", "delta_at_quantile", "epsilon_star", "BranchingDistribution",
    "EdgeCostDistribution", "TreeSpec", "expected_same_cost_children", "make_tree",
    "sweep_phase_transition", "PerformanceProfile", "aggregate_profiles",
    "profile_from_record",
]

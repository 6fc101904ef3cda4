import math

import pytest
from hypothesis import given, settings, strategies as st
from sklearn.exceptions import NotFittedError

from statereduce.base import ConfigurationError, EstimationError
from statereduce.sampling import (OnlineSample, OnlineSampler, collect_first_dive, delta_at_quantile,
                                  epsilon_star, summarize, summary_csv)
from statereduce.search import dfbnb
from statereduce.tree import make_tree

from conftest import ExplicitTree, tree_spec


def sample(increments, child_counts):
    return OnlineSample(list(increments), list(child_counts), sealed=True)


def test_binary_dive_counts():
    tree = make_tree(tree_spec(3, "fixed:2", "uniform:0:9", 11))
    s = collect_first_dive(tree)
    assert len(s.increments) == 6 and s.child_counts == [2, 2, 2]
    assert s.nodes_generated == 7 and s.branching_factor == 2
    # the dive's goal is DFBnB's first incumbent
    first = dfbnb(tree).anytime.events[0]
    assert (first[0], first[2]) == (7, s.first_goal_original_cost)


def test_dive_follows_cheapest_child():
    t = ExplicitTree([(0, [(1, [(0, []), (0, [])])]), (5, [])])
    s = collect_first_dive(t)
    assert s.first_goal == (0, 0, 0)
    assert s.child_counts == [2, 1, 2]


def test_dive_budget_exhausted():
    tree = make_tree(tree_spec(6, "fixed:3", "uniform:0:9", 0))
    with pytest.raises(EstimationError):
        collect_first_dive(tree, budget=5)


def test_epsilon_star_examples():
    assert epsilon_star(sample([0, 1, 2, 3], [4])).value == 0
    assert epsilon_star(sample([3, 0, 2, 1], [1, 1, 1, 1])).value == 3
    est = epsilon_star(sample([0, 1, 2, 3], [2, 2]))
    assert est.value == 1 and est.b_hat == 2 and est.lambda_hat == 0.5 and est.reached_boundary
    low = epsilon_star(sample([1, 2], [1, 0, 1]))
    assert not low.reached_boundary and low.value == 2


def test_epsilon_star_for_single_path_is_max():
    s = collect_first_dive(ExplicitTree([(4, [(1, [(7, [])])])]))
    assert s.branching_factor == 1
    assert epsilon_star(s).value == 7


def test_quantile_examples():
    s = sample(range(1, 11), [2] * 5)
    assert delta_at_quantile(s, 0.1) == 1
    assert delta_at_quantile(s, 0.55) == 6
    assert delta_at_quantile(s, 1.0) == 10
    for p in (0.0, -0.1, 1.1, math.nan):
        with pytest.raises(ConfigurationError):
            delta_at_quantile(s, p)


def test_unsealed_or_empty_sample_raises():
    with pytest.raises(EstimationError):
        epsilon_star(OnlineSample([1], [1], sealed=False))
    with pytest.raises(EstimationError):
        epsilon_star(sample([], []))


increment_lists = st.lists(st.integers(0, 50), min_size=1, max_size=60)


@settings(max_examples=200, deadline=None)
@given(xs=increment_lists, b=st.integers(1, 6))
def test_epsilon_star_is_minimal(xs, b):
    counts = [b] * (len(xs) // b) + ([len(xs) % b] if len(xs) % b else [])
    s = sample(xs, counts)
    est = epsilon_star(s)
    assert est.value in xs
    assert est.lambda_hat <= est.value
    if est.reached_boundary:
        assert est.b_hat * s.ecdf(est.value) >= 1 - 1e-12
        smaller = [x for x in xs if x < est.value]
        assert all(est.b_hat * s.ecdf(x) < 1 for x in smaller)


@settings(max_examples=200, deadline=None)
@given(xs=increment_lists, p=st.floats(0, 1, exclude_min=True))
def test_quantile_is_minimal(xs, p):
    s = sample(xs, [len(xs)])
    q = delta_at_quantile(s, p)
    assert q in xs and s.ecdf(q) >= p - 1e-9
    assert all(s.ecdf(x) < p - 1e-9 for x in xs if x < q)


@settings(max_examples=100, deadline=None)
@given(xs=increment_lists, p=st.floats(0, 1, exclude_min=True))
def test_large_increment_never_lowers_quantile_below(xs, p):
    # adding an increment above the current max can only move quantiles up
    s = sample(xs, [len(xs)])
    grown = sample(xs + [max(xs) + 1], [len(xs) + 1])
    assert delta_at_quantile(grown, p) >= delta_at_quantile(s, p)


def test_summary_csv():
    s = sample(range(1, 11), [2] * 5)
    row = summarize(s)
    assert row["epsilon_star"] == 5 and row["q0.1"] == 1 and row["q1"] == 10
    text = summary_csv([row, row])
    assert text.splitlines()[0].startswith("b_hat,sample_size,epsilon_star,lambda_hat,dive_nodes,q0.1")
    assert len(text.splitlines()) == 3
    assert summary_csv([]) == ""


def test_sampler_estimator():
    tree = make_tree(tree_spec(5, "fixed:3", "uniform:0:99", 2))
    with pytest.raises(NotFittedError):
        OnlineSampler().delta_at_quantile(0.5)
    sm = OnlineSampler().fit(tree)
    assert sm.b_hat_ == 3 and sm.epsilon_star_ == epsilon_star(sm.sample_).value
    n = len(sm.sample_.increments)
    sm.update([1, 2], [2])
    assert len(sm.sample_.increments) == n  # pooling is off by default
    sm.set_params(reestimate=True).update([1, 2], [2])
    assert len(sm.sample_.increments) == n + 2
    assert sm.dive_record().events[0][2] == sm.sample_.first_goal_original_cost


def test_sampler_root_goal():
    sm = OnlineSampler().fit(ExplicitTree([]))
    assert sm.epsilon_star_ == 0 and sm.estimate_ is None

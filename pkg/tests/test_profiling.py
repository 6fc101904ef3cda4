import math

import pytest
from hypothesis import given, settings, strategies as st

from statereduce.base import AnytimeRecord, ConfigurationError, IntegrityError
from statereduce.profiling import (PROFILE_COLUMNS, UNDEFINED, PerformanceProfile,
                                   aggregate_profiles, budget_grid, config_hash, dominance,
                                   profile_from_record, profiles_csv, relative_error)


def record(*events):
    rec = AnytimeRecord()
    for nodes, cost in events:
        rec.add(nodes, nodes / 1000, cost)
    return rec


def test_single_optimal_event():
    prof = profile_from_record(record((100, 40)), 40, [50, 100, 200])
    assert prof.values == (UNDEFINED, 1.0, 1.0)


def test_two_events():
    prof = profile_from_record(record((10, 80), (50, 40)), 40, [5, 10, 49, 50, 1000])
    assert prof.values == (UNDEFINED, 0.0, 0.0, 1.0, 1.0)
    assert prof.at(30) == 0.0 and prof.at(4) is UNDEFINED


def test_time_axis():
    prof = profile_from_record(record((10, 80), (50, 40)), 40, [0.02, 0.06], axis="time")
    assert prof.values == (0.0, 1.0)
    with pytest.raises(ConfigurationError):
        profile_from_record(record((10, 80)), 40, [1], axis="wall")


def test_cost_below_optimum_is_an_integrity_error():
    with pytest.raises(IntegrityError):
        profile_from_record(record((10, 39)), 40, [10])


def test_zero_optimum_needs_guard():
    with pytest.raises(ConfigurationError):
        profile_from_record(record((10, 3)), 0, [10])
    prof = profile_from_record(record((10, 3), (20, 0)), 0, [10, 20], guard=True)
    assert prof.values == (-2.0, 1.0)
    assert relative_error(5, 0) == math.inf and relative_error(0, 0) == 0.0


def test_budgets_must_ascend():
    with pytest.raises(ConfigurationError):
        profile_from_record(record((10, 40)), 40, [20, 10])


def test_aggregate_mean():
    a = PerformanceProfile(((1, 1.0), (2, 1.0)), 10)
    b = PerformanceProfile(((1, UNDEFINED), (2, 0.8)), 10)
    agg = aggregate_profiles([a, b])
    assert agg.mean == (1.0, pytest.approx(0.9))
    assert agg.n_defined == (1, 2) and agg.n_runs == 2
    none = aggregate_profiles([b])
    assert none.mean[0] is None


def test_aggregate_errors():
    with pytest.raises(ConfigurationError):
        aggregate_profiles([])
    with pytest.raises(ConfigurationError):
        aggregate_profiles([PerformanceProfile(((1, 1.0),), 1), PerformanceProfile(((2, 1.0),), 1)])


@settings(max_examples=100, deadline=None)
@given(vals=st.lists(st.lists(st.one_of(st.none(), st.floats(-5, 1)), min_size=3, max_size=3),
                     min_size=1, max_size=12), data=st.data())
def test_aggregate_is_permutation_invariant(vals, data):
    profs = [PerformanceProfile(tuple(zip((1, 2, 3), v)), 1) for v in vals]
    shuffled = data.draw(st.permutations(profs))
    assert aggregate_profiles(profs) == aggregate_profiles(shuffled)


@settings(max_examples=100, deadline=None)
@given(costs=st.lists(st.integers(40, 200), min_size=1, max_size=10))
def test_profile_monotone_and_bounded(costs):
    rec = AnytimeRecord()
    for i, c in enumerate(costs):
        rec.add(10 * (i + 1), 0.0, c)
    prof = profile_from_record(rec, 40, budget_grid(10 * len(costs), 7))
    vals = [v for v in prof.values if v is not UNDEFINED]
    assert all(v <= 1.0 for v in vals)
    assert vals == sorted(vals)


def test_budget_grid():
    assert budget_grid(100, 4) == [25, 50, 75, 100]
    assert budget_grid(3, 10) == [1, 2, 3]
    assert budget_grid(1.0, 4, integer=False) == [0.25, 0.5, 0.75, 1.0]
    with pytest.raises(ConfigurationError):
        budget_grid(0)


def test_profiles_csv_columns():
    agg = aggregate_profiles([PerformanceProfile(((1, UNDEFINED), (2, 0.5)), 1)])
    text = profiles_csv([(agg, "dfbnb", "tree", config_hash("x"))])
    lines = text.splitlines()
    assert lines[0].split(",") == PROFILE_COLUMNS
    assert lines[1] == f"1,,0,dfbnb,tree,{config_hash('x')}"
    assert lines[2].startswith("2,0.5,1,")
    assert len(config_hash("x")) == 12


def test_dominance():
    grid = (1, 2, 3, 4)
    a = aggregate_profiles([PerformanceProfile(tuple(zip(grid, (0.5, 0.9, 1.0, 1.0))), 1)])
    b = aggregate_profiles([PerformanceProfile(tuple(zip(grid, (None, 0.9, 0.8, 1.0))), 1)])
    assert dominance(a, b) == (True, 0.5)
    assert dominance(b, a) == (False, 0.0)

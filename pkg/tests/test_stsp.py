import hashlib
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from statereduce.base import ConfigurationError, ContractViolation, InfeasibleError
from statereduce.search import best_first_search, dfbnb
from statereduce.stsp import (OneTree, StspInstance, StspNode, StspProblem, generate_stsp,
                              greedy_tour_cost, held_karp_bound, normalize_constraints, one_tree,
                              vj_children)

from conftest import FROZEN


def brute_force(inst):
    n = inst.n
    return min(inst.tour_cost((0,) + p) for p in itertools.permutations(range(1, n))
               if p[0] < p[-1])


def tour_edges(order):
    n = len(order)
    return {tuple(sorted((order[k], order[(k + 1) % n]))) for k in range(n)}


def satisfies(order, required, forbidden):
    e = tour_edges(order)
    return required <= e and not (forbidden & e)


def cycle_instance(n):
    c = np.full((n, n), 100)
    for i in range(n):
        c[i, (i + 1) % n] = c[(i + 1) % n, i] = 1
    return StspInstance(c)


def test_unit_costs():
    inst = StspInstance(np.ones((4, 4), dtype=int))
    assert dfbnb(StspProblem(inst)).best_cost == 4


def test_cycle_instance_is_a_tour_at_once():
    inst = cycle_instance(7)
    tree = one_tree(inst)
    assert tree.is_tour and tree.value == 7
    assert set(tree.tour_order()) == set(range(7))
    bound, _, _ = held_karp_bound(inst)
    assert bound == 7


@pytest.mark.parametrize("row", FROZEN["stsp"], ids=lambda r: f"seed{r['seed']}")
def test_frozen_optima(row):
    inst = generate_stsp(row["n"], row["hi"], seed=row["seed"])
    assert dfbnb(StspProblem(inst)).best_cost == row["optimum"]
    assert best_first_search(StspProblem(inst)).best_cost == row["optimum"]


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32), n=st.integers(4, 8), hi=st.sampled_from([10, 1000, 2**32 - 1]))
def test_bound_properties(seed, n, hi):
    inst = generate_stsp(n, hi, seed=seed)
    opt = brute_force(inst)
    first = one_tree(inst)
    assert sum(first.degrees) == 2 * n
    assert len(first.edges) == n
    assert first.degrees[first.special_city] == 2
    bound, tree, pi = held_karp_bound(inst)
    assert math.ceil(first.value - 1e-6) <= bound <= opt
    assert sum(tree.degrees) == 2 * n
    assert greedy_tour_cost(inst) >= opt


def test_forbidden_and_required_edges_respected():
    inst = generate_stsp(7, 1000, seed=3)
    tree = one_tree(inst, required=frozenset({(2, 5)}), forbidden=frozenset({(0, 1), (3, 4)}))
    assert (2, 5) in tree.edges
    assert (0, 1) not in tree.edges and (3, 4) not in tree.edges


def test_normalize_constraints():
    req, forb = normalize_constraints(4, {(0, 1), (0, 2)}, set())
    assert (0, 3) in forb
    # city 3 is left with edges to 1 and 2 only: both become required
    assert {(1, 3), (2, 3)} <= req
    with pytest.raises(InfeasibleError):
        normalize_constraints(5, {(0, 1), (1, 2), (0, 2)}, set())
    with pytest.raises(InfeasibleError):
        normalize_constraints(4, {(0, 1), (0, 2), (0, 3)}, set())
    with pytest.raises(InfeasibleError):
        normalize_constraints(4, {(0, 1)}, {(0, 1)})


def star_node(required=frozenset()):
    # tree on 1..4 is a star at 1; city 0 attaches to 1 and 2
    edges = ((0, 1), (0, 2), (1, 2), (1, 3), (1, 4))
    deg = (2, 4, 2, 1, 1)
    return StspNode(frozenset(required), frozenset(), (0.0,) * 5, 0, OneTree(edges, 0, deg, 0.0))


def test_vj_three_children():
    specs = vj_children(star_node(), constraints_only=True)
    assert specs == [(frozenset(), frozenset({(0, 1)})),
                     (frozenset({(0, 1)}), frozenset({(1, 2)})),
                     (frozenset({(0, 1), (1, 2)}), frozenset())]


def test_vj_two_children_when_city_has_required_edge():
    specs = vj_children(star_node({(1, 3)}), constraints_only=True)
    assert specs == [(frozenset({(1, 3)}), frozenset({(0, 1)})),
                     (frozenset({(0, 1), (1, 3)}), frozenset())]


def test_vj_rejects_tour():
    inst = cycle_instance(5)
    root = StspProblem(inst).root()
    assert root.is_tour
    with pytest.raises(ContractViolation):
        vj_children(root, inst)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32), n=st.integers(5, 7))
def test_children_partition_and_bounds(seed, n):
    inst = generate_stsp(n, 50, seed=seed)
    problem = StspProblem(inst)
    tours = [(0,) + p for p in itertools.permutations(range(1, n)) if p[0] < p[-1]]
    stack = [problem.root()]
    while stack:
        node = stack.pop()
        inside = [t for t in tours if satisfies(t, node.required, node.forbidden)]
        # degree propagation cannot spot every tourless constraint set
        if inside:
            assert node.bound <= min(inst.tour_cost(t) for t in inside)
        else:
            assert not node.is_tour
        if node.is_tour:
            continue
        specs = vj_children(node, inst, constraints_only=True)
        for t in inside:
            assert sum(satisfies(t, r, f) for r, f in specs) == 1
        for r, f in specs:
            try:
                nr, nf = normalize_constraints(n, r, f)
            except InfeasibleError:
                assert not any(satisfies(t, r, f) for t in inside)
                continue
            assert [satisfies(t, r, f) for t in inside] == [satisfies(t, nr, nf) for t in inside]
        for child, inc in problem.expand(node):
            assert inc >= 0
            stack.append(child)


def test_text_round_trip_and_fingerprint():
    inst = generate_stsp(9, seed=2)
    assert np.array_equal(StspInstance.from_text(inst.to_text()).cost, inst.cost)
    sha = hashlib.sha256(generate_stsp(10, seed=1).to_text().encode()).hexdigest()
    assert sha == FROZEN["fingerprints"]["stsp_n10_seed1"]


@pytest.mark.parametrize("bad", [
    lambda: StspInstance(np.array([[0, 1, 2], [2, 0, 1], [1, 1, 0]])),
    lambda: StspInstance(np.array([[0, -1, 2], [-1, 0, 1], [2, 1, 0]])),
    lambda: StspInstance(np.zeros((2, 2))),
    lambda: StspInstance.from_text("4\n1 2 3"),
    lambda: generate_stsp(2),
])
def test_invalid_instances(bad):
    with pytest.raises(ConfigurationError):
        bad()

import json
from pathlib import Path

import pytest

from statereduce.base import SearchProblem
from statereduce.tree import BranchingDistribution, EdgeCostDistribution, TreeSpec

FROZEN = json.loads((Path(__file__).parent / "oracles" / "frozen.json").read_text())


class ExplicitTree(SearchProblem):
    """Hand-written tree: nested ``(edge_cost, [children])`` pairs.

    States are paths (tuples of child indices); leaves at any depth are goals.
    """

    def __init__(self, children):
        self.children = children

    def _node(self, path):
        kids = self.children
        for i in path:
            kids = kids[i][1]
        return kids

    def root(self):
        return ()

    def expand(self, path):
        return [(path + (i,), g) for i, (g, _) in enumerate(self._node(path))]

    def is_goal(self, path):
        return not self._node(path)

    def original_cost(self, path):
        kids, total = self.children, 0
        for i in path:
            total += kids[i][0]
            kids = kids[i][1]
        return total

    def leaf_costs(self):
        out, stack = [], [()]
        while stack:
            p = stack.pop()
            if self.is_goal(p):
                out.append(self.original_cost(p))
            stack.extend(c for c, _ in self.expand(p))
        return out


def leaves(*costs):
    return [(c, []) for c in costs]


@pytest.fixture
def four_leaf_tree():
    # two-level tree with leaf costs 3, 1, 2, 5
    return ExplicitTree([(1, leaves(2, 0)), (2, leaves(0, 3))])


def tree_spec(depth=4, branching="fixed:2", cost="uniform:0:9", seed=0):
    return TreeSpec(depth, BranchingDistribution.from_text(branching),
                    EdgeCostDistribution.from_text(cost), seed)


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[0][1:])):
            terminalreporter.write_line(line)

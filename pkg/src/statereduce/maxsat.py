"""Maximum 3-SAT as a monotonic search problem.

Nodes are partial assignments; a node's cost is the number of clauses whose
three literals are all false. Clause sets are Python integers used as
bitsets, so updating a node after one assignment is a handful of bitwise
operations.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .base import ConfigurationError, ContractViolation, SearchProblem

Clause = Tuple[int, int, int]


@dataclass(frozen=True)
class CnfInstance:
    """3-CNF formula; literals are DIMACS-style signed 1-based integers."""

    num_vars: int
    clauses: Tuple[Clause, ...]

    def __post_init__(self):
        if self.num_vars < 1:
            raise ConfigurationError("need at least one variable")
        seen = set()
        for cl in self.clauses:
            if len(cl) != 3 or len({abs(l) for l in cl}) != 3:
                raise ConfigurationError(f"clause {cl} must have 3 distinct variables")
            if any(l == 0 or abs(l) > self.num_vars for l in cl):
                raise ConfigurationError(f"literal out of range in {cl}")
            key = frozenset(cl)
            if key in seen:
                raise ConfigurationError(f"duplicate clause {cl}")
            seen.add(key)

    @classmethod
    def from_clauses(cls, num_vars: int, clauses) -> "CnfInstance":
        """Build an instance, silently dropping duplicate clauses."""
        out, seen = [], set()
        for cl in clauses:
            cl = tuple(int(l) for l in cl)
            if frozenset(cl) not in seen:
                seen.add(frozenset(cl))
                out.append(cl)
        return cls(num_vars, tuple(out))

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def unsatisfied(self, assignment: Sequence[bool]) -> int:
        """Clauses falsified by a full assignment (index 0 is variable 1)."""
        return sum(1 for cl in self.clauses
                   if not any(assignment[abs(l) - 1] == (l > 0) for l in cl))

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.num_vars} {len(self.clauses)}"]
        lines += [" ".join(map(str, cl)) + " 0" for cl in self.clauses]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_dimacs(cls, text: str) -> "CnfInstance":
        num_vars = None
        lits: List[int] = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line[0] in "c%":
                continue
            if line.startswith("p"):
                parts = line.split()
                if len(parts) != 4 or parts[1] != "cnf":
                    raise ConfigurationError(f"bad problem line {line!r}")
                num_vars = int(parts[2])
                continue
            lits.extend(int(tok) for tok in line.split())
        if num_vars is None:
            raise ConfigurationError("missing 'p cnf' header")
        clauses, cur = [], []
        for l in lits:
            if l == 0:
                clauses.append(tuple(cur))
                cur = []
            else:
                cur.append(l)
        if cur:
            raise ConfigurationError("last clause is not zero-terminated")
        return cls(num_vars, tuple(clauses))


def generate_3sat(num_vars: int, num_clauses: int, seed: int) -> CnfInstance:
    """Random 3-SAT: three distinct variables per clause, each negated w.p. 0.5.

    Duplicate clauses are redrawn until ``num_clauses`` distinct ones exist.
    """
    if num_vars < 3:
        raise ConfigurationError("need at least 3 variables")
    capacity = 8 * (num_vars * (num_vars - 1) * (num_vars - 2) // 6)
    if not 0 <= num_clauses <= capacity:
        raise ConfigurationError(f"cannot draw {num_clauses} distinct clauses over {num_vars} variables")
    rng = random.Random(seed)
    seen, clauses = set(), []
    while len(clauses) < num_clauses:
        vs = rng.sample(range(1, num_vars + 1), 3)
        cl = tuple(v if rng.random() < 0.5 else -v for v in vs)
        key = frozenset(cl)
        if key not in seen:
            seen.add(key)
            clauses.append(cl)
    return CnfInstance(num_vars, tuple(clauses))


class SatNode:
    __slots__ = ("assignment", "falsified", "sat", "f1", "f2", "f3", "depth", "bound")

    def __init__(self, assignment, falsified, sat, f1, f2, f3, depth, bound=None):
        self.assignment = assignment  # tuple: None / True / False per variable
        self.falsified = falsified
        self.sat = sat  # bitset of satisfied clauses
        self.f1 = f1    # >= 1 literal false
        self.f2 = f2    # >= 2 literals false
        self.f3 = f3    # all 3 literals false
        self.depth = depth
        self.bound = falsified if bound is None else bound  # falsified + lookahead

    def __repr__(self):
        return f"SatNode(depth={self.depth}, falsified={self.falsified})"


class MaxSatProblem(SearchProblem):
    """Davis-Putnam style branching on the most frequent unassigned variable.

    With ``unit_bound=True`` a node's cost adds a lookahead: every unassigned
    variable forced both ways by two-false-literal clauses costs at least
    ``min(#forced true, #forced false)`` more falsified clauses. The bound is
    admissible and taken pathmax, so increments stay non-negative.

    With ``pure_literals=True`` a variable whose active occurrences all
    share one sign (or that has none) is set to satisfy them, as a single
    zero-increment child. Unit propagation is not offered: forcing a unit
    literal can lose the optimum when clauses may be falsified.
    """

    def __init__(self, instance: CnfInstance, unit_bound: bool = False,
                 pure_literals: bool = False):
        self.instance = instance
        self.unit_bound = unit_bound
        self.pure_literals = pure_literals
        n = instance.num_vars
        self._pos = [0] * (n + 1)
        self._neg = [0] * (n + 1)
        for i, cl in enumerate(instance.clauses):
            bit = 1 << i
            for l in cl:
                if l > 0:
                    self._pos[l] |= bit
                else:
                    self._neg[-l] |= bit
        self._occ = [p | q for p, q in zip(self._pos, self._neg)]
        self._all = (1 << len(instance.clauses)) - 1
        self._root = SatNode((None,) * n, 0, 0, 0, 0, 0, 0)

    def root(self):
        return self._root

    def is_goal(self, node):
        return node.depth == self.instance.num_vars

    def original_cost(self, node):
        return node.bound

    def describe(self, node):
        return "".join("-" if v is None else ("1" if v else "0") for v in node.assignment)

    def branch_variable(self, node) -> int:
        active = self._all & ~(node.sat | node.f3)
        best, best_count = -1, -1
        occ = self._occ
        for v, val in enumerate(node.assignment, start=1):
            if val is None:
                c = (occ[v] & active).bit_count()
                if c > best_count:
                    best, best_count = v, c
        return best

    def assign(self, node, var: int, value: bool) -> SatNode:
        true_lits = self._pos[var] if value else self._neg[var]
        false_lits = self._neg[var] if value else self._pos[var]
        sat = node.sat | true_lits
        f3 = node.f3 | (node.f2 & false_lits & ~node.sat)
        f2 = node.f2 | (node.f1 & false_lits)
        f1 = node.f1 | false_lits
        new = (f3 & ~node.f3).bit_count()
        assignment = node.assignment[:var - 1] + (value,) + node.assignment[var:]
        falsified = node.falsified + new
        bound = falsified
        if self.unit_bound:
            units = f2 & ~f3 & ~sat
            if units:
                pos, neg = self._pos, self._neg
                for v, val in enumerate(assignment, start=1):
                    if val is None:
                        a = (units & pos[v]).bit_count()
                        if a:
                            b = (units & neg[v]).bit_count()
                            bound += a if a < b else b
            bound = max(bound, node.bound)
        return SatNode(assignment, falsified, sat, f1, f2, f3, node.depth + 1, bound)

    def expand(self, node):
        if self.is_goal(node):
            return []
        if self.pure_literals:
            active = self._all & ~(node.sat | node.f3)
            for v, val in enumerate(node.assignment, start=1):
                if val is None:
                    pos, neg = self._pos[v] & active, self._neg[v] & active
                    if not pos or not neg:
                        child = self.assign(node, v, not neg)
                        return [(child, child.bound - node.bound)]
        var = self.branch_variable(node)
        out = []
        for value in (True, False):
            child = self.assign(node, var, value)
            out.append((child, child.bound - node.bound))
        return out


def dp_children(node, instance_or_problem) -> List[Tuple[SatNode, int]]:
    problem = (instance_or_problem if isinstance(instance_or_problem, MaxSatProblem)
               else MaxSatProblem(instance_or_problem))
    if problem.is_goal(node):
        raise ContractViolation("node already assigns every variable")
    return problem.expand(node)


def max_sat_optimum_bruteforce(instance: CnfInstance, max_vars: int = 20) -> int:
    """Minimum number of unsatisfied clauses over all 2^n assignments."""
    n = instance.num_vars
    if n > max_vars:
        raise ConfigurationError(f"brute force refused for {n} > {max_vars} variables")
    idx = np.arange(1 << n, dtype=np.int64)
    unsat = np.zeros(1 << n, dtype=np.int32)
    for cl in instance.clauses:
        clause_sat = np.zeros(1 << n, dtype=bool)
        for l in cl:
            bit = ((idx >> (abs(l) - 1)) & 1).astype(bool)
            clause_sat |= bit if l > 0 else ~bit
        unsat += ~clause_sat
    return int(unsat.min())


def relative_error(found: int, optimum: int) -> float:
    """``(found - opt) / max(opt, 1)``; the guard covers satisfiable instances."""
    return (found - optimum) / max(optimum, 1)

"""Regenerate frozen.json. Every value here comes from an independent route
(exhaustive enumeration, permutation brute force, scipy's assignment solver),
never from the search code under test.

    python3 tests/oracles/make_oracles.py
"""
import hashlib
import itertools
import json
from pathlib import Path

import numpy as np
from scipy.optimize import linear_sum_assignment

from statereduce.atsp import generate_atsp
from statereduce.maxsat import generate_3sat
from statereduce.stsp import generate_stsp
from statereduce.tree import (BranchingDistribution, EdgeCostDistribution, TreeSpec,
                              make_tree)

TREE_SPECS = {
    "bin_d6_u9": ("fixed:2", "uniform:0:9", 6),
    "tern_d4_u100": ("fixed:3", "uniform:0:100", 4),
    "pois2.5_d4_zi": ("poisson:2.5", "zero_inflated:0.3:50", 4),
}


def tree_oracles():
    out = {}
    for name, (branch, cost, depth) in TREE_SPECS.items():
        rows = []
        for seed in range(12):
            spec = TreeSpec(depth, BranchingDistribution.from_text(branch),
                            EdgeCostDistribution.from_text(cost), seed)
            leaves = list(make_tree(spec).enumerate_leaves(limit=10_000))
            rows.append({"seed": seed, "optimum": min(l.cost for l in leaves),
                         "leaves": len(leaves), "nodes": make_tree(spec).count_nodes()})
        out[name] = {"branching": branch, "cost_dist": cost, "depth": depth, "rows": rows}
    return out


def tours(n):
    for p in itertools.permutations(range(1, n)):
        yield (0,) + p


def tour_cost(c, order):
    return int(sum(c[order[i], order[(i + 1) % len(order)]] for i in range(len(order))))


def atsp_oracles():
    rows = []
    for seed in range(16):
        n = 4 + seed % 4
        structure = "i_times_j" if seed % 2 == 0 else ("uniform_range", 1000)
        inst = generate_atsp(n, structure, seed=seed)
        c = inst.cost.astype(float)
        np.fill_diagonal(c, np.inf)
        r, col = linear_sum_assignment(c)
        rows.append({"seed": seed, "n": n, "structure": "i_times_j" if seed % 2 == 0 else "uniform_range:1000",
                     "optimum": min(tour_cost(inst.cost, t) for t in tours(n)),
                     "ap_value": int(c[r, col].sum())})
    return rows


def stsp_oracles():
    rows = []
    for seed in range(16):
        n = 4 + seed % 5
        hi = 2**32 - 1 if seed % 2 == 0 else 1000
        inst = generate_stsp(n, hi=hi, seed=seed)
        rows.append({"seed": seed, "n": n, "hi": hi,
                     "optimum": min(tour_cost(inst.cost, t) for t in tours(n))})
    return rows


def maxsat_oracles():
    rows = []
    for seed in range(12):
        nv, nc = 8 + seed % 3, 60 + 8 * seed
        inst = generate_3sat(nv, nc, seed)
        best = min(sum(1 for cl in inst.clauses
                       if not any(bits[abs(l) - 1] == (l > 0) for l in cl))
                   for bits in itertools.product((False, True), repeat=nv))
        rows.append({"seed": seed, "num_vars": nv, "num_clauses": nc, "optimum": best})
    return rows


def fingerprints():
    sha = lambda s: hashlib.sha256(s.encode()).hexdigest()
    return {
        "atsp_uniform_n10_seed3": sha(generate_atsp(10, ("uniform_range", 65535), seed=3).to_text()),
        "atsp_ixj_n12_seed0": sha(generate_atsp(12, "i_times_j", seed=0).to_text()),
        "stsp_n10_seed1": sha(generate_stsp(10, seed=1).to_text()),
        "maxsat_30_450_seed0": sha(generate_3sat(30, 450, 0).to_dimacs()),
    }


if __name__ == "__main__":
    data = {"tree": tree_oracles(), "atsp": atsp_oracles(), "stsp": stsp_oracles(),
            "maxsat": maxsat_oracles(), "fingerprints": fingerprints()}
    path = Path(__file__).with_name("frozen.json")
    path.write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")
    print(f"wrote {path}")

"""Seeded batch experiments: configs, cached optima, CSV output and oracle checks."""
from __future__ import annotations

import csv
import hashlib
import io
import itertools
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .atsp import AtspProblem, generate_atsp, local_search_baseline
from .base import AnytimeRecord, ConfigurationError, SearchProblem
from .maxsat import MaxSatProblem, generate_3sat, max_sat_optimum_bruteforce
from .profiling import (aggregate_profiles, budget_grid, config_hash, profile_from_record,
                        profiles_csv, relative_error)
from .reduction import epsilon_dfbnb, iterative_delta_dfbnb, iterative_epsilon_dfbnb
from .sampling import OnlineSampler
from .search import best_first_search, dfbnb
from .stsp import StspProblem, generate_stsp
from .tree import (BranchingDistribution, EdgeCostDistribution, TreeSpec, make_tree,
                   trial_seed)
from ._validation import check_budget, check_seed

ENV_OUTPUT = "STATEREDUCE_OUTPUT_DIR"
ENV_JOBS = "STATEREDUCE_JOBS"
ENV_CACHE = "STATEREDUCE_CACHE_DIR"

DOMAINS = ("tree", "atsp", "stsp", "maxsat")
ALGORITHMS = ("bfs", "dfbnb", "eps_dfbnb", "iter_eps_dfbnb", "iter_delta_dfbnb", "local_search")

# name -> (type, default); a default of None means required
DOMAIN_PARAMS = {
    "tree": {"depth": (int, None), "branching": (str, None), "cost_dist": (str, None)},
    "atsp": {"n": (int, None), "structure": (str, "i_times_j")},
    "stsp": {"n": (int, None), "hi": (int, 2**32 - 1)},
    "maxsat": {"num_vars": (int, None), "num_clauses": (int, None)},
}

# bump when an oracle changes in a way that could change cached optima
ORACLE_VERSION = 1


def _parse_optional_int(text):
    if text is None or str(text).strip().lower() in ("", "none", "inf"):
        return None
    return int(text)


@dataclass
class ExperimentConfig:
    domain: str
    params: Dict[str, object]
    algorithms: Sequence[str] = ("dfbnb",)
    budget: Optional[int] = None
    grid_points: int = 20
    trials: int = 1
    seed: int = 0
    output: str = "results"
    optimum_cap: Optional[int] = 50_000_000
    epsilon: object = "auto"
    parallelism: int = 1
    name: str = "experiment"

    def __post_init__(self):
        if self.domain not in DOMAINS:
            raise ConfigurationError(f"unknown domain {self.domain!r}; expected one of {DOMAINS}")
        spec = DOMAIN_PARAMS[self.domain]
        unknown = set(self.params) - set(spec)
        if unknown:
            raise ConfigurationError(f"unknown {self.domain} parameters: {sorted(unknown)}")
        params = {}
        for key, (typ, default) in spec.items():
            if key in self.params:
                try:
                    params[key] = typ(self.params[key])
                except (TypeError, ValueError):
                    raise ConfigurationError(f"parameter {key} must be {typ.__name__}") from None
            elif default is None:
                raise ConfigurationError(f"missing {self.domain} parameter {key!r}")
            else:
                params[key] = default
        self.params = params
        if isinstance(self.algorithms, str):
            self.algorithms = [a.strip() for a in self.algorithms.split(",") if a.strip()]
        self.algorithms = tuple(self.algorithms)
        if not self.algorithms:
            raise ConfigurationError("no algorithms selected")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ConfigurationError(f"unknown algorithm {a!r}; expected one of {ALGORITHMS}")
        if "local_search" in self.algorithms and self.domain != "atsp":
            raise ConfigurationError("local_search is only available for atsp")
        if "local_search" in self.algorithms and self.budget is None:
            raise ConfigurationError("local_search needs a budget")
        self.budget = check_budget(self.budget)
        self.optimum_cap = check_budget(self.optimum_cap, "optimum_cap")
        if isinstance(self.trials, bool) or not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigurationError(f"trials must be a positive integer, got {self.trials!r}")
        if self.grid_points < 1:
            raise ConfigurationError("grid_points must be >= 1")
        if self.parallelism < 1:
            raise ConfigurationError("parallelism must be >= 1")
        self.seed = check_seed(self.seed)
        if self.epsilon != "auto":
            self.epsilon = float(self.epsilon) if not isinstance(self.epsilon, int) else self.epsilon
            if self.epsilon < 0:
                raise ConfigurationError("epsilon must be >= 0")
        # fail early on malformed tree distributions
        if self.domain == "tree":
            self.tree_spec(0)

    # -- serialization ----------------------------------------------------

    def to_text(self) -> str:
        lines = [f"name={self.name}", f"domain={self.domain}"]
        lines += [f"param.{k}={v}" for k, v in self.params.items()]
        lines += [
            f"algorithms={','.join(self.algorithms)}",
            f"budget={'none' if self.budget is None else self.budget}",
            f"grid_points={self.grid_points}",
            f"trials={self.trials}",
            f"seed={self.seed}",
            f"output={self.output}",
            f"optimum_cap={'none' if self.optimum_cap is None else self.optimum_cap}",
            f"epsilon={self.epsilon}",
            f"parallelism={self.parallelism}",
        ]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, **overrides) -> "ExperimentConfig":
        raw, params = {}, {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigurationError(f"line {lineno}: expected key=value, got {line!r}")
            key, value = key.strip(), value.strip()
            if key.startswith("param."):
                params[key[6:]] = value
            else:
                raw[key] = value
        if "domain" not in raw:
            raise ConfigurationError("config has no domain")
        kwargs = dict(domain=raw.pop("domain"), params=params)
        conv = {"algorithms": str, "budget": _parse_optional_int, "grid_points": int,
                "trials": int, "seed": int, "output": str, "optimum_cap": _parse_optional_int,
                "epsilon": lambda v: v if v == "auto" else _number(v), "parallelism": int,
                "name": str}
        for key, value in raw.items():
            if key not in conv:
                raise ConfigurationError(f"unknown config key {key!r}")
            try:
                kwargs[key] = conv[key](value)
            except ValueError:
                raise ConfigurationError(f"bad value for {key}: {value!r}") from None
        kwargs.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kwargs)

    @classmethod
    def load(cls, path, **overrides) -> "ExperimentConfig":
        return cls.from_text(Path(path).read_text(), **overrides)

    def fingerprint(self) -> str:
        """Hash of everything that affects results (not output or parallelism)."""
        text = self.to_text()
        keep = [ln for ln in text.splitlines()
                if not ln.startswith(("output=", "parallelism=", "name="))]
        return config_hash("\n".join(keep))

    # -- instances --------------------------------------------------------

    def instance_seed(self, trial: int) -> int:
        return trial_seed(self.seed, trial)

    def tree_spec(self, trial: int) -> TreeSpec:
        p = self.params
        return TreeSpec(p["depth"], BranchingDistribution.from_text(p["branching"]),
                        EdgeCostDistribution.from_text(p["cost_dist"]), self.instance_seed(trial))

    def make_instance(self, trial: int):
        p, s = self.params, self.instance_seed(trial)
        if self.domain == "tree":
            return self.tree_spec(trial)
        if self.domain == "atsp":
            return generate_atsp(p["n"], _atsp_structure(p["structure"]), seed=s)
        if self.domain == "stsp":
            return generate_stsp(p["n"], hi=p["hi"], seed=s)
        return generate_3sat(p["num_vars"], p["num_clauses"], seed=s)


def _number(text):
    try:
        return int(text)
    except ValueError:
        return float(text)


def _atsp_structure(text: str):
    if text == "i_times_j":
        return text
    kind, _, hi = text.partition(":")
    if kind != "uniform_range" or not hi:
        raise ConfigurationError(f"atsp structure must be i_times_j or uniform_range:HI, got {text!r}")
    return ("uniform_range", int(hi))


def make_problem(domain: str, instance) -> SearchProblem:
    if domain == "tree":
        return make_tree(instance)
    if domain == "atsp":
        return AtspProblem(instance)
    if domain == "stsp":
        return StspProblem(instance)
    if domain == "maxsat":
        return MaxSatProblem(instance)
    raise ConfigurationError(f"unknown domain {domain!r}")


# --------------------------------------------------------------------------
# optima
# --------------------------------------------------------------------------

class OptimumCache:
    """Flat content-addressed store: one JSON file per (domain, params, seed)."""

    def __init__(self, root):
        self.root = Path(root)

    @staticmethod
    def key(domain: str, params: dict, instance_seed: int) -> str:
        canon = json.dumps({"domain": domain, "params": params, "seed": instance_seed,
                            "oracle": ORACLE_VERSION}, sort_keys=True)
        return hashlib.sha256(canon.encode()).hexdigest()

    def _path(self, key):
        return self.root / key[:2] / f"{key}.json"

    def get(self, key):
        path = self._path(key)
        if not path.exists():
            return None
        return json.loads(path.read_text())

    def put(self, key, entry: dict):
        path = self._path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(f".tmp{os.getpid()}")
        tmp.write_text(json.dumps(entry, sort_keys=True))
        os.replace(tmp, path)


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_CACHE)
    return Path(env) if env else Path.home() / ".cache" / "statereduce" / "optima"


def exact_optimum(domain: str, instance, cap: Optional[int] = None):
    """``(optimum, nodes)`` by unbudgeted DFBnB, or ``(None, nodes)`` past ``cap``.

    MAX-SAT optima use the adapter's unit-conflict lookahead, which prunes
    far more but leaves the optimum unchanged.
    """
    if domain == "maxsat":
        problem = MaxSatProblem(instance, unit_bound=True)
    else:
        problem = make_problem(domain, instance)
    r = dfbnb(problem, budget=cap)
    if not r.optimal_proven:
        return None, r.nodes_generated
    return r.best_original_cost, r.nodes_generated


def cached_optimum(config: ExperimentConfig, trial: int, instance, cache: Optional[OptimumCache]):
    key = OptimumCache.key(config.domain, config.params, config.instance_seed(trial))
    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            return hit["optimum"]
    opt, nodes = exact_optimum(config.domain, instance, config.optimum_cap)
    if opt is not None and cache is not None:
        cache.put(key, {"optimum": opt, "nodes": nodes, "domain": config.domain})
    return opt


# --------------------------------------------------------------------------
# running
# --------------------------------------------------------------------------

@dataclass
class RunOutcome:
    algorithm: str
    final_cost: object
    nodes_generated: int
    optimal_proven: bool
    truncated: bool
    wall_time: float
    events: list


@dataclass
class TrialOutcome:
    trial: int
    instance_seed: int
    optimum: object
    runs: List[RunOutcome]


def run_algorithm(name: str, problem, budget: Optional[int], epsilon="auto", instance=None,
                  seed: int = 0) -> RunOutcome:
    start = time.perf_counter()
    if name == "local_search":
        rec = local_search_baseline(instance, budget=budget, seed=seed)
        return RunOutcome(name, rec.final_cost, budget, False, True,
                          time.perf_counter() - start, list(rec.events))
    if name == "bfs":
        r = best_first_search(problem, budget)
    elif name == "dfbnb":
        r = dfbnb(problem, budget=budget)
    elif name == "eps_dfbnb":
        eps = OnlineSampler().fit(problem).epsilon_star_ if epsilon == "auto" else epsilon
        r = epsilon_dfbnb(problem, eps, budget)
    elif name == "iter_eps_dfbnb":
        r = iterative_epsilon_dfbnb(problem, budget=budget)
    elif name == "iter_delta_dfbnb":
        r = iterative_delta_dfbnb(problem, budget=budget)
    else:
        raise ConfigurationError(f"unknown algorithm {name!r}")
    return RunOutcome(name, r.best_original_cost, r.nodes_generated, r.optimal_proven,
                      r.truncated, time.perf_counter() - start, list(r.anytime.events))


def run_trial(config: ExperimentConfig, trial: int, cache_dir=None) -> TrialOutcome:
    instance = config.make_instance(trial)
    cache = OptimumCache(cache_dir) if cache_dir is not None else None
    optimum = cached_optimum(config, trial, instance, cache)
    runs = []
    for name in config.algorithms:
        problem = None if name == "local_search" else make_problem(config.domain, instance)
        runs.append(run_algorithm(name, problem, config.budget, config.epsilon, instance,
                                  seed=config.instance_seed(trial)))
    return TrialOutcome(trial, config.instance_seed(trial), optimum, runs)


def _trial_worker(args):
    text, trial, cache_dir = args
    return run_trial(ExperimentConfig.from_text(text), trial, cache_dir)


@dataclass
class ExperimentSummary:
    config: ExperimentConfig
    trials: List[TrialOutcome]
    grid: List[int]
    profiles: Dict[str, object]
    profile_less: bool
    files: Dict[str, Path] = field(default_factory=dict)

    def mean_error(self, algorithm: str) -> Optional[float]:
        """Mean final relative error, over trials where the run found a solution."""
        if self.profile_less:
            return None
        guard = self.config.domain == "maxsat"
        errs = [relative_error(r.final_cost, t.optimum, guard)
                for t in self.trials for r in t.runs
                if r.algorithm == algorithm and r.final_cost is not None]
        return math.fsum(errs) / len(errs) if errs else None

    def mean_nodes(self, algorithm: str) -> float:
        vals = [r.nodes_generated for t in self.trials for r in t.runs if r.algorithm == algorithm]
        return sum(vals) / len(vals)


def _grid_for(config: ExperimentConfig, trials: List[TrialOutcome]) -> List[int]:
    if config.budget is not None:
        return budget_grid(config.budget, config.grid_points)
    pool = [r.nodes_generated for t in trials for r in t.runs
            if r.algorithm == "dfbnb" or "dfbnb" not in config.algorithms]
    return budget_grid(max(pool), config.grid_points)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def run_experiment(config: ExperimentConfig, output=None, cache_dir=None,
                   parallelism: Optional[int] = None, write: bool = True) -> ExperimentSummary:
    """Run every trial, then write CSVs under the output directory.

    Output directory and worker count fall back to the ``STATEREDUCE_OUTPUT_DIR``
    and ``STATEREDUCE_JOBS`` environment variables, then to the config.
    Results are ordered by trial index whatever order workers finish in.
    """
    if not isinstance(config, ExperimentConfig):
        raise ConfigurationError("run_experiment expects an ExperimentConfig")
    out = Path(output or os.environ.get(ENV_OUTPUT) or config.output)
    jobs = parallelism or int(os.environ.get(ENV_JOBS, 0) or 0) or config.parallelism
    if cache_dir is None:
        cache_dir = default_cache_dir()
    cache_dir = str(cache_dir) if cache_dir else None

    if jobs > 1 and config.trials > 1:
        text = config.to_text()
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            trials = list(pool.map(_trial_worker,
                                   [(text, t, cache_dir) for t in range(config.trials)]))
    else:
        trials = [run_trial(config, t, cache_dir) for t in range(config.trials)]
    trials.sort(key=lambda t: t.trial)

    profile_less = any(t.optimum is None for t in trials)
    grid = _grid_for(config, trials)
    guard = config.domain == "maxsat"
    profiles = {}
    if not profile_less:
        for name in config.algorithms:
            profs = [profile_from_record(AnytimeRecord(list(r.events)), t.optimum, grid, guard)
                     for t in trials for r in t.runs if r.algorithm == name]
            profiles[name] = aggregate_profiles(profs)
    summary = ExperimentSummary(config, trials, grid, profiles, profile_less)
    if write:
        summary.files = write_outputs(summary, out)
    return summary


def write_outputs(summary: ExperimentSummary, out: Path) -> Dict[str, Path]:
    config = summary.config
    chash = config.fingerprint()
    guard = config.domain == "maxsat"
    run_rows, anytime_rows, timing_rows = [], [], []
    for t in summary.trials:
        for r in t.runs:
            err = (None if t.optimum is None or r.final_cost is None
                   else relative_error(r.final_cost, t.optimum, guard))
            run_rows.append([t.trial, t.instance_seed, r.algorithm, _fmt(t.optimum),
                             _fmt(r.final_cost), _fmt(err), r.nodes_generated,
                             int(r.optimal_proven), int(r.truncated)])
            anytime_rows += [[t.trial, r.algorithm, n, _fmt(c)] for n, _, c in r.events]
            timing_rows.append([t.trial, r.algorithm, f"{r.wall_time:.6f}"])
    summary_rows = []
    for name in config.algorithms:
        runs = [r for t in summary.trials for r in t.runs if r.algorithm == name]
        summary_rows.append([name, len(runs), _fmt(summary.mean_error(name)),
                             _fmt(summary.mean_nodes(name)),
                             _fmt(sum(r.optimal_proven for r in runs) / len(runs))])
    files = {
        "runs": _csv_text(["trial", "instance_seed", "algorithm", "optimum", "final_cost",
                           "relative_error", "nodes_generated", "optimal_proven", "truncated"],
                          run_rows),
        "anytime": _csv_text(["trial", "algorithm", "nodes_generated", "cost"], anytime_rows),
        "timing": _csv_text(["trial", "algorithm", "wall_time_seconds"], timing_rows),
        "summary": _csv_text(["algorithm", "trials", "mean_relative_error", "mean_nodes",
                              "proven_fraction"], summary_rows),
    }
    if not summary.profile_less:
        files["profiles"] = profiles_csv([(summary.profiles[a], a, config.domain, chash)
                                          for a in config.algorithms])
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    for name, text in files.items():
        path = out / f"{name}.csv"
        path.write_text(text)
        paths[name] = path
    paths["config"] = out / "config.txt"
    paths["config"].write_text(config.to_text())
    return paths


# --------------------------------------------------------------------------
# oracle verification
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    check: str
    domain: str
    trial: int
    detail: str

    def as_dict(self):
        return {"check": self.check, "domain": self.domain, "trial": self.trial,
                "detail": self.detail}


@dataclass
class OracleReport:
    checks: int = 0
    instances: int = 0
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> str:
        return json.dumps({"ok": self.ok, "instances": self.instances, "checks": self.checks,
                           "violations": [v.as_dict() for v in self.violations]}, indent=2)


class _Recorder(SearchProblem):
    """Pass-through problem that remembers every state it expands."""

    def __init__(self, inner):
        self.inner = inner
        self.expanded = []

    def root(self):
        return self.inner.root()

    def root_cost(self):
        return self.inner.root_cost()

    def expand(self, state):
        self.expanded.append(state)
        return self.inner.expand(state)

    def is_goal(self, state):
        return self.inner.is_goal(state)

    def original_cost(self, state):
        return self.inner.original_cost(state)


class _TourTable:
    """All tours through city 0, as successor arrays, with their costs."""

    def __init__(self, instance, symmetric: bool):
        n = instance.n
        perms = np.array([(0,) + p for p in itertools.permutations(range(1, n))], dtype=np.int64)
        if symmetric:  # one direction per undirected tour
            perms = perms[perms[:, 1] < perms[:, -1]] if n > 3 else perms[:1]
        succ = np.empty_like(perms)
        succ[np.arange(len(perms))[:, None], perms] = np.roll(perms, -1, axis=1)
        self.succ = succ
        c = instance.cost
        self.costs = c[np.arange(n)[None, :], succ].sum(axis=1)
        self.symmetric = symmetric

    @property
    def optimum(self) -> int:
        return int(self.costs.min())

    def _has(self, i, j):
        if self.symmetric:
            return (self.succ[:, i] == j) | (self.succ[:, j] == i)
        return self.succ[:, i] == j

    def best_with(self, required, forbidden):
        mask = np.ones(len(self.costs), dtype=bool)
        for i, j in required:
            mask &= self._has(i, j)
        for i, j in forbidden:
            mask &= ~self._has(i, j)
        return int(self.costs[mask].min()) if mask.any() else None


def _maxsat_table(instance):
    n = instance.num_vars
    idx = np.arange(1 << n, dtype=np.int64)
    unsat = np.zeros(1 << n, dtype=np.int32)
    for cl in instance.clauses:
        ok = np.zeros(1 << n, dtype=bool)
        for lit in cl:
            bit = ((idx >> (abs(lit) - 1)) & 1).astype(bool)
            ok |= bit if lit > 0 else ~bit
        unsat += ~ok
    return idx, unsat


def _subspace_optimum(domain, instance, table, problem, state):
    """Best goal cost among completions of ``state``, by brute force."""
    if domain == "tree":
        best = None
        stack = [state]
        while stack:
            node = stack.pop()
            if problem.is_goal(node):
                best = node.cost if best is None else min(best, node.cost)
            else:
                stack.extend(c for c, _ in problem.expand(node))
        return best
    if domain == "atsp":
        return table.best_with(state.included, state.excluded)
    if domain == "stsp":
        return table.best_with(state.required, state.forbidden)
    idx, unsat = table
    mask = np.ones(len(idx), dtype=bool)
    for v, val in enumerate(state.assignment):
        if val is not None:
            mask &= ((idx >> v) & 1).astype(bool) == val
    return int(unsat[mask].min())


def brute_force_optimum(domain: str, instance, table=None):
    if domain == "tree":
        problem = make_tree(instance)
        return min(leaf.cost for leaf in problem.enumerate_leaves(limit=100_000))
    if domain in ("atsp", "stsp"):
        return (table or _TourTable(instance, domain == "stsp")).optimum
    return max_sat_optimum_bruteforce(instance)


def _check_small(config: ExperimentConfig, trial: int):
    p = config.params
    if config.domain == "tree":
        n = make_tree(config.tree_spec(trial)).count_nodes(limit=501)
        if n > 500:
            raise ConfigurationError(f"tree trial {trial} has more than 500 nodes")
    elif config.domain in ("atsp", "stsp") and p["n"] > 8:
        raise ConfigurationError("verify needs n <= 8")
    elif config.domain == "maxsat" and p["num_vars"] > 15:
        raise ConfigurationError("verify needs at most 15 variables")


VERIFY_ALGORITHMS = ("bfs", "dfbnb", "iter_eps_dfbnb", "iter_delta_dfbnb")


def verify(configs: Sequence[ExperimentConfig],
           wrap: Optional[Callable[[SearchProblem], SearchProblem]] = None) -> OracleReport:
    """Check every algorithm against brute force on small instances.

    Checks per instance: each algorithm returns the brute-force optimum and
    proves it; incumbents never drop below the optimum; every cost increment
    is non-negative; and the cost of every node DFBnB expands is at most the
    best goal cost in that node's subspace (bound admissibility). ``wrap``
    lets a caller substitute the searched problem, e.g. to inject a fault.
    """
    configs = list(configs)
    if not configs:
        raise ConfigurationError("empty verification suite")
    report = OracleReport()

    def fail(check, cfg, trial, detail):
        report.violations.append(Violation(check, cfg.domain, trial, detail))

    for cfg in configs:
        for trial in range(cfg.trials):
            _check_small(cfg, trial)
            instance = cfg.make_instance(trial)
            if cfg.domain in ("atsp", "stsp"):
                table = _TourTable(instance, cfg.domain == "stsp")
            elif cfg.domain == "maxsat":
                table = _maxsat_table(instance)
            else:
                table = None
            opt = (int(table[1].min()) if cfg.domain == "maxsat"
                   else brute_force_optimum(cfg.domain, instance, table))
            report.instances += 1
            base = make_problem(cfg.domain, instance)
            for name in VERIFY_ALGORITHMS:
                problem = wrap(base) if wrap else base
                run = run_algorithm(name, problem, None)
                report.checks += 2
                if run.final_cost != opt:
                    fail("exactness", cfg, trial, f"{name} returned {run.final_cost}, optimum {opt}")
                if not run.optimal_proven:
                    fail("proof", cfg, trial, f"{name} did not prove optimality")
                costs = [c for _, _, c in run.events]
                report.checks += 1
                if any(c < opt for c in costs) or any(b >= a for a, b in zip(costs, costs[1:])):
                    fail("anytime", cfg, trial, f"{name} incumbents {costs} vs optimum {opt}")
            rec = _Recorder(wrap(base) if wrap else base)
            dfbnb(rec)
            for state in rec.expanded:
                report.checks += 2
                bound = rec.original_cost(state)
                best = _subspace_optimum(cfg.domain, instance, table, base, state)
                if best is not None and bound > best:
                    fail("admissibility", cfg, trial,
                         f"node cost {bound} exceeds subspace optimum {best}")
                for _, inc in rec.inner.expand(state):
                    if inc < 0:
                        fail("monotonicity", cfg, trial, f"negative increment {inc}")
                        break
    return report


def default_suite(trials: int = 20, seed: int = 0) -> List[ExperimentConfig]:
    """Small instances of every domain, sized for brute force."""
    algs = VERIFY_ALGORITHMS
    return [
        ExperimentConfig("tree", {"depth": 5, "branching": "fixed:2",
                                  "cost_dist": "uniform:0:9"}, algs, trials=trials, seed=seed),
        ExperimentConfig("tree", {"depth": 4, "branching": "poisson:3",
                                  "cost_dist": "zero_inflated:0.3:20"}, algs, trials=trials, seed=seed),
        ExperimentConfig("atsp", {"n": 7, "structure": "i_times_j"}, algs, trials=trials, seed=seed),
        ExperimentConfig("stsp", {"n": 7, "hi": 1000}, algs, trials=trials, seed=seed),
        ExperimentConfig("maxsat", {"num_vars": 12, "num_clauses": 90}, algs, trials=trials, seed=seed),
    ]

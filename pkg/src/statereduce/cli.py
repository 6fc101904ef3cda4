"""Command-line entry point: ``statereduce {run,verify,sweep,sample}``."""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .base import ConfigurationError, EstimationError, SearchProblem
from .experiment import (ENV_OUTPUT, ExperimentConfig, default_suite, make_problem,
                         run_experiment, verify)
from .sampling import OnlineSampler, summarize, summary_csv
from .tree import growth_fits, sweep_phase_transition


def _params(items):
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigurationError(f"--param expects key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def _int_list(text):
    vals = []
    for part in text.split(","):
        lo, sep, hi = part.partition("-")
        vals += list(range(int(lo), int(hi) + 1)) if sep else [int(lo)]
    return vals


def _config_args(p):
    p.add_argument("--config", type=Path, help="plain-text key=value config file")
    p.add_argument("--domain", choices=("tree", "atsp", "stsp", "maxsat"))
    p.add_argument("--param", action="append", metavar="KEY=VALUE",
                   help="instance parameter (repeatable)")
    p.add_argument("--algorithms", help="comma-separated algorithm names")
    p.add_argument("--budget", type=int)
    p.add_argument("--grid-points", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--output")
    p.add_argument("--optimum-cap", type=int)
    p.add_argument("--epsilon")
    p.add_argument("--parallelism", type=int)


def _load_config(args) -> ExperimentConfig:
    overrides = {"algorithms": args.algorithms, "budget": args.budget,
                 "grid_points": args.grid_points, "trials": args.trials, "seed": args.seed,
                 "output": args.output, "optimum_cap": args.optimum_cap,
                 "epsilon": args.epsilon, "parallelism": args.parallelism}
    if args.config is not None:
        cfg = ExperimentConfig.load(args.config, **overrides)
        if args.domain or args.param:
            params = dict(cfg.params, **_params(args.param))
            cfg = ExperimentConfig(**{**cfg.__dict__, "params": params,
                                      "domain": args.domain or cfg.domain})
        return cfg
    if args.domain is None:
        raise ConfigurationError("either --config or --domain is required")
    kwargs = {k: v for k, v in overrides.items() if v is not None}
    return ExperimentConfig(args.domain, _params(args.param), **kwargs)


def cmd_run(args) -> int:
    cfg = _load_config(args)
    summary = run_experiment(cfg, cache_dir=args.cache_dir)
    out = summary.files["runs"].parent
    print(f"{cfg.name}: {cfg.trials} trials of {cfg.domain} -> {out}")
    for name in cfg.algorithms:
        err = summary.mean_error(name)
        err_text = "n/a" if err is None else f"{err:.4f}"
        print(f"  {name:18s} mean_error={err_text} mean_nodes={summary.mean_nodes(name):.1f}")
    if summary.profile_less:
        print("  optimum cap reached: no profiles written")
    return 0


def cmd_verify(args) -> int:
    if args.config:
        suite = [ExperimentConfig.load(p) for p in args.config]
    else:
        suite = default_suite(args.trials, args.seed)
    wrap = _inflate_bound if args.inject_fault else None
    report = verify(suite, wrap=wrap)
    print(report.to_json())
    return 0 if report.ok else 1


def _inflate_bound(problem):
    """Test fault: interior node costs exceed every goal below them."""
    class Inflated(SearchProblem):
        def root(self):
            return problem.root()

        def expand(self, state):
            return problem.expand(state)

        def is_goal(self, state):
            return problem.is_goal(state)

        def original_cost(self, state):
            bump = 0 if problem.is_goal(state) else 10**9
            return problem.original_cost(state) + bump

    return Inflated()


def cmd_sweep(args) -> int:
    p0s = [float(x) for x in args.p0.split(",")]
    table = sweep_phase_transition(args.b, p0s, _int_list(args.depths), args.trials,
                                   seed=args.seed, budget=args.budget)
    text = table.to_csv()
    out = args.output or os.environ.get(ENV_OUTPUT)
    if out:
        path = Path(out)
        path.mkdir(parents=True, exist_ok=True)
        (path / "growth.csv").write_text(text)
    sys.stdout.write(text)
    for p0 in p0s:
        depths, means = table.series(p0)
        if len(depths) >= 4:
            fits = growth_fits(depths, means)
            print(f"# p0={p0:g} log_slope={fits['log_slope']:.4f} "
                  f"exp_residual={fits['exp_residual']:.5f} quad_residual={fits['quad_residual']:.5f}")
    return 0


def cmd_sample(args) -> int:
    cfg = _load_config(args)
    rows = []
    for trial in range(cfg.trials):
        problem = make_problem(cfg.domain, cfg.make_instance(trial))
        sampler = OnlineSampler(budget=cfg.budget).fit(problem)
        rows.append({"trial": trial, **summarize(sampler.sample_)})
    sys.stdout.write(summary_csv(rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="statereduce",
                                     description="Anytime search by state-space reduction.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a seeded batch experiment")
    _config_args(run)
    run.add_argument("--cache-dir", help="optimum cache directory")
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify", help="check algorithms against brute force")
    ver.add_argument("--config", type=Path, action="append",
                     help="small-instance config (repeatable); default: built-in suite")
    ver.add_argument("--trials", type=int, default=20)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--inject-fault", action="store_true",
                     help="inflate interior node costs to exercise the admissibility check")
    ver.set_defaults(func=cmd_verify)

    sw = sub.add_parser("sweep", help="phase-transition grid on random trees")
    sw.add_argument("--b", type=int, default=2)
    sw.add_argument("--p0", default="0.2,0.7")
    sw.add_argument("--depths", default="5-18")
    sw.add_argument("--trials", type=int, default=300)
    sw.add_argument("--seed", type=int, default=0)
    sw.add_argument("--budget", type=int, default=1_000_000)
    sw.add_argument("--output")
    sw.set_defaults(func=cmd_sweep)

    sa = sub.add_parser("sample", help="print b_hat, epsilon* and increment quantiles")
    _config_args(sa)
    sa.set_defaults(func=cmd_sample)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, EstimationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

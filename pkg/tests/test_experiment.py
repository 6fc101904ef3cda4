import json
from pathlib import Path

import pytest

from statereduce.base import ConfigurationError
from statereduce.experiment import (ENV_JOBS, ENV_OUTPUT, ExperimentConfig, OptimumCache,
                                    brute_force_optimum, default_suite, exact_optimum,
                                    run_experiment, verify)
from statereduce.cli import _inflate_bound


def small_tree(**kw):
    base = dict(domain="tree", params={"depth": 6, "branching": "fixed:3", "cost_dist": "uniform:0:99"},
                algorithms=("dfbnb", "iter_eps_dfbnb", "iter_delta_dfbnb"), budget=300, trials=4,
                seed=3, grid_points=5)
    base.update(kw)
    return ExperimentConfig(**base)


def test_config_round_trip():
    cfg = small_tree(epsilon=7, name="t1")
    again = ExperimentConfig.from_text(cfg.to_text())
    assert again == cfg and again.fingerprint() == cfg.fingerprint()
    moved = ExperimentConfig.from_text(cfg.to_text(), output="elsewhere", parallelism=3)
    assert moved.fingerprint() == cfg.fingerprint()
    assert small_tree(seed=4).fingerprint() != cfg.fingerprint()


@pytest.mark.parametrize("kw", [
    {"trials": 0}, {"domain": "chess"}, {"algorithms": ("dfbnb", "magic")},
    {"params": {"depth": 3}}, {"params": {"depth": "x", "branching": "fixed:2", "cost_dist": "uniform:0:9"}},
    {"params": {"depth": 3, "branching": "fixed:2", "cost_dist": "uniform:0:9", "width": 2}},
    {"algorithms": ("local_search",)}, {"budget": 0}, {"epsilon": -1}, {"grid_points": 0},
])
def test_config_rejects(kw, tmp_path):
    with pytest.raises(ConfigurationError):
        small_tree(output=str(tmp_path / "out"), **kw)
    assert not (tmp_path / "out").exists()


def test_config_text_errors():
    with pytest.raises(ConfigurationError):
        ExperimentConfig.from_text("param.n=5\n")
    with pytest.raises(ConfigurationError):
        ExperimentConfig.from_text("domain=atsp\nparam.n=5\ncolour=blue\n")
    with pytest.raises(ConfigurationError):
        ExperimentConfig.from_text("domain=atsp\nparam.n=5\njunk\n")


def test_checked_in_configs_load():
    for path in sorted((Path(__file__).parent.parent / "configs").glob("*.cfg")):
        ExperimentConfig.load(path)


def test_run_writes_outputs(tmp_path):
    summary = run_experiment(small_tree(), output=tmp_path / "a", cache_dir=tmp_path / "cache")
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == ["anytime.csv", "config.txt", "profiles.csv", "runs.csv", "summary.csv", "timing.csv"]
    runs = (tmp_path / "a" / "runs.csv").read_text().splitlines()
    assert len(runs) == 1 + 4 * 3
    assert runs[0].startswith("trial,instance_seed,algorithm,optimum")
    for alg in ("dfbnb", "iter_eps_dfbnb", "iter_delta_dfbnb"):
        assert summary.mean_error(alg) >= 0
        assert summary.mean_nodes(alg) <= 300
    assert summary.grid[-1] == 300 and len(summary.grid) == 5
    assert ExperimentConfig.load(tmp_path / "a" / "config.txt") == summary.config


def test_runs_are_deterministic_and_cached(tmp_path):
    cfg = small_tree()
    cache = tmp_path / "cache"
    run_experiment(cfg, output=tmp_path / "a", cache_dir=cache)
    entries = list(cache.rglob("*.json"))
    assert len(entries) == 4
    stamp = {p: p.stat().st_mtime_ns for p in entries}
    run_experiment(cfg, output=tmp_path / "b", cache_dir=cache, parallelism=2)
    assert {p: p.stat().st_mtime_ns for p in cache.rglob("*.json")} == stamp
    for name in ("runs.csv", "anytime.csv", "summary.csv", "profiles.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_env_overrides(tmp_path, monkeypatch):
    monkeypatch.setenv(ENV_OUTPUT, str(tmp_path / "env_out"))
    monkeypatch.setenv(ENV_JOBS, "1")
    run_experiment(small_tree(trials=1), cache_dir=tmp_path / "cache")
    assert (tmp_path / "env_out" / "runs.csv").exists()
    run_experiment(small_tree(trials=1), output=tmp_path / "explicit", cache_dir=tmp_path / "cache")
    assert (tmp_path / "explicit" / "runs.csv").exists()


def test_optimum_cap_skips_profiles(tmp_path):
    cfg = small_tree(optimum_cap=20, trials=2)
    summary = run_experiment(cfg, output=tmp_path / "o", cache_dir=tmp_path / "cache")
    assert summary.profile_less and summary.mean_error("dfbnb") is None
    assert not (tmp_path / "o" / "profiles.csv").exists()
    assert not list((tmp_path / "cache").rglob("*.json"))


def test_optimum_cache_layout(tmp_path):
    cache = OptimumCache(tmp_path)
    key = OptimumCache.key("atsp", {"n": 5}, 9)
    assert cache.get(key) is None
    cache.put(key, {"optimum": 12})
    assert cache.get(key) == {"optimum": 12}
    assert (tmp_path / key[:2] / f"{key}.json").exists()
    assert OptimumCache.key("atsp", {"n": 5}, 10) != key


def test_exact_optimum_agrees_with_brute_force():
    for cfg in default_suite(trials=3, seed=5):
        for t in range(3):
            inst = cfg.make_instance(t)
            assert exact_optimum(cfg.domain, inst)[0] == brute_force_optimum(cfg.domain, inst)


def test_local_search_runs(tmp_path):
    cfg = ExperimentConfig("atsp", {"n": 8}, ("eps_dfbnb", "local_search"), budget=400, trials=2)
    summary = run_experiment(cfg, output=tmp_path, cache_dir=tmp_path / "c")
    assert summary.mean_error("local_search") >= 0


def test_verify_default_suite_passes():
    report = verify(default_suite(trials=3, seed=1))
    assert report.ok and report.instances == 15 and report.checks > 0
    assert json.loads(report.to_json())["violations"] == []


def test_verify_catches_inflated_bound():
    report = verify(default_suite(trials=1)[:1], wrap=_inflate_bound)
    assert not report.ok
    assert "admissibility" in {v.check for v in report.violations}


def test_verify_rejects_empty_or_large():
    with pytest.raises(ConfigurationError):
        verify([])
    big = ExperimentConfig("atsp", {"n": 12}, ("dfbnb",))
    with pytest.raises(ConfigurationError):
        verify([big])

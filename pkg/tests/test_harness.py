"""Harness contracts: strict config validation, worker-count-independent
rows, recomputable summaries, and stable CSV bytes."""

import json
import math

import pytest

from tracelab.harness import (COLUMNS, ConfigError, ExperimentConfig,
                              emit_plot_data, evaluate_checks, load_config,
                              rows_to_csv, run_experiment, summarize,
                              write_result)

BASE = {
    "version": 1,
    "experiment": "cover",
    "graph": {"family": "complete", "n": 12},
    "trials": 20,
    "seed": 3,
}


def cfg_with(**overrides):
    data = dict(BASE)
    data.update(overrides)
    return ExperimentConfig.from_dict(data)


def test_minimal_config():
    cfg = cfg_with()
    assert cfg.experiment == "cover"
    assert cfg.trials == 20
    assert cfg.to_dict()["graph"] == {"family": "complete", "n": 12}


def test_unknown_keys_rejected_everywhere():
    with pytest.raises(ConfigError):
        cfg_with(bogus=1)
    with pytest.raises(ConfigError):
        cfg_with(params={"nope": 1})
    with pytest.raises(ConfigError):
        cfg_with(output={"folder": "x"})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({**BASE, "graph": {"family": "complete",
                                                      "n": 12, "x": 1}})
    with pytest.raises(ConfigError):
        cfg_with(experiment="strong_cover", walk={"steps": 5, "multiplier": 2.0})


def test_version_and_experiment_validation():
    with pytest.raises(ConfigError):
        cfg_with(version=2)
    with pytest.raises(ConfigError):
        cfg_with(experiment="mystery")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({k: v for k, v in BASE.items() if k != "seed"})


def test_walk_block_rules():
    with pytest.raises(ConfigError):
        cfg_with(walk={"steps": 100})  # cover takes no walk
    with pytest.raises(ConfigError):
        cfg_with(experiment="strong_cover")  # needs walk
    cfg = cfg_with(experiment="strong_cover", walk={"multiplier": 2.0})
    n = 12
    assert cfg.resolve_length(n) == math.ceil(2.0 * n * math.log(n))
    cfg = cfg_with(experiment="strong_cover", walk={"steps": 77})
    assert cfg.resolve_length(n) == 77


def test_param_validation():
    with pytest.raises(ConfigError):
        cfg_with(experiment="blanket", params={})  # delta required
    with pytest.raises(ConfigError):
        cfg_with(experiment="blanket", params={"delta": 1.5})
    with pytest.raises(ConfigError):
        cfg_with(experiment="return_probe", params={})  # horizon/walk/c needed
    cfg = cfg_with(experiment="return_probe", params={"c": 16.0})
    assert cfg.params["c"] == 16.0


def test_derived_seed_experiments_reject_graph_seed():
    with pytest.raises(ConfigError):
        cfg_with(experiment="tau",
                 graph={"family": "random_regular", "n": 12, "d": 4, "seed": 1},
                 walk={"multiplier": 4.0})
    cfg = cfg_with(experiment="tau",
                   graph={"family": "random_regular", "n": 12, "d": 4},
                   walk={"multiplier": 4.0})
    assert cfg.experiment == "tau"


def test_bounds_sweep_shape():
    cfg = ExperimentConfig.from_dict({
        "version": 1, "experiment": "bounds_sweep", "seed": 0,
        "params": {"n": 500, "d": 16, "ratios": [2.0, 4.0]},
    })
    res = run_experiment(cfg)
    assert res.columns == COLUMNS["bounds_sweep"]
    assert len(res.rows) == 2
    # ratio 2 means lambda = 8
    assert res.rows[0][2] == pytest.approx(8.0)
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({
            "version": 1, "experiment": "bounds_sweep", "seed": 0,
            "graph": {"family": "complete", "n": 5},
            "params": {"n": 500, "d": 16, "ratios": [2.0]},
        })
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({
            "version": 1, "experiment": "bounds_sweep", "seed": 0,
            "params": {"n": 500, "d": 16, "ratios": [2.0], "lambdas": [4.0]},
        })


def test_rows_identical_across_workers():
    for exp, extra in [
        ("cover", {}),
        ("strong_cover", {"walk": {"multiplier": 2.0}}),
        ("visits", {"walk": {"steps": 200}}),
        ("return_probe", {"params": {"horizon": 4}}),
    ]:
        cfg = cfg_with(experiment=exp, **extra)
        r1 = run_experiment(cfg, workers=1)
        r2 = run_experiment(cfg, workers=3)
        assert r1.rows == r2.rows, exp
        assert rows_to_csv(r1.columns, r1.rows) == rows_to_csv(r2.columns, r2.rows)


def test_trace_hamilton_and_tau_rows():
    cfg = ExperimentConfig.from_dict({
        "version": 1, "experiment": "trace_hamilton",
        "graph": {"family": "random_regular", "n": 16, "d": 4},
        "trials": 6, "seed": 2, "walk": {"multiplier": 4.0},
    })
    res = run_experiment(cfg)
    assert len(res.rows) == 6
    cols = res.columns
    for row in res.rows:
        assert row[cols.index("found")] <= row[cols.index("covered")]
    # per-trial graph seeds differ
    seeds = {row[cols.index("graph_seed")] for row in res.rows}
    assert len(seeds) == 6

    cfg = ExperimentConfig.from_dict({
        "version": 1, "experiment": "tau",
        "graph": {"family": "random_regular", "n": 16, "d": 4},
        "trials": 4, "seed": 2, "walk": {"multiplier": 6.0},
    })
    res = run_experiment(cfg, workers=2)
    cols = res.columns
    for row in res.rows:
        t1, thc = row[cols.index("tau1")], row[cols.index("tau_hc")]
        if thc is not None:
            assert thc >= t1 + 1


def test_summary_recompute_is_pure():
    cfg = cfg_with(experiment="blanket", params={"delta": 0.1}, trials=10)
    res = run_experiment(cfg)
    assert summarize("blanket", res.rows) == res.stats


def test_worst_start_units():
    cfg = cfg_with(params={"worst_start": True}, trials=3)
    res = run_experiment(cfg)
    assert len(res.rows) == 12 * 3
    assert "worst_start" in res.stats


def test_counterexample_experiment():
    cfg = ExperimentConfig.from_dict({
        "version": 1, "experiment": "counterexample",
        "graph": {"family": "counterexample", "n": 30, "c": 2},
        "trials": 4, "seed": 1,
    })
    res = run_experiment(cfg)
    assert res.stats["certified"] is True
    assert res.stats["cert_n"] == 16
    # default start is the first attachment vertex
    cols = res.columns
    assert all(row[cols.index("start")] == 0 for row in res.rows)
    with pytest.raises(ConfigError):
        cfg_with(experiment="counterexample")  # wrong family


def test_csv_formatting(tmp_path):
    cfg = cfg_with(trials=5, output={"prefix": "unit"})
    res = run_experiment(cfg)
    out = write_result(res, tmp_path)
    text = open(out.csv_path).read()
    lines = text.split("\n")
    assert lines[0] == "trial,start,cover_step,censored"
    assert len(lines) == 7  # header + 5 rows + trailing newline
    again = write_result(run_experiment(cfg), tmp_path)
    assert open(again.csv_path).read() == text
    payload = json.load(open(out.json_path))
    assert payload["stats"] == res.stats
    assert payload["config"]["experiment"] == "cover"


def test_output_dir_env_override(tmp_path, monkeypatch):
    cfg = cfg_with(trials=2, output={"dir": str(tmp_path / "cfgdir")})
    monkeypatch.setenv("TRACELAB_OUT", str(tmp_path / "envdir"))
    res = write_result(run_experiment(cfg))
    assert "envdir" in res.csv_path
    monkeypatch.delenv("TRACELAB_OUT")
    res = write_result(run_experiment(cfg))
    assert "cfgdir" in res.csv_path


def test_workers_env(monkeypatch):
    cfg = cfg_with(trials=4)
    monkeypatch.setenv("TRACELAB_WORKERS", "2")
    res = run_experiment(cfg)
    assert res.meta["workers"] == 2
    monkeypatch.setenv("TRACELAB_WORKERS", "zebra")
    with pytest.raises(ConfigError):
        run_experiment(cfg)


def test_evaluate_checks():
    stats = {"mean": 30.0, "censored": 0}
    assert evaluate_checks(stats, {"max_mean": 35.0, "min_mean": 10.0}) == []
    fails = evaluate_checks(stats, {"max_mean": 25.0})
    assert len(fails) == 1 and "mean" in fails[0]
    fails = evaluate_checks(stats, {"min_ghost": 1.0})
    assert "no field" in fails[0]


def test_check_keys_validated_at_parse():
    with pytest.raises(ConfigError):
        cfg_with(check={"mean": 30.0})
    cfg = cfg_with(check={"max_mean": 99.0})
    assert cfg.check == {"max_mean": 99.0}


def test_load_config(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(BASE))
    cfg = load_config(path)
    assert cfg.experiment == "cover"
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(path)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")


def test_emit_plot_data(tmp_path):
    covers = []
    for n in (16, 8):
        cfg = cfg_with(graph={"family": "complete", "n": n}, trials=10)
        covers.append(run_experiment(cfg))
    path = emit_plot_data(covers, "cover_vs_n", tmp_path)
    lines = open(path).read().splitlines()
    assert lines[0] == "n,trials,mean,stderr"
    assert lines[1].startswith("8,") and lines[2].startswith("16,")

    sc = run_experiment(cfg_with(experiment="strong_cover",
                                 walk={"multiplier": 2.0}, trials=10))
    path = emit_plot_data([sc], "success_vs_multiplier", tmp_path)
    assert open(path).read().splitlines()[1].startswith("2.0,")

    tau = run_experiment(ExperimentConfig.from_dict({
        "version": 1, "experiment": "tau",
        "graph": {"family": "random_regular", "n": 12, "d": 4},
        "trials": 3, "seed": 5, "walk": {"multiplier": 6.0},
    }))
    path = emit_plot_data(tau, "tau_gap_histogram", tmp_path)
    assert open(path).read().splitlines()[0] == "gap,count"

    path = emit_plot_data(covers[0], "tv_profile", tmp_path, t_max=5)
    rows = open(path).read().splitlines()
    assert rows[0] == "t,tv" and len(rows) == 7

    with pytest.raises(ConfigError):
        emit_plot_data(covers, "pie_chart", tmp_path)

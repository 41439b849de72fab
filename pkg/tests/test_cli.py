import json
import os

import numpy as np
import pytest

from uqhyp import cli
from uqhyp.cli import CASES, ConfigError, ExperimentConfig, load_config
from uqhyp.limiters import LimiterConfig


def write_config(tmp_path, payload, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def test_load_config_defaults(tmp_path):
    path = write_config(tmp_path, {"case": "burgers_sine"})
    cfg = load_config(path)
    case = CASES["burgers_sine"]
    assert cfg.n_x == case.n_x
    assert cfg.n_xi == 10
    assert cfg.k_xi == 2
    assert cfg.schemes == ["wenosg"]
    assert cfg.limiters.enable_slope is True
    assert cfg.limiters.tvbm_M == pytest.approx(case.tvbm_M)


def test_load_config_paper_scale_and_overrides(tmp_path):
    path = write_config(tmp_path, {
        "case": "burgers_sine",
        "solver": {"cfl": 0.3, "t_end": 0.1},
        "limiters": {"enable_slope": False},
    })
    cfg = load_config(path, paper_scale=True, schemes_override=["sg"],
                      output_override="elsewhere")
    assert cfg.n_x == CASES["burgers_sine"].paper_n_x
    assert cfg.cfl == 0.3
    assert cfg.t_end == 0.1
    assert cfg.schemes == ["sg"]
    assert cfg.output_dir == "elsewhere"
    assert cfg.limiters.enable_slope is False


def test_load_config_rejects_unknown_keys(tmp_path):
    with pytest.raises(ConfigError, match="unknown key"):
        load_config(write_config(tmp_path, {"case": "burgers_sine",
                                            "outputs": "x"}))
    with pytest.raises(ConfigError, match="unknown key"):
        load_config(write_config(tmp_path, {"case": "burgers_sine",
                                            "solver": {"dt": 0.1}}))
    with pytest.raises(ConfigError, match="case must be one of"):
        load_config(write_config(tmp_path, {"case": "kdv"}))
    with pytest.raises(ConfigError, match="unknown scheme"):
        load_config(write_config(tmp_path, {"case": "burgers_sine",
                                            "schemes": ["weno5"]}))
    with pytest.raises(ConfigError, match="invalid JSON"):
        path = tmp_path / "broken.json"
        path.write_text("{")
        load_config(str(path))


def test_load_config_fixed_basis(tmp_path):
    # the exact Burgers case carries a fixed stochastic discretization
    path = write_config(tmp_path, {"case": "burgers_exact",
                                   "solver": {"n_xi": 4}})
    with pytest.raises(ConfigError, match="requires n_xi=1"):
        load_config(path)
    cfg = load_config(write_config(tmp_path, {"case": "burgers_exact"}))
    assert (cfg.n_xi, cfg.k_xi) == (1, 2)


def test_load_config_sweep(tmp_path):
    path = write_config(tmp_path, {
        "case": "euler_manufactured",
        "sweep": {"parameter": "n_xi", "values": [1, 2, 3]},
    })
    cfg = load_config(path)
    assert cfg.sweep_parameter == "n_xi"
    assert cfg.sweep_values == [1, 2, 3]
    bad = write_config(tmp_path, {"case": "euler_manufactured",
                                  "sweep": {"parameter": "t_end",
                                            "values": [1]}}, "bad.json")
    with pytest.raises(ConfigError, match="sweep must be"):
        load_config(bad)


def test_main_exit_codes(tmp_path):
    # configuration error
    bad = write_config(tmp_path, {"case": "nope"})
    assert cli.main(["run", "--config", bad, "--quiet"]) == 2
    # missing config file is an I/O error
    assert cli.main(["run", "--config", str(tmp_path / "absent.json"),
                     "--quiet"]) == 4
    # unrecoverable state: Sod tube without the admissibility limiter
    crash = write_config(tmp_path, {
        "case": "euler_sod",
        "solver": {"n_x": 64},
        "limiters": {"enable_hyperbolicity": False},
        "output_dir": str(tmp_path / "crash"),
    }, "crash.json")
    assert cli.main(["run", "--config", crash, "--quiet"]) == 3


def test_run_command_outputs(tmp_path):
    out = tmp_path / "out"
    path = write_config(tmp_path, {
        "case": "burgers_exact",
        "solver": {"n_x": 16},
        "output_dir": str(out),
    })
    assert cli.main(["run", "--config", path, "--quiet"]) == 0
    stem = out / "burgers_exact_wenosg"
    field_csv = stem.with_name(stem.name + "_field.csv")
    moments_csv = stem.with_name(stem.name + "_moments.csv")
    report_json = stem.with_name(stem.name + "_report.json")
    for f in (field_csv, moments_csv, report_json):
        assert f.exists() and f.stat().st_size > 0
    header = field_csv.read_text().splitlines()[0]
    assert header == "k,i,j,component,value"
    header = moments_csv.read_text().splitlines()[0]
    assert header == "x,mean_0,var_0"
    report = json.loads(report_json.read_text())
    for key in ("scheme", "l1_mean", "tv_x", "limiter_stats", "n_x", "k_xi"):
        assert key in report
    assert report["n_x"] == 16
    assert report["k_xi"] == 2


def test_field_csv_round_trips_exactly(tmp_path):
    out = tmp_path / "out"
    path = write_config(tmp_path, {
        "case": "burgers_exact",
        "solver": {"n_x": 16},
        "output_dir": str(out),
    })
    cfg = load_config(path)
    result = cli.execute(cfg, "wenosg")
    csv_path = str(out / "roundtrip.csv")
    os.makedirs(str(out), exist_ok=True)
    cli._write_field_csv(csv_path, result)
    rows = [line.split(",") for line in
            open(csv_path).read().splitlines()[1:]]
    rebuilt = np.zeros_like(result.field)
    for k, i, j, c, v in rows:
        rebuilt[int(k), int(i), int(j), int(c)] = float(v)
    # 17 significant digits give a bit-exact float round trip
    assert np.array_equal(rebuilt, result.field)


def test_convergence_command(tmp_path):
    out = tmp_path / "conv"
    path = write_config(tmp_path, {
        "case": "burgers_exact",
        "solver": {"k_d": 0, "cfl": 0.2},
        "sweep": {"parameter": "n_x", "values": [8, 16, 32]},
        "output_dir": str(out),
    })
    assert cli.main(["convergence", "--config", path, "--quiet"]) == 0
    table = (out / "burgers_exact_wenosg_convergence.csv").read_text()
    lines = table.splitlines()
    assert lines[0] == "resolution,l1_mean,eoc_mean,l1_var,eoc_var"
    assert len(lines) == 4
    last = lines[-1].split(",")
    assert float(last[2]) == pytest.approx(1.0, abs=0.15)


def test_convergence_requires_sweep_and_analytic(tmp_path):
    no_sweep = write_config(tmp_path, {"case": "burgers_exact"})
    assert cli.main(["convergence", "--config", no_sweep, "--quiet"]) == 2
    no_exact = write_config(tmp_path, {
        "case": "burgers_sine",
        "sweep": {"parameter": "n_x", "values": [8, 16]},
    }, "noexact.json")
    assert cli.main(["convergence", "--config", no_exact, "--quiet"]) == 2


def test_tvstudy_empty_schemes_writes_empty_table(tmp_path):
    cfg = ExperimentConfig(
        case=CASES["burgers_sine"], schemes=[], sweep_parameter=None,
        sweep_values=[], output_dir=str(tmp_path), n_x=16, n_xi=2, k_xi=2,
        k_d=2, cfl=0.45, t_end=0.01, limiters=LimiterConfig(), quiet=True,
    )
    assert cli.cmd_tvstudy(cfg) == 0
    table = (tmp_path / "burgers_sine_tvstudy.csv").read_text().splitlines()
    assert table == ["scheme,n_xi,l1,tv_x,tv_xi,pct_above"]


def test_tvstudy_with_analytic_reference(tmp_path):
    out = tmp_path / "tv"
    path = write_config(tmp_path, {
        "case": "advection_riemann",
        "solver": {"n_x": 50},
        "schemes": ["wenosg"],
        "output_dir": str(out),
    })
    assert cli.main(["tvstudy", "--config", path, "--quiet"]) == 0
    lines = (out / "advection_riemann_tvstudy.csv").read_text().splitlines()
    assert lines[0] == "scheme,n_xi,l1,tv_x,tv_xi,pct_above"
    row = lines[1].split(",")
    assert row[0] == "wenosg"
    assert float(row[3]) > 0.9  # tv_x of a unit jump


def test_execute_disables_slope_for_plain_sg(tmp_path):
    path = write_config(tmp_path, {"case": "burgers_sine",
                                   "solver": {"n_x": 16, "t_end": 0.01}})
    cfg = load_config(path)
    res_sg = cli.execute(cfg, "sg")
    assert res_sg.troubled_count == 0
    res_w = cli.execute(cfg, "wenosg")
    assert res_w.troubled_count > 0


def test_threads_env_controls_workers(monkeypatch):
    monkeypatch.setenv("UQHYP_THREADS", "4")
    assert cli._n_workers() == 4
    monkeypatch.setenv("UQHYP_THREADS", "junk")
    assert cli._n_workers() == 1
    monkeypatch.delenv("UQHYP_THREADS")
    assert cli._n_workers() == 1
    assert cli._map_ordered(lambda v: v * 2, [1, 2, 3]) == [2, 4, 6]

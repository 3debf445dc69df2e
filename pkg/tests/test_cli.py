"""Command-line client: artifacts, exit codes, and determinism."""

import json

import pytest

from ntzsolver.cli import main
from ntzsolver.errors import NotConverged
from ntzsolver.forecast import ForecastProfile
from ntzsolver.simulator import SIM_CSV_HEADER
from ntzsolver.utility import CostModel, read_path_csv, utility_direct

SCURVE_KNOTS = [
    [0.0, 0.0],
    [0.5, 0.05],
    [1.0, 0.2],
    [1.5, 0.45],
    [2.0, 0.7],
    [2.5, 0.85],
    [3.0, 0.93],
    [4.0, 0.98],
    [6.0, 1.0],
]


def write_config(tmp_path, name, body):
    path = tmp_path / name
    with open(path, "w") as fh:
        json.dump(body, fh)
    return str(path)


def std_config(**extra):
    body = {
        "profile": {"kind": "Rational", "f_inf": 1.0, "gamma": 1.0},
        "cost": {"c": 0.125},
        "risk": {"k": 0.5},
    }
    body.update(extra)
    return body


def test_solve_writes_artifacts_and_path_reloads(tmp_path):
    cfg = write_config(tmp_path, "cfg.json", std_config())
    out = tmp_path / "out"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == 0

    with open(out / "solution.json") as fh:
        solution = json.load(fh)
    assert solution["status"] == "ok"
    assert solution["solution"]["tau"] == pytest.approx(1.0, abs=1e-9)
    assert solution["ntz"]["low"] == pytest.approx(0.25, abs=1e-9)

    # the written path must reproduce the reported utility when re-priced
    with open(out / "path.csv") as fh:
        path = read_path_csv(fh, initial_position=solution["initial_position"])
    recomputed = utility_direct(
        path, ForecastProfile.rational(1.0, 1.0), CostModel(0.125), 0.5
    )
    assert recomputed.total == pytest.approx(
        solution["path_utility"]["total"], rel=1e-12
    )


def test_solve_rerun_is_byte_identical(tmp_path):
    cfg = write_config(tmp_path, "cfg.json", std_config())
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["solve", "--config", cfg, "--out", str(out_a)]) == 0
    assert main(["solve", "--config", cfg, "--out", str(out_b)]) == 0
    for name in ("solution.json", "path.csv"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_solve_no_trade_exits_zero(tmp_path):
    body = std_config(profile={"kind": "Rational", "f_inf": 0.2, "gamma": 1.0})
    cfg = write_config(tmp_path, "cfg.json", body)
    out = tmp_path / "out"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == 0
    with open(out / "solution.json") as fh:
        solution = json.load(fh)
    assert solution["status"] == "no-trade"
    assert solution["solution"]["tau"] is None


def test_solve_non_concave_exits_three(tmp_path):
    body = std_config(profile={"kind": "Tabulated", "knots": SCURVE_KNOTS})
    cfg = write_config(tmp_path, "cfg.json", body)
    out = tmp_path / "out"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == 3
    with open(out / "solution.json") as fh:
        solution = json.load(fh)
    assert solution["status"] == "not-concave"
    assert not (out / "path.csv").exists()


def test_missing_risk_section_names_the_field(tmp_path, capsys):
    body = std_config()
    del body["risk"]
    cfg = write_config(tmp_path, "cfg.json", body)
    assert main(["solve", "--config", cfg, "--out", str(tmp_path)]) == 2
    assert "risk" in capsys.readouterr().err


def test_unreadable_configs_exit_two(tmp_path, capsys):
    assert main(["solve", "--config", str(tmp_path / "nope.json")]) == 2
    assert "cannot read config" in capsys.readouterr().err

    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    assert main(["solve", "--config", str(bad)]) == 2
    assert "not valid JSON" in capsys.readouterr().err

    arr = tmp_path / "arr.json"
    arr.write_text("[1, 2]")
    assert main(["solve", "--config", str(arr)]) == 2
    assert "JSON object" in capsys.readouterr().err


def test_verify_ok_then_breach(tmp_path):
    body = std_config(oracle={"dt": 5e-3, "horizon": 50.0})
    cfg = write_config(tmp_path, "ok.json", body)
    out = tmp_path / "out"
    assert main(["verify", "--config", cfg, "--out", str(out)]) == 0
    with open(out / "report.json") as fh:
        report = json.load(fh)
    assert report["status"] == "ok"
    assert report["report"]["deltas"]["first_trade_abs"] <= 5e-3

    body["tolerances"] = {"first_trade_abs": 1e-9}
    cfg = write_config(tmp_path, "tight.json", body)
    assert main(["verify", "--config", cfg, "--out", str(out)]) == 4
    with open(out / "report.json") as fh:
        report = json.load(fh)
    assert report["status"] == "tolerance-breach"
    assert report["report"]["deltas"]["first_trade_abs"] > 1e-9


def test_verify_not_converged_exits_five(tmp_path, monkeypatch):
    def blow_up(*args, **kwargs):
        raise NotConverged("oracle hit iteration cap", last_rel_change=1e-7)

    monkeypatch.setattr("ntzsolver.commands.optimize_path", blow_up)
    body = std_config(oracle={"dt": 5e-3, "horizon": 50.0})
    cfg = write_config(tmp_path, "cfg.json", body)
    out = tmp_path / "out"
    assert main(["verify", "--config", cfg, "--out", str(out)]) == 5
    with open(out / "report.json") as fh:
        report = json.load(fh)
    assert report["status"] == "not-converged"
    assert report["report"]["oracle"]["last_rel_change"] == 1e-7


def test_sweep_artifacts_and_determinism(tmp_path):
    body = {
        "profile": {"kind": "Rational", "f_inf": 1.0, "gamma": 1.0},
        "risk": {"k": 0.5},
        "sweep": {"c_min": 1e-5, "c_max": 1e-3, "n_points": 10},
    }
    cfg = write_config(tmp_path, "cfg.json", body)
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["sweep", "--config", cfg, "--out", str(out_a)]) == 0

    lines = (out_a / "sweep.csv").read_text().splitlines()
    assert lines[0] == "c,p_star,ntz_width_exact"
    assert len(lines) == 11
    assert (out_a / "sweep.svg").read_text().startswith("<svg")
    with open(out_a / "report.json") as fh:
        report = json.load(fh)
    assert 0.48 <= report["fitted_slope"] <= 0.52

    assert main(["sweep", "--config", cfg, "--out", str(out_b)]) == 0
    for name in ("sweep.csv", "sweep.svg", "report.json"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_sweep_strict_flag(tmp_path):
    body = {
        "profile": {"kind": "Rational", "f_inf": 1.0, "gamma": 1.0},
        "risk": {"k": 0.5},
        "sweep": {"c_values": [0.1, 0.3, 0.6]},
    }
    cfg = write_config(tmp_path, "cfg.json", body)
    out = tmp_path / "out"
    assert main(["sweep", "--config", cfg, "--out", str(out), "--strict"]) == 2
    assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0


def test_simulate_artifacts_and_seed_override(tmp_path):
    body = std_config(
        scenario={
            "kind": "MeanReverting",
            "rev_rate": 1.0,
            "rev_vol": 0.3,
            "seed": 42,
            "dt": 0.05,
            "steps": 40,
        }
    )
    cfg = write_config(tmp_path, "cfg.json", body)
    out_a, out_b, out_c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    assert main(["simulate", "--config", cfg, "--out", str(out_a)]) == 0

    lines = (out_a / "sim.csv").read_text().splitlines()
    assert lines[0] == SIM_CSV_HEADER
    assert len(lines) == 41
    assert (out_a / "sim.svg").read_text().startswith("<svg")
    with open(out_a / "report.json") as fh:
        report = json.load(fh)
    assert report["status"] == "ok"
    assert report["totals"]["trade_count"] >= 1

    assert main(["simulate", "--config", cfg, "--out", str(out_b)]) == 0
    for name in ("sim.csv", "sim.svg", "report.json"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()

    code = main(["simulate", "--config", cfg, "--out", str(out_c), "--seed", "43"])
    assert code == 0
    assert (out_c / "sim.csv").read_bytes() != (out_a / "sim.csv").read_bytes()


def test_unknown_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2

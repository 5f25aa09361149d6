import csv
import json
import subprocess
import sys

import pytest


def run_cli(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "spdcpol.cli", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
    )


def test_budget_runs_clean(tmp_path):
    out = tmp_path / "out"
    result = run_cli("budget", "--out", str(out))
    assert result.returncode == 0, result.stderr
    payload = json.loads((out / "budget.json").read_text())
    assert payload["command"] == "budget"
    assert "config" in payload and "detector" in payload["config"]
    assert abs(payload["scalars"]["power_in_guide_mw"] - 1.3286) < 1e-6


def test_fringe_csv_layout(tmp_path):
    out = tmp_path / "out"
    result = run_cli("fringe", "--preset", "paper-calibrated", "--out", str(out), "--seed", "4")
    assert result.returncode == 0, result.stderr
    for stem in ("fringe_theta1_0.csv", "fringe_theta1_45.csv"):
        with open(out / stem, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["theta2_deg", "prob_model", "counts_raw", "counts_acc", "counts_sub"]
        assert len(rows) == 38  # header + 37 grid points
    payload = json.loads((out / "fringe.json").read_text())
    assert payload["tables"] == {
        "theta1_0": "fringe_theta1_0.csv",
        "theta1_45": "fringe_theta1_45.csv",
    }


def test_delay_scan_csv_layout(tmp_path):
    out = tmp_path / "out"
    result = run_cli("delay-scan", "--preset", "gvd-off", "--out", str(out))
    assert result.returncode == 0, result.stderr
    with open(out / "delay_scan_curve.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["tau_fs", "v_int_abs"]
    payload = json.loads((out / "delay_scan.json").read_text())
    assert abs(payload["scalars"]["tau_star_fs"] - 22.25) < 0.1
    assert payload["scalars"]["reference_delay_experiment_fs"] == 32.0
    assert payload["scalars"]["reference_delay_calculated_fs"] == 31.2
    assert "note" in " ".join(payload["scalars"]) or payload["scalars"]["delay_model_note"]


def test_s_curve_csv_layout(tmp_path):
    out = tmp_path / "out"
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        json.dumps(
            {
                "preset": "paper-ideal",
                "run": {"s_curve_theta_deg": {"start": 0.0, "stop": 90.0, "step": 15.0}},
            }
        )
    )
    result = run_cli("s-curve", "--config", str(cfg), "--out", str(out))
    assert result.returncode == 0, result.stderr
    with open(out / "s_curve_curve.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["theta_deg", "s_model", "s_sim", "sigma_s"]
    assert len(rows) == 8  # header + 7 angles


def test_chsh_counts_table(tmp_path):
    out = tmp_path / "out"
    result = run_cli("chsh", "--preset", "raw-visibility", "--out", str(out), "--seed", "2")
    assert result.returncode == 0, result.stderr
    with open(out / "chsh_counts.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["arm1_index", "arm2_index", "angle1_deg", "angle2_deg", "counts"]
    assert len(rows) == 17  # header + 16 settings
    payload = json.loads((out / "chsh.json").read_text())
    assert abs(payload["scalars"]["s_model"] - 2.2203) < 1e-3


def test_unknown_key_exits_2(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"detector": {"gate_widht_ns": 100}}))
    result = run_cli("fringe", "--config", str(cfg), "--out", str(tmp_path / "o"))
    assert result.returncode == 2
    err_lines = [l for l in result.stderr.strip().splitlines() if l]
    assert len(err_lines) == 1
    assert err_lines[0].startswith("CONFIG_ERROR:")
    assert "detector.gate_widht_ns" in err_lines[0]


def test_missing_config_exits_2(tmp_path):
    result = run_cli("budget", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path))
    assert result.returncode == 2
    assert result.stderr.startswith("CONFIG_ERROR:")


def test_degenerate_spectrum_exits_3(tmp_path):
    # filter band entirely off-degeneracy: the pair spectrum has empty support
    cfg = tmp_path / "degenerate.json"
    cfg.write_text(
        json.dumps(
            {
                "filter": {"shape": "top_hat", "center_nm": 1540.0, "fwhm_nm": 2.0},
                "grid": {"omega_max_rad_s": 3.0e13, "n_points": 2049},
            }
        )
    )
    result = run_cli("delay-scan", "--config", str(cfg), "--out", str(tmp_path / "o"))
    assert result.returncode == 3
    err_lines = [l for l in result.stderr.strip().splitlines() if l]
    assert len(err_lines) == 1
    assert err_lines[0].startswith("NUMERICAL_ERROR:")


def test_same_seed_reproduces_bytes(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        result = run_cli("chsh", "--preset", "paper-calibrated", "--out", str(out), "--seed", "8")
        assert result.returncode == 0, result.stderr
    assert (a / "chsh.json").read_bytes() == (b / "chsh.json").read_bytes()
    assert (a / "chsh_counts.csv").read_bytes() == (b / "chsh_counts.csv").read_bytes()


def test_round_trip_from_config_echo(tmp_path):
    first = tmp_path / "first"
    result = run_cli("chsh", "--preset", "raw-visibility", "--out", str(first), "--seed", "21")
    assert result.returncode == 0, result.stderr
    payload = json.loads((first / "chsh.json").read_text())

    echo_cfg = tmp_path / "echo.json"
    echo_cfg.write_text(json.dumps(payload["config"]))
    second = tmp_path / "second"
    result = run_cli("chsh", "--config", str(echo_cfg), "--out", str(second))
    assert result.returncode == 0, result.stderr
    assert (first / "chsh.json").read_bytes() == (second / "chsh.json").read_bytes()
    assert (first / "chsh_counts.csv").read_bytes() == (second / "chsh_counts.csv").read_bytes()


def test_seed_flag_changes_counts(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run_cli("chsh", "--preset", "paper-calibrated", "--out", str(a), "--seed", "1")
    run_cli("chsh", "--preset", "paper-calibrated", "--out", str(b), "--seed", "2")
    assert (a / "chsh_counts.csv").read_bytes() != (b / "chsh_counts.csv").read_bytes()


@pytest.mark.parametrize("command", ["fringe", "delay-scan", "chsh", "s-curve", "budget"])
def test_all_subcommands_exist(command):
    result = run_cli(command, "--help")
    assert result.returncode == 0
    assert "--config" in result.stdout and "--preset" in result.stdout

import json

import pytest

from movingwave.cli import main

GEO = {"ell1": 0.1, "ell2": 0.3, "L0": 1.0}
SINE = {"preset": "sine_bump", "power": 6, "velocity_amplitude": 0.3}


def write_config(tmp_path, body, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(body))
    return str(path)


def test_geometry_command(tmp_path, capsys):
    cfg = write_config(tmp_path, {"geometry": GEO})
    out_csv = tmp_path / "geo.csv"
    code = main(["geometry", "--config", cfg, "--out", str(out_csv)])
    captured = capsys.readouterr().out
    assert code == 0
    assert "t0=2.5" in captured
    assert out_csv.exists()
    assert (tmp_path / "geo.meta.json").exists()


def test_schema_violation_exits_2(tmp_path, capsys):
    cfg = write_config(tmp_path, {"geometry": {"ell1": 0.1, "ell2": 0.3,
                                               "L0": 1.0},
                                  "bogus_section": {}})
    assert main(["geometry", "--config", cfg]) == 2


def test_invalid_json_exits_2(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert main(["geometry", "--config", str(path)]) == 2


def test_missing_initial_data_exits_2(tmp_path):
    cfg = write_config(tmp_path, {"geometry": GEO})
    assert main(["solve", "--config", cfg]) == 2


def test_solve_with_artifacts_and_plot(tmp_path, capsys):
    cfg = write_config(tmp_path, {
        "geometry": GEO, "initial_data": SINE,
        "solve": {"N": 16, "nx": 12, "nt": 10}})
    out_csv = tmp_path / "field.csv"
    code = main(["solve", "--config", cfg, "--out", str(out_csv), "--plot"])
    assert code == 0
    assert out_csv.exists()
    assert (tmp_path / "field.meta.json").exists()
    assert (tmp_path / "field.png").exists()
    header = out_csv.read_text().splitlines()[0]
    assert header == "x,t,phi,phi_x,phi_t"
    meta = json.loads((tmp_path / "field.meta.json").read_text())
    assert "config_sha256" in meta


def test_energy_scan_assert_passes(tmp_path, capsys):
    cfg = write_config(tmp_path, {
        "geometry": GEO, "initial_data": SINE,
        "energy_scan": {"N": 24, "num": 6}})
    out_csv = tmp_path / "scan.csv"
    code = main(["energy-scan", "--config", cfg, "--out", str(out_csv),
                 "--plot", "--assert"])
    captured = capsys.readouterr().out
    assert code == 0
    assert "check:energy_identity=pass" in captured
    assert "check:envelope=pass" in captured
    assert (tmp_path / "scan.png").exists()


def test_observe_assert_detects_failure(tmp_path, capsys):
    # the asymmetric two-endpoint windows genuinely fail at M = 2, so an
    # asserted run must exit with status 3
    cfg = write_config(tmp_path, {
        "geometry": GEO, "initial_data": SINE,
        "observe": {"N": 24, "mode": "two_endpoint", "M_values": [1, 2]}})
    code = main(["observe", "--config", cfg, "--assert"])
    captured = capsys.readouterr().out
    assert code == 3
    assert "check:identity_M1=pass" in captured
    assert "check:identity_M2=FAIL" in captured


def test_observe_one_endpoint_passes(tmp_path, capsys):
    cfg = write_config(tmp_path, {
        "geometry": GEO, "initial_data": SINE,
        "observe": {"N": 24, "mode": "one_endpoint", "side": "right",
                    "M_values": [1, 2, 3], "T": 4.0}})
    code = main(["observe", "--config", cfg, "--assert"])
    captured = capsys.readouterr().out
    assert code == 0
    assert "feasible=True" in captured


def test_counterexample_command(tmp_path, capsys):
    cfg = write_config(tmp_path, {
        "geometry": GEO,
        "counterexample": {"epsilon": 0.2, "N": 256, "tolerance": 1e-3,
                           "trace_samples": 256}})
    out_csv = tmp_path / "trace.csv"
    code = main(["counterexample", "--config", cfg, "--out", str(out_csv),
                 "--plot", "--assert"])
    captured = capsys.readouterr().out
    assert code == 0
    assert "check:silent_traces=pass" in captured
    assert (tmp_path / "trace.png").exists()


def test_compare_oracle_command(tmp_path, capsys):
    cfg = write_config(tmp_path, {
        "geometry": GEO,
        "initial_data": {"preset": "sine_bump", "power": 8,
                         "velocity_amplitude": 0.3},
        "compare_oracle": {"N": 32, "nx": 12, "nt": 12,
                           "tolerance": 1e-5}})
    code = main(["compare-oracle", "--config", cfg, "--assert"])
    captured = capsys.readouterr().out
    assert code == 0
    assert "check:oracle_match_phi=pass" in captured


def test_control_command_smoke(tmp_path, capsys):
    cfg = write_config(tmp_path, {
        "geometry": GEO,
        "initial_data": {"preset": "sine_bump", "power": 6},
        "control": {"T_factor": 1.0, "n": 64, "trace_n": 512,
                    "tol": 1e-3, "max_iter": 10}})
    out_csv = tmp_path / "control.csv"
    code = main(["control", "--config", cfg, "--out", str(out_csv),
                 "--plot"])
    captured = capsys.readouterr().out
    assert code == 0
    assert "iterations=" in captured
    assert out_csv.exists()
    assert (tmp_path / "control.png").exists()

import json

import numpy as np
import pytest

from heisrect.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_svf_single_value(capsys):
    code, out, _ = run(capsys, "svf", "--kind", "type2", "--n", "1", "--d", "1",
                       "--r1", "0.25", "--r2", "0.5", "--t", "4")
    assert code == 0
    assert out.splitlines()[1] == "4,0.03125"
    code, out, _ = run(capsys, "svf", "--kind", "type1", "--n", "1", "--d", "1",
                       "--r1", "1", "--r2", "0.5", "--t", "3")
    assert code == 0
    assert float(out.splitlines()[1].split(",")[1]) == pytest.approx(0.5)


def test_svf_grid_includes_breakpoints(capsys):
    code, out, _ = run(capsys, "svf", "--kind", "type1", "--n", "1", "--d", "1",
                       "--r1", "1", "--r2", "0.5", "--t-step", "0.3")
    assert code == 0
    ts = [float(line.split(",")[0]) for line in out.splitlines()[1:]]
    for b in (1.0, 3.0):  # branch breakpoints for this aspect
        assert b in ts
    assert ts == sorted(ts)


def test_svf_equal_radii_is_power(capsys):
    code, out, _ = run(capsys, "svf", "--kind", "type2", "--n", "1", "--d", "1",
                       "--r1", "0.5", "--r2", "0.5", "--t-step", "0.5")
    rows = [line.split(",") for line in out.splitlines()[1:]]
    for t_str, phi_str in rows:
        assert float(phi_str) == pytest.approx(0.5 ** float(t_str), rel=1e-12)


def test_predict(capsys):
    code, out, _ = run(capsys, "predict", "--kind", "type1", "--n", "1", "--d", "1",
                       "--alpha1", "0.5", "--alpha2", "1")
    assert code == 0
    assert json.loads(out)["predicted_dimension"] == pytest.approx(5.0 / 3.0)


def test_measure(capsys):
    code, out, _ = run(capsys, "measure", "--kind", "euclid", "--n", "1",
                       "--r1", "1", "--r2", "1")
    assert code == 0
    assert json.loads(out)["measure"] == pytest.approx(2 * np.pi)


def test_usage_error_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["svf", "--kind", "type1"])  # missing required flags
    assert exc.value.code == 2
    # bad domain values are also usage errors, exit 2
    code, _, err = run(capsys, "svf", "--kind", "type1", "--n", "1", "--d", "1",
                       "--r1", "1", "--r2", "0.5", "--t", "9")
    assert code == 2


def test_verify_content_pass_and_fail(capsys, tmp_path):
    base = ["verify-content", "--kind", "type1", "--n", "1", "--d", "1",
            "--gamma1", "1", "--gamma2", "1", "--t", "2",
            "--scales", "0.8,0.4,0.2,0.1", "--budget", "60000",
            "--seed", "7", "--tol", "0.15"]
    out_path = tmp_path / "rep"
    code, _, err = run(capsys, *base, "--out", str(out_path))
    assert code == 0
    report = json.loads((tmp_path / "rep.json").read_text())
    assert abs(report["slope"] - report["theory_slope"]) <= 0.15
    assert (tmp_path / "rep.csv").read_text().startswith("scale,")
    manifest = json.loads((tmp_path / "rep.manifest.json").read_text())
    assert manifest["subcommand"] == "verify-content"
    assert manifest["seed"] == 7
    # a deliberately wrong theory slope fails with exit 1
    code, _, _ = run(capsys, *base, "--theory-slope", "9.0")
    assert code == 1


def test_config_file_with_flag_override(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"kind": "type2", "n": 1, "d": 1,
                               "alpha1": 1.0, "alpha2": 2.0}))
    code, out, _ = run(capsys, "predict", "--config", str(cfg))
    assert code == 0
    assert json.loads(out)["predicted_dimension"] == pytest.approx(1.0)
    code, out, _ = run(capsys, "predict", "--config", str(cfg), "--alpha1", "0.25",
                       "--alpha2", "0.25")
    assert json.loads(out)["predicted_dimension"] == pytest.approx(4.0)


def test_seed_drawn_and_recorded(capsys, tmp_path):
    out_path = tmp_path / "cloud.csv"
    code, _, _ = run(capsys, "cloud", "--kind", "type1", "--d", "1",
                     "--r1", "0.5", "--r2", "0.5", "--count", "100",
                     "--out", str(out_path))
    assert code == 0
    manifest = json.loads((tmp_path / "cloud.csv.manifest.json").read_text())
    assert isinstance(manifest["seed"], int)
    for key in ("config_digest", "worker_count", "version", "wall_time_s"):
        assert key in manifest


def test_cloud_reproducible_bytes(capsys, tmp_path):
    args = ["cloud", "--kind", "type2", "--d", "1", "--r1", "1", "--r2", "0.5",
            "--count", "500", "--seed", "9"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, *args, "--out", str(a))[0] == 0
    assert run(capsys, *args, "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    header, first = a.read_text().splitlines()[:2]
    assert header == "x,y,z,inside"
    assert len(first.split(",")) == 4


def test_workers_env(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("HEIS_WORKERS", "4")
    out_path = tmp_path / "m.json"
    code, _, _ = run(capsys, "measure", "--kind", "type1", "--n", "1",
                     "--r1", "1", "--r2", "1", "--out", str(out_path))
    assert code == 0
    manifest = json.loads((tmp_path / "m.json.manifest.json").read_text())
    assert manifest["worker_count"] == 4


def test_simulate_invalid_fit_exit_1(capsys):
    code, _, err = run(capsys, "simulate", "--n", "1", "--kind", "type1",
                       "--d", "1", "--alpha1", "1", "--alpha2", "1",
                       "--stage-start", "4", "--stage-end", "30",
                       "--eps-ladder", "0.25,0.125,0.0625,0.03125,0.015625",
                       "--points-per-rect", "40", "--seed", "1")
    assert code == 1

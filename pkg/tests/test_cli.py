"""Command-line behavior: configs, reports, exit codes."""

import json
import subprocess
import sys

import pytest

from fracppp.cli import ConfigError, dump_config, load_config, main

MODEL_INTERIOR = {"r": 15.0, "K": 40.0, "lambda": 0.006, "m": 14.5,
                  "mu": 0.0019, "a": 16.0, "theta": 11.1, "d": 6.0}
MODEL_PREY_ONLY = {"r": 2.0, "K": 40.0, "lambda": 0.005, "m": 0.52,
                   "mu": 0.28, "a": 15.0, "theta": 0.189, "d": 0.09}
MODEL_DIVERGING = {"r": 2.0, "K": 200.0, "lambda": 0.015, "m": 0.52,
                   "mu": 0.28, "a": 15.0, "theta": 0.08, "d": 0.09}


def write_config(tmp_path, name="run.json", **overrides):
    cfg = {"model": dict(MODEL_PREY_ONLY), "alpha": 0.8, "s": 0.65,
           "init": [30.0, 5.0, 10.0]}
    cfg.update(overrides)
    cfg = {k: v for k, v in cfg.items() if v is not None}  # None means omit
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def test_load_rejects_unknown_top_level_key(tmp_path):
    path = write_config(tmp_path, stepsize=0.5)
    with pytest.raises(ConfigError, match="stepsize"):
        load_config(path)
    assert main(["simulate", "--config", path]) == 2


def test_load_rejects_unknown_model_key(tmp_path):
    model = dict(MODEL_PREY_ONLY)
    model["lamda"] = 0.005
    path = write_config(tmp_path, model=model)
    with pytest.raises(ConfigError, match="lamda"):
        load_config(path)


def test_load_rejects_missing_model_key(tmp_path):
    model = dict(MODEL_PREY_ONLY)
    del model["theta"]
    path = write_config(tmp_path, model=model)
    with pytest.raises(ConfigError, match="theta"):
        load_config(path)


def test_load_rejects_bad_json_and_missing_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["simulate", "--config", str(bad)]) == 2
    assert main(["simulate", "--config", str(tmp_path / "absent.json")]) == 2


def test_load_rejects_unknown_sim_key(tmp_path):
    path = write_config(tmp_path, sim={"steps": 100})
    assert main(["simulate", "--config", path]) == 2


def test_dump_config_round_trip(tmp_path, capsys):
    path = write_config(tmp_path, sim={"n_steps": 5000, "transient": 1000},
                        n_points=50, axis="s", output_dir="somewhere")
    assert main(["simulate", "--config", path, "--dump-config"]) == 0
    dumped = capsys.readouterr().out
    path2 = tmp_path / "dumped.json"
    path2.write_text(dumped)
    assert load_config(str(path2)) == load_config(path)


def test_dump_config_preserves_alpha_list(tmp_path):
    path = write_config(tmp_path, alpha=[0.3, 0.8], s=None)
    cfg = load_config(path)
    assert cfg.alpha == (0.3, 0.8)
    rewritten = tmp_path / "again.json"
    rewritten.write_text(json.dumps(dump_config(cfg)))
    assert load_config(str(rewritten)) == cfg


def test_simulate_happy_path(tmp_path, capsys):
    path = write_config(tmp_path, sim={"n_steps": 3000, "transient": 1000})
    out = tmp_path / "out"
    assert main(["simulate", "--config", path, "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "converged to E1" in printed
    csv = (out / "trajectory.csv").read_text()
    assert csv.startswith("step,X,Y,Z\n0,30.0,5.0,10.0\n")
    assert csv.rstrip().endswith("# outcome: converged to E1")


def test_simulate_divergence_exit_code(tmp_path):
    path = write_config(tmp_path, model=MODEL_DIVERGING, s=0.85)
    out = tmp_path / "out"
    assert main(["simulate", "--config", path, "--out", str(out)]) == 3
    assert "diverged at step 58" in (out / "trajectory.csv").read_text()


def test_simulate_rejects_zero_step_size(tmp_path):
    path = write_config(tmp_path, s=0.0)
    assert main(["simulate", "--config", path]) == 2


def test_simulate_requires_init(tmp_path):
    cfg = {"model": dict(MODEL_PREY_ONLY), "alpha": 0.8, "s": 0.65}
    path = tmp_path / "noinit.json"
    path.write_text(json.dumps(cfg))
    assert main(["simulate", "--config", str(path)]) == 2


def test_fixed_points_report(tmp_path):
    path = write_config(tmp_path, model=MODEL_INTERIOR, s=0.05)
    out = tmp_path / "out"
    assert main(["fixed-points", "--config", path, "--out", str(out)]) == 0
    report = (out / "fixed_points.txt").read_text()
    assert "R0 = 126.3157895" in report
    assert "theta1 = 8.457858043" in report
    assert "rho = " in report
    assert "E*: (20.87529412, 18.82352941, 0.2962444004)" in report
    assert "classification: sink" in report


def test_fixed_points_marks_nonexistent(tmp_path):
    path = write_config(tmp_path)  # lambda*K < mu for this set
    out = tmp_path / "out"
    assert main(["fixed-points", "--config", path, "--out", str(out)]) == 0
    report = (out / "fixed_points.txt").read_text()
    assert "E2: does not exist" in report
    assert "E*: does not exist" in report


def test_thresholds_report(tmp_path):
    path = write_config(tmp_path, alpha=[0.8], s=None)
    out = tmp_path / "out"
    assert main(["thresholds", "--config", path, "--out", str(out)]) == 0
    report = (out / "thresholds.txt").read_text()
    assert "s2 = 44.1464" in report
    assert "s3 = 0.9150" in report
    assert "s4 = 51.1488" in report
    assert "s5 = -" in report
    assert "E1: stable iff s < min(s2, s3, s4) = 0.914978" in report

    path = write_config(tmp_path, name="run2.json", model=MODEL_INTERIOR,
                        alpha=[0.8], s=None)
    out2 = tmp_path / "out2"
    assert main(["thresholds", "--config", path, "--out", str(out2)]) == 0
    report = (out2 / "thresholds.txt").read_text()
    assert "s8 = 0.1662" in report
    assert "s9 = 0.0780" in report


def test_bifurcate_rejects_degenerate_range(tmp_path):
    path = write_config(tmp_path, s=[0.5, 0.5])
    assert main(["bifurcate", "--config", path]) == 2


def test_bifurcate_rejects_alpha_list_on_s_axis(tmp_path):
    path = write_config(tmp_path, alpha=[0.3, 0.8], s=[0.5, 0.6])
    assert main(["bifurcate", "--config", path]) == 2


def test_bifurcate_outputs_and_byte_stability(tmp_path, capsys):
    # odd record_every so a period-2 attractor is sampled on both phases
    path = write_config(tmp_path, s=[0.90, 1.00], n_points=4,
                        sim={"n_steps": 2000, "transient": 1000, "record_every": 7})
    out1 = tmp_path / "o1"
    out2 = tmp_path / "o2"
    assert main(["bifurcate", "--config", path, "--out", str(out1)]) == 0
    first = capsys.readouterr().out
    assert "first instability at s = " in first
    assert main(["bifurcate", "--config", path, "--out", str(out2), "--jobs", "2"]) == 0
    for name in ("bifurcation.csv", "bifurcation.dat"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    header = (out1 / "bifurcation.csv").read_text().splitlines()[0]
    assert header == "s,sample"


def test_lyapunov_outputs(tmp_path, capsys):
    path = write_config(tmp_path, model=MODEL_INTERIOR, s=[0.071, 0.074],
                        n_points=3, init=[20.8752941, 18.8235294, 0.2962444],
                        sim={"n_steps": 5000, "transient": 0})
    out = tmp_path / "out"
    assert main(["lyapunov", "--config", path, "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "no sign change" in printed
    csv = (out / "lyapunov.csv").read_text().splitlines()
    assert csv[0] == "s,lle"
    assert len(csv) == 4
    assert (out / "lyapunov.dat").exists()


def test_module_entry_point_help():
    proc = subprocess.run([sys.executable, "-m", "fracppp", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "thresholds" in proc.stdout and "bifurcate" in proc.stdout

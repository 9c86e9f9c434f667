"""End-to-end command-line runs in subprocesses: exit codes, report files,
and byte-level determinism."""

import json
import subprocess
import sys

import numpy as np
import pytest

from ddt7.torus import load_field, load_flux

E12 = [1.0] + [0.0] * 20


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "ddt7.cli", *args],
                          capture_output=True, text=True, timeout=600)


def write_config(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def read_report(out_dir):
    with open(out_dir / "report.json") as fh:
        return json.load(fh)


def test_verify_mutated_identity_fails(tmp_path):
    out = tmp_path / "out"
    r = run_cli("verify", "--mutate", "A5", "--out", str(out))
    assert r.returncode == 1
    rep = read_report(out)
    assert rep["pass"] is False
    (ident,) = rep["identities"]
    assert not ident["reduced_to_zero"]
    assert ident["witness"]["monomial"] == "u_7^3"


def test_verify_full_catalog_and_determinism(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    r1 = run_cli("verify", "--float-samples", "3", "--out", str(out1))
    assert r1.returncode == 0, r1.stderr
    assert "wall time" in r1.stdout
    r2 = run_cli("verify", "--float-samples", "3", "--out", str(out2))
    assert r2.returncode == 0
    assert (out1 / "report.json").read_bytes() == (out2 / "report.json").read_bytes()
    rep = read_report(out1)
    assert rep["pass"] is True
    assert len(rep["identities"]) == 12
    assert rep["float_suite"]["pass"] is True
    assert "wall" not in json.dumps(rep)  # timing never lands in the report


def test_decompose_known_form(tmp_path):
    cfg = write_config(tmp_path, "c.json", {"coefficients": E12})
    out = tmp_path / "out"
    r = run_cli("decompose", "--config", cfg, "--out", str(out))
    assert r.returncode == 0, r.stderr
    rep = read_report(out)
    u = np.array(rep["u"])
    assert np.allclose(u, [0, 0, 1 / 3, 0, 0, 0, 0], rtol=0, atol=1e-14)
    assert rep["det_metric"] > 0
    assert all(c["pass"] for c in rep["checks"].values())


def test_instanton_obstructed_exit_code(tmp_path):
    cfg = write_config(tmp_path, "c.json", {"flux": {"1,2": 1}})
    out = tmp_path / "out"
    r = run_cli("instanton", "--config", cfg, "--out", str(out))
    assert r.returncode == 3
    rep = read_report(out)
    assert rep["obstructed"] is True
    assert "Chern class" in rep["message"]


def test_instanton_writes_snapshot(tmp_path):
    cfg = write_config(tmp_path, "c.json",
                       {"flux": {"1,2": 1, "4,7": 1},
                        "grid": {"axes": [1, 2], "N": 4}})
    out = tmp_path / "out"
    r = run_cli("instanton", "--config", cfg, "--out", str(out))
    assert r.returncode == 0, r.stderr
    pot = load_field(out / "potential.t7f")
    assert pot.k == 1 and not np.any(pot.values)
    flux = load_flux(out / "flux.txt")
    assert flux.upper[0] == 1
    rep = read_report(out)
    assert rep["vector_part_l2"] <= 1e-12
    assert rep["a_l2"] == 0.0


def test_flow_then_cylinder_pipeline(tmp_path):
    flow_cfg = write_config(tmp_path, "flow.json", {
        "flux": {"1,2": 1, "4,7": 1},
        "grid": {"axes": [1, 2], "N": 4},
        "dt": 1e-3, "steps": 30, "scheme": "rk4",
        "record_every": 10, "seed": 7, "initial_scale": 0.05,
    })
    flow_out = tmp_path / "flow_out"
    r = run_cli("flow", "--config", flow_cfg, "--out", str(flow_out))
    assert r.returncode == 0, r.stderr
    rep = read_report(flow_out)
    assert rep["termination"] == "completed"
    assert rep["monotone"]["non_decreasing"] is True
    csv = (flow_out / "trajectory.csv").read_text().splitlines()
    assert csv[0] == "t,functional,residual_l2,theta_min"
    assert len(csv) == 32  # header + 31 recorded steps

    cyl_cfg = write_config(tmp_path, "cyl.json",
                           {"trajectory": str(flow_out), "tol": 1e-2})
    cyl_out = tmp_path / "cyl_out"
    r2 = run_cli("cylinder", "--config", cyl_cfg, "--out", str(cyl_out))
    assert r2.returncode == 0, r2.stderr
    crep = read_report(cyl_out)
    assert crep["pass"] is True
    assert crep["check"]["spacing"] == pytest.approx(0.01)
    assert crep["check"]["max_res1"] < 1e-2


def test_continue_short_schedule(tmp_path):
    cfg = write_config(tmp_path, "c.json", {
        "flux": {"1,2": 1, "4,7": 1},
        "grid": {"axes": [1, 2], "N": 4},
        "schedule": [0.0, 0.25, 1.0],
    })
    out = tmp_path / "out"
    r = run_cli("continue", "--config", cfg, "--out", str(out))
    assert r.returncode == 0, r.stderr
    rep = read_report(out)
    assert rep["termination"] == "completed"
    assert [s["s"] for s in rep["steps"]] == [0.0, 0.25, 1.0]
    assert all(s["residual_norm"] <= 1e-10 for s in rep["steps"])
    pot = load_field(out / "potential.t7f")
    assert pot.k == 1


def test_continue_obstructed_exit_code(tmp_path):
    cfg = write_config(tmp_path, "c.json", {
        "flux": {"1,2": 1, "4,7": 2, "5,6": -1},
        "grid": {"axes": [1, 2], "N": 4},
    })
    out = tmp_path / "out"
    r = run_cli("continue", "--config", cfg, "--out", str(out))
    assert r.returncode == 3
    rep = read_report(out)
    assert "obstruction" in rep["termination"]


def test_moment_checks_pass(tmp_path):
    cfg = write_config(tmp_path, "c.json", {"samples": 2, "seed": 1})
    out = tmp_path / "out"
    r = run_cli("moment", "--config", cfg, "--out", str(out))
    assert r.returncode == 0, r.stderr
    rep = read_report(out)
    assert rep["pass"] is True
    assert rep["checks"]["theta3_antisymmetry"]["max"] == 0.0


def test_unknown_config_key_is_rejected(tmp_path):
    cfg = write_config(tmp_path, "c.json", {"tyop": 1})
    r = run_cli("verify", "--config", cfg, "--out", str(tmp_path / "o"))
    assert r.returncode == 2
    assert "tyop" in r.stderr


def test_malformed_flux_is_rejected(tmp_path):
    cfg = write_config(tmp_path, "c.json", {"flux": {"2,1": 1}})
    r = run_cli("instanton", "--config", cfg, "--out", str(tmp_path / "o"))
    assert r.returncode == 2


def test_missing_subcommand_is_usage_error(tmp_path):
    r = run_cli()
    assert r.returncode == 2

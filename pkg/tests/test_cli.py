import json
import os

import numpy as np
import pytest

from hermlab import cli
from hermlab.cli import ConfigError, load_config, main, run, validate


def _write(tmp_path, name, payload):
    p = tmp_path / name
    p.write_text(json.dumps(payload), encoding="utf-8")
    return str(p)


def _full_scan(outdir):
    return {
        "kind": "spectral-scan",
        "seed": 0,
        "output_dir": outdir,
        "parameters": {"N_values": [0, 4, 8], "omega": {"type": "full", "dim": 1}},
        "acceptance": [{"metric": "max_abs_cn_minus_1", "op": "<=", "value": 1e-8}],
    }


def test_validate_accepts_runnable_config(tmp_path):
    assert validate(_full_scan(str(tmp_path))) == []


def test_validate_epsilon_message():
    cfg = _full_scan(".")
    cfg["parameters"]["epsilon"] = 1.5
    msgs = [d.message for d in validate(cfg)]
    assert "ε must lie in (0,1]" in msgs


def test_validate_s_messages():
    cfg = {
        "kind": "dissipation",
        "parameters": {"s": 0.5, "k_values": [2], "t_values": [0.1], "degree": 5},
    }
    msgs = [d.message for d in validate(cfg)]
    assert "s must exceed 1/2" in msgs
    cfg["parameters"]["s"] = 1.3
    msgs = [d.message for d in validate(cfg)]
    assert "s must not exceed 1" in msgs


def test_validate_delta_message():
    cfg = {
        "kind": "control-run",
        "parameters": {
            "s": 0.6,
            "delta": 0.3,
            "N": 4,
            "T": 1.0,
            "omega": {"type": "periodic", "period": 2.0, "kept": 0.5},
        },
    }
    diags = validate(cfg)
    assert any(d.message == "δ < 2s−1 required" for d in diags)
    assert any(d.field == "parameters.delta" for d in diags)


def test_validate_is_total_on_junk():
    assert validate(42) != []
    assert validate({"kind": "nonsense"}) != []
    assert validate({"kind": "covering", "parameters": {}}) != []


def test_run_writes_manifest_last(tmp_path):
    cfg = _full_scan(str(tmp_path / "out"))
    manifest = run(cfg)
    outdir = tmp_path / "out"
    assert (outdir / "manifest.json").exists()
    listed = set(manifest["files"])
    assert listed == {"spectral.csv", "spectral.gp"}
    for name in listed:
        assert (outdir / name).exists()
    assert manifest["acceptance"]["passed"] is True
    assert manifest["tool_version"]
    assert len(manifest["config_hash"]) == 64


def test_csv_dialect(tmp_path):
    run(_full_scan(str(tmp_path)))
    raw = (tmp_path / "spectral.csv").read_bytes()
    assert b"\r" not in raw
    text = raw.decode()
    assert text.splitlines()[0] == "N,lambda_min,C_N,quad_tol"
    assert ";" not in text


def test_determinism_byte_identical(tmp_path):
    cfg = {
        "kind": "spectral-scan",
        "seed": 11,
        "parameters": {
            "N_values": [10, 20, 30, 40, 50],
            "epsilon": 0.5,
            "omega": {
                "type": "graded",
                "density": {"kind": "power", "R": 1.0, "eps": 0.5},
                "gamma": 0.5,
                "extent": 25.0,
            },
        },
    }
    run(cfg, out_override=str(tmp_path / "a"))
    run(cfg, out_override=str(tmp_path / "b"))
    assert (tmp_path / "a" / "spectral.csv").read_bytes() == (
        tmp_path / "b" / "spectral.csv"
    ).read_bytes()


def test_failed_run_cleans_partial_outputs(tmp_path):
    cfg = {
        "kind": "control-run",
        "seed": 0,
        "output_dir": str(tmp_path / "broken"),
        "parameters": {
            "s": 1.0,
            "N": 4,
            "T": 1.0,
            # sensor set far outside the resolved envelope: Gramian is singular
            "omega": {"type": "intervals", "intervals": [[50.0, 51.0]]},
        },
    }
    assert validate(cfg) == []
    with pytest.raises(Exception):
        run(cfg)
    outdir = tmp_path / "broken"
    assert not (outdir / "manifest.json").exists()
    assert not any(outdir.iterdir())


def test_run_raises_config_error_with_diagnostics():
    cfg = {"kind": "spectral-scan", "parameters": {"N_values": [], "omega": {"type": "full"}}}
    with pytest.raises(ConfigError) as err:
        run(cfg)
    assert err.value.diagnostics


def test_main_exit_codes(tmp_path, capsys):
    good = _write(tmp_path, "good.json", _full_scan(str(tmp_path / "g")))
    assert main(["spectral-scan", "--config", good]) == 0

    failing = _full_scan(str(tmp_path / "f"))
    failing["acceptance"] = [{"metric": "max_abs_cn_minus_1", "op": "<=", "value": 0.0}]
    bad_acc = _write(tmp_path, "failing.json", failing)
    assert main(["spectral-scan", "--config", bad_acc]) == 1

    invalid = _full_scan(str(tmp_path / "i"))
    invalid["parameters"]["epsilon"] = 1.5
    bad_cfg = _write(tmp_path, "invalid.json", invalid)
    assert main(["spectral-scan", "--config", bad_cfg]) == 2
    err = capsys.readouterr().err
    assert "ε must lie in (0,1]" in err


def test_main_reports_runtime_failure_cleanly(tmp_path, capsys):
    cfg = {
        "kind": "control-run",
        "seed": 0,
        "output_dir": str(tmp_path / "broken"),
        "parameters": {
            "s": 1.0,
            "N": 4,
            "T": 1.0,
            "omega": {"type": "intervals", "intervals": [[50.0, 51.0]]},
        },
    }
    path = _write(tmp_path, "crash.json", cfg)
    assert main(["control-run", "--config", path]) == 1
    err = capsys.readouterr().err
    assert err.startswith("error: run failed:")
    assert "Traceback" not in err
    assert not (tmp_path / "broken" / "manifest.json").exists()


def test_main_rejects_kind_mismatch(tmp_path, capsys):
    path = _write(tmp_path, "scan.json", _full_scan(str(tmp_path / "k")))
    assert main(["covering", "--config", path]) == 2


def test_main_seed_and_out_overrides(tmp_path):
    cfg = _full_scan(str(tmp_path / "ignored"))
    path = _write(tmp_path, "cfg.json", cfg)
    code = main(["spectral-scan", "--config", path, "--out", str(tmp_path / "o"), "--seed", "9"])
    assert code == 0
    manifest = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert manifest["seed"] == 9
    assert not (tmp_path / "ignored").exists()


def test_covering_run_exports_centers(tmp_path):
    cfg = {
        "kind": "covering",
        "seed": 0,
        "output_dir": str(tmp_path),
        "parameters": {"density": {"kind": "power", "R": 1.0, "eps": 0.5}, "extent": 10.0, "dim": 1},
        "acceptance": [{"metric": "max_multiplicity", "op": "<=", "value": 33}],
    }
    manifest = run(cfg)
    assert manifest["acceptance"]["passed"]
    lines = (tmp_path / "covering.csv").read_text().splitlines()
    assert lines[0] == "x1,radius"
    assert len(lines) - 1 == manifest["metrics"]["balls"]


def test_singular_space_run_matches_catalog(tmp_path):
    cfg = {
        "kind": "singular-space",
        "seed": 0,
        "output_dir": str(tmp_path),
        "parameters": {
            "names": [
                "harmonic",
                "rotated-harmonic",
                "free-laplacian",
                "kramers-fokker-planck",
            ]
        },
    }
    run(cfg)
    rows = (tmp_path / "singular_space.csv").read_text().splitlines()[1:]
    table = {r.split(",")[0]: tuple(r.split(",")[1:3]) for r in rows}
    assert table["harmonic"] == ("0", "0")
    assert table["rotated-harmonic"] == ("0", "0")
    assert table["free-laplacian"] == ("1", "-1")
    assert table["kramers-fokker-planck"] == ("0", "1")


def test_control_run_manifest_lists_trace(tmp_path):
    cfg = {
        "kind": "control-run",
        "seed": 4,
        "output_dir": str(tmp_path),
        "parameters": {
            "s": 1.0,
            "N": 10,
            "T": 1.0,
            "omega": {"type": "periodic", "period": 2.0, "kept": 0.5},
        },
        "acceptance": [{"metric": "terminal_residual_rel", "op": "<=", "value": 1e-6}],
    }
    manifest = run(cfg)
    assert manifest["acceptance"]["passed"]
    assert "trace.json" in manifest["files"]
    assert "cost.csv" in manifest["files"]
    trace = json.loads((tmp_path / "trace.json").read_text())
    assert {"stages", "total_cost", "terminal_residual"} <= set(trace)
    for stage in trace["stages"]:
        assert {"interval", "level", "cost", "residual"} <= set(stage)


def test_load_config_round_trip(tmp_path):
    path = _write(tmp_path, "c.json", _full_scan("x"))
    assert load_config(path)["kind"] == "spectral-scan"

"""Tests for the command line interface.

Commands run in-process through main(argv). Exit code contract: 0 success,
1 a verification ran and found failures, 2 malformed configuration or input.
Report files carry no timestamps and land atomically, so identical
invocations must produce byte-identical output files.
"""

import csv
import json
import os

import numpy as np
import pytest

from fraclab.cli import CONFIG_SCHEMA, main
from fraclab.fields import fractional_field
from fraclab.zoo import default_zoo

ROUTE_GAP_TOL = 1e-6


def read(path):
    with open(path, "rb") as fh:
        return fh.read()


def test_describe_builtin(tmp_path):
    out = tmp_path / "d.json"
    assert main(["describe", "--model", "circle", "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["kind"] == "circle"
    assert payload["sites"] == 33


def test_describe_config_file(tmp_path):
    cfg = tmp_path / "m.json"
    cfg.write_text(json.dumps({
        "kind": "graph", "sites": 2, "edges": [[0, 1, 1.3]],
        "weights": [1.0, 2.0],
    }))
    out = tmp_path / "d.json"
    assert main(["describe", "--model", str(cfg), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["conservative"] is True


def test_kernel_dump_matches_field(tmp_path):
    out = tmp_path / "k.csv"
    assert main(["kernel-dump", "--model", "two_site", "--s", "0.6",
                 "--out", str(out)]) == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 2        # off-diagonal entries only
    fld = fractional_field(default_zoo()["two_site"], 0.6)
    for row in rows:
        i, j = int(row["i"]), int(row["j"])
        assert i != j
        assert float(row["jump_kernel"]) == pytest.approx(
            fld.kernel[i, j], rel=1e-15)


def test_subordinator_check_exit_codes(tmp_path):
    out = tmp_path / "sub.csv"
    argv = ["subordinator-check", "--out", str(out),
            "--s", "0.3", "--s", "0.7", "--t", "1.0", "--lam", "4.0"]
    assert main(argv + ["--tol", "1e-6"]) == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 2
    assert max(float(r["residual"]) for r in rows) <= 1e-6
    # an absurd tolerance flips the exit code but still writes the report
    assert main(argv + ["--tol", "1e-22"]) == 1


def test_semigroup_eval_route_gap(tmp_path):
    out = tmp_path / "semi.csv"
    assert main(["semigroup-eval", "--model", "graph_killed", "--s", "0.5",
                 "--t", "0.7", "--out", str(out)]) == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert {"site", "x", "value_spectral", "value_subordination",
            "abs_gap"} <= set(rows[0])
    assert max(float(r["abs_gap"]) for r in rows) <= ROUTE_GAP_TOL


def test_check_writes_reports_and_reruns_identically(tmp_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    argv = ["check", "--model", "two_site", "--suite", "uniqueness",
            "--s", "0.4", "--seed", "3"]
    assert main(argv + ["--out", str(out_a)]) == 0
    assert main(argv + ["--out", str(out_b)]) == 0
    names = sorted(os.listdir(out_a))
    assert names == sorted(os.listdir(out_b))
    assert "report.json" in names
    # one JSON and one CSV residual table per check
    assert len([n for n in names if n.endswith(".csv")]) == \
        len([n for n in names if n.endswith(".json")]) - 1
    for name in names:
        assert read(out_a / name) == read(out_b / name), name
    summary = json.loads((out_a / "report.json").read_text())
    assert summary["counts"]["fail"] == 0
    assert summary["counts"]["pass"] >= 2
    table = next(n for n in names if n.endswith(".csv"))
    with open(out_a / table) as fh:
        rows = list(csv.DictReader(fh))
    assert {"residual", "value", "norm", "tol"} <= set(rows[0])


def test_check_accepts_config_file(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({
        "version": CONFIG_SCHEMA,
        "model": {"kind": "graph", "sites": 2, "edges": [[0, 1, 0.8]],
                  "killing": [0.1, 0.0], "weights": [1.0, 1.0]},
        "s": [0.5],
        "suite": "minimality",
        "seed": 1,
    }))
    assert main(["check", "--config", str(cfg)]) == 0


def test_check_rejects_wrong_config_version(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"version": "fraclab-config-v0", "model": "x"}))
    assert main(["check", "--config", str(cfg)]) == 2


def test_check_config_grid_and_tolerance_overrides(tmp_path):
    out = tmp_path / "reports"
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({
        "version": CONFIG_SCHEMA,
        "model": "two_site",
        "s": [0.5],
        "suite": "conservation",
        "t_grid": [0.25, 2.5],
        "alpha_grid": [0.7],
        "tolerances": {"resolvent-conservation": 1e-9},
        "out": str(out),
    }))
    assert main(["check", "--config", str(cfg)]) == 0
    summary = json.loads((out / "report.json").read_text())
    by_name = {r["check"]: r for r in summary["reports"]}
    assert by_name["generalized-conservation"]["params"]["t_grid"] == [0.25, 2.5]
    assert by_name["resolvent-conservation"]["params"]["alpha_grid"] == [0.7]
    assert by_name["resolvent-conservation"]["residuals"][0]["tol"] == 1e-9


def test_check_rejects_invalid_overrides(tmp_path):
    base = {"version": CONFIG_SCHEMA, "model": "two_site", "s": [0.5],
            "suite": "minimality"}
    bad = (
        {"tolerances": {"resolvent-minimality": 1e-14}},   # below the floor
        {"tolerances": {"no-such-check": 1e-6}},
        {"t_grid": []},
        {"alpha_grid": [0.5, -1.0]},
        {"s": []},
        {"s": [1.5]},                                      # outside the band
    )
    for patch in bad:
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps({**base, **patch}))
        assert main(["check", "--config", str(cfg)]) == 2, patch


def test_simulate_payload(tmp_path):
    out = tmp_path / "sim.json"
    assert main(["simulate", "--model", "two_site", "--s", "0.5",
                 "--paths", "1500", "--seed", "9", "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["n_paths"] == 1500
    assert len(payload["exact_law"]) == 2
    assert payload["max_z_score"] <= 5.0
    out2 = tmp_path / "sim2.json"
    assert main(["simulate", "--model", "two_site", "--s", "0.5",
                 "--paths", "1500", "--seed", "9", "--out", str(out2)]) == 0
    assert read(out) == read(out2)


def test_error_exit_codes(tmp_path):
    assert main(["describe", "--model", "atlantis"]) == 2
    assert main(["describe", "--model", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["describe", "--model", str(bad)]) == 2
    # an order outside the supported band is an input error, not a crash
    assert main(["kernel-dump", "--model", "two_site", "--s", "0.99",
                 "--out", str(tmp_path / "k.csv")]) == 2

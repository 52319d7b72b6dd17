"""Command line interface.

Subcommands: describe, kernel-dump, subordinator-check, semigroup-eval,
check, simulate. Exit codes: 0 on success, 1 when a verification ran but
found failures, 2 on configuration or input errors.

Run configurations use the "fraclab-config-v1" schema:

    {
      "version": "fraclab-config-v1",
      "model": "path/to/model.json",      (or an inline model object)
      "s": [0.25, 0.5, 0.75],
      "suite": "all",
      "out": "reports/",
      "seed": 0,
      "jobs": 1,
      "t_grid": [0.1, 1.0, 10.0],         (optional: semigroup time grid)
      "alpha_grid": [0.5, 1.0, 2.0],      (optional: resolvent parameter grid)
      "tolerances": {"resolvent-conservation": 1e-9}   (optional overrides)
    }

Command line flags override config fields. Orders must lie inside the
supported band, grids must be nonempty and positive, and tolerance
overrides must stay at or above the 1e-13 floor; violations exit with
code 2 before any check runs. Reports carry no timestamps and are written
atomically, so reruns with the same inputs are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .checks import SUITES, run_suite
from .errors import ConfigError, FraclabError, InvalidParameterError, require_order
from .fields import fractional_field
from .jumps import build_generator, exact_occupation_law, simulate
from .models import model_from_config, model_summary
from .reports import dump_json, write_csv_atomic, write_json_atomic
from .semigroups import subordinate_apply
from .subordinator import laplace_residual
from .zoo import default_zoo

CONFIG_SCHEMA = "fraclab-config-v1"


def _load_json(path: str) -> dict:
    try:
        with open(path) as handle:
            return json.load(handle)
    except FileNotFoundError:
        raise ConfigError(f"file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}")


def _load_model(name_or_path: str):
    """Resolve a model argument: a builtin name first, else a JSON config."""
    zoo = default_zoo()
    if name_or_path in zoo:
        return zoo[name_or_path]
    if not os.path.exists(name_or_path):
        raise ConfigError(
            f"unknown model {name_or_path!r}: not a builtin model "
            f"({', '.join(sorted(zoo))}) and no such config file"
        )
    return model_from_config(_load_json(name_or_path))


def _cmd_describe(args) -> int:
    summary = model_summary(_load_model(args.model))
    if args.out:
        write_json_atomic(args.out, summary)
    else:
        sys.stdout.write(dump_json(summary))
    return 0


def _cmd_kernel_dump(args) -> int:
    model = _load_model(args.model)
    fld = fractional_field(model, args.s)
    rows = []
    for i in range(model.n_sites):
        for j in range(model.n_sites):
            if i == j:
                continue
            rows.append((i, j, fld.kernel[i, j], fld.killing[i]))
    write_csv_atomic(args.out, ["i", "j", "jump_kernel", "killing_i"], rows)
    print(f"wrote {len(rows)} kernel entries to {args.out} "
          f"(quadrature error {fld.quadrature_error:.3e})")
    return 0


def _cmd_subordinator_check(args) -> int:
    s_grid = args.s if args.s else [round(0.1 * k, 1) for k in range(1, 10)]
    t_grid = args.t if args.t else [0.1, 1.0, 10.0]
    lam_grid = args.lam if args.lam else [0.0, 0.1, 1.0, 4.0, 10.0, 100.0]
    rows = []
    worst = 0.0
    for s in s_grid:
        for t in t_grid:
            for lam in lam_grid:
                r = laplace_residual(s, t, lam)
                worst = max(worst, r)
                rows.append((s, t, lam, r))
    write_csv_atomic(args.out, ["s", "t", "lambda", "residual"], rows)
    print(f"{len(rows)} grid points, worst residual {worst:.3e} "
          f"(tolerance {args.tol:.1e})")
    return 0 if worst <= args.tol else 1


def _cmd_semigroup_eval(args) -> int:
    model = _load_model(args.model)
    if args.field:
        field_vals = np.loadtxt(args.field, delimiter=",", ndmin=1)
        if field_vals.shape != (model.n_sites,):
            raise ConfigError(
                f"field file must hold {model.n_sites} values, "
                f"got shape {field_vals.shape}"
            )
    else:
        field_vals = np.ones(model.n_sites)
    routes = ["spectral", "subordination"] if args.route == "both" else [args.route]
    columns = {r: subordinate_apply(model, args.s, args.t, field_vals, route=r)
               for r in routes}
    header = ["site", "x"] + [f"value_{r}" for r in routes]
    rows = []
    for i in range(model.n_sites):
        rows.append([i, model.points[i]] + [columns[r][i] for r in routes])
    if len(routes) == 2:
        gap = float(np.max(np.abs(columns["spectral"] - columns["subordination"])))
        header.append("abs_gap")
        for i, row in enumerate(rows):
            row.append(abs(columns["spectral"][i] - columns["subordination"][i]))
        print(f"route gap {gap:.3e}")
    write_csv_atomic(args.out, header, rows)
    return 0


def _merge_config(args) -> dict:
    cfg = {"s": [0.5], "suite": "all", "seed": 0, "jobs": 1, "out": None,
           "model": None, "t_grid": None, "alpha_grid": None,
           "tolerances": None}
    if args.config:
        raw = _load_json(args.config)
        if raw.get("version") != CONFIG_SCHEMA:
            raise ConfigError(
                f"config version {raw.get('version')!r} unsupported; "
                f"expected {CONFIG_SCHEMA!r}"
            )
        for key in ("model", "s", "suite", "seed", "jobs", "out",
                    "t_grid", "alpha_grid", "tolerances"):
            if key in raw:
                cfg[key] = raw[key]
    if args.model:
        cfg["model"] = args.model
    if args.s:
        cfg["s"] = args.s
    if args.suite:
        cfg["suite"] = args.suite
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.jobs is not None:
        cfg["jobs"] = args.jobs
    if args.out:
        cfg["out"] = args.out
    if cfg["model"] is None:
        raise ConfigError("no model given (use --model or a config file)")
    if cfg["suite"] not in SUITES:
        raise ConfigError(f"unknown suite {cfg['suite']!r}; "
                          f"choose from {sorted(SUITES)}")
    if not isinstance(cfg["s"], (list, tuple)) or not cfg["s"]:
        raise ConfigError("config key 's' must be a nonempty list of orders")
    try:
        cfg["s"] = [require_order(v) for v in cfg["s"]]
    except InvalidParameterError as exc:
        raise ConfigError(str(exc))
    if cfg["tolerances"] is not None and not isinstance(cfg["tolerances"], dict):
        raise ConfigError("config key 'tolerances' must map check names "
                          "to tolerance values")
    return cfg


def _cmd_check(args) -> int:
    cfg = _merge_config(args)
    if isinstance(cfg["model"], dict):
        model = model_from_config(cfg["model"])
        name = cfg["model"].get("name", "inline")
    else:
        model = _load_model(cfg["model"])
        name = os.path.splitext(os.path.basename(cfg["model"]))[0]
    reports = run_suite({name: model}, cfg["s"], suite=cfg["suite"],
                        seed=int(cfg["seed"]), jobs=int(cfg["jobs"]),
                        tolerances=cfg["tolerances"], t_grid=cfg["t_grid"],
                        alpha_grid=cfg["alpha_grid"])
    counts = {"pass": 0, "fail": 0, "inconclusive": 0, "skipped": 0}
    for i, report in enumerate(reports):
        counts[report.verdict] += 1
        print(report.summary_line())
        if cfg["out"]:
            stem = os.path.join(cfg["out"], f"{i:03d}-{report.check}")
            write_json_atomic(stem + ".json", report.to_dict())
            write_csv_atomic(
                stem + ".csv", ["residual", "value", "norm", "tol"],
                [(r.name, r.value, r.norm, r.tol) for r in report.residuals])
    if cfg["out"]:
        write_json_atomic(os.path.join(cfg["out"], "report.json"), {
            "suite": cfg["suite"], "model": name, "s": cfg["s"],
            "seed": cfg["seed"], "counts": counts,
            "reports": [r.to_dict() for r in reports],
        })
    print(f"suite={cfg['suite']} model={name} "
          + " ".join(f"{k}={v}" for k, v in counts.items()))
    return 0 if counts["fail"] == 0 else 1


def _cmd_simulate(args) -> int:
    model = _load_model(args.model)
    gen = build_generator(model, args.s)
    stats = simulate(gen, args.start, args.horizon, args.paths, seed=args.seed)
    law = exact_occupation_law(model, args.s, args.start, args.horizon)
    freq = stats.occupation / stats.n_paths
    sigma = np.sqrt(np.clip(law * (1.0 - law), 0.0, None) / stats.n_paths)
    payload = stats.to_dict()
    payload["exact_law"] = law.tolist()
    payload["max_z_score"] = float(
        np.max(np.abs(freq - law) / np.maximum(sigma, 1.0 / stats.n_paths))
    )
    if args.out:
        write_json_atomic(args.out, payload)
    else:
        sys.stdout.write(dump_json(payload))
    print(f"survival {stats.survival_fraction:.4f} "
          f"(exact {float(law.sum()):.4f}), max z {payload['max_z_score']:.2f}",
          file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fraclab",
        description="Fractional Laplacians on weighted spectral models",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("describe", help="summarize a model config")
    p.add_argument("--model", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_describe)

    p = sub.add_parser("kernel-dump", help="dump jump kernel and killing term")
    p.add_argument("--model", required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_kernel_dump)

    p = sub.add_parser("subordinator-check",
                       help="Laplace-identity residuals of the stable density")
    p.add_argument("--out", required=True)
    p.add_argument("--s", type=float, action="append")
    p.add_argument("--t", type=float, action="append")
    p.add_argument("--lam", type=float, action="append")
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=_cmd_subordinator_check)

    p = sub.add_parser("semigroup-eval", help="evaluate T_t^(s) f by route")
    p.add_argument("--model", required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--route", choices=["spectral", "subordination", "both"],
                   default="both")
    p.add_argument("--field", help="CSV file with one value per site")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_semigroup_eval)

    p = sub.add_parser("check", help="run a verification suite")
    p.add_argument("--model")
    p.add_argument("--config", help=f"run config ({CONFIG_SCHEMA})")
    p.add_argument("--suite", choices=sorted(SUITES))
    p.add_argument("--s", type=float, action="append")
    p.add_argument("--out", help="directory for JSON reports")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("simulate", help="Monte Carlo jump-process occupation")
    p.add_argument("--model", required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--horizon", type=float, default=1.0)
    p.add_argument("--paths", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_simulate)

    return parser


def main(argv: list | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FraclabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

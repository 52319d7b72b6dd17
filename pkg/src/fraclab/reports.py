"""Check reports and deterministic serialization.

Reports never embed timestamps or machine identifiers, so two runs with the
same inputs and seed produce byte-identical files. Floats are serialized with
Python's shortest round-trip repr in JSON and with 17 significant digits in
CSV. All file writes go through a temp-file-plus-rename so readers never see
partial output.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

TOLERANCE_FLOOR = 1e-13   # no check may demand more than this
VERDICTS = ("pass", "fail", "inconclusive", "skipped")


@dataclass(frozen=True)
class Residual:
    """One measured quantity with its acceptance rule.

    mode "at-most" passes when value <= tol (defect-style); "at-least" passes
    when value >= tol (separation-style, e.g. a killed model must show a mass
    defect strictly above the truncation noise). norm names the measurement
    ("max-abs", "rel", "l2-w", ...).
    """

    name: str
    value: float
    norm: str
    tol: float
    mode: str = "at-most"

    def passed(self) -> bool:
        if self.mode == "at-most":
            return self.value <= self.tol
        return self.value >= self.tol


def residual(
    name: str, value: float, tol: float, norm: str = "max-abs", mode: str = "at-most"
) -> Residual:
    """Build a residual, flooring at-most tolerances at TOLERANCE_FLOOR."""
    if mode == "at-most":
        tol = max(float(tol), TOLERANCE_FLOOR)
    return Residual(name=name, value=float(value), norm=norm, tol=float(tol), mode=mode)


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one diagnostic on one model.

    provenance records the routes, quadrature settings and seeds that went
    into the verdict, so a report is reproducible from its own content.
    """

    check: str
    model: dict
    params: dict
    residuals: tuple
    verdict: str
    provenance: dict = field(default_factory=dict)
    notes: tuple = ()

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "model": self.model,
            "params": self.params,
            "residuals": [
                {"name": r.name, "value": r.value, "norm": r.norm,
                 "tol": r.tol, "mode": r.mode}
                for r in self.residuals
            ],
            "verdict": self.verdict,
            "provenance": self.provenance,
            "notes": list(self.notes),
        }

    def summary_line(self) -> str:
        worst = ""
        if self.residuals:
            r = max(
                self.residuals,
                key=lambda r: (r.value / r.tol) if (r.mode == "at-most" and r.tol > 0)
                else -math.inf,
            )
            worst = f" worst={r.name}:{r.value:.3e} (tol {r.tol:.1e})"
        lower = [r for r in self.residuals if r.mode == "at-least" and r.tol > 0]
        if lower:
            state = ("confirmed" if all(r.passed() for r in lower)
                     else "NOT separated")
            worst += f" expected-nonzero: {state}"
        return (f"[{self.verdict.upper():>12}] {self.check} "
                f"model={self.model.get('kind')}:{self.model.get('key')} "
                f"params={_compact(self.params)}{worst}")


def _compact(params: dict) -> str:
    parts = []
    for k in sorted(params):
        v = params[k]
        if isinstance(v, float):
            parts.append(f"{k}={v:g}")
        elif isinstance(v, (list, tuple)) and len(v) > 4:
            parts.append(f"{k}=[{len(v)} values]")
        else:
            parts.append(f"{k}={v}")
    return ",".join(parts)


def make_report(
    check: str,
    model: dict,
    params: dict,
    residuals: list,
    provenance: dict | None = None,
    notes: tuple = (),
    verdict: str | None = None,
) -> CheckReport:
    """Assemble a report; verdict defaults to the conjunction of residuals."""
    if verdict is None:
        verdict = "pass" if all(r.passed() for r in residuals) else "fail"
    if verdict not in VERDICTS:
        raise ValueError(f"unknown verdict {verdict!r}")
    return CheckReport(
        check=check, model=model, params=params, residuals=tuple(residuals),
        verdict=verdict, provenance=provenance or {}, notes=tuple(notes),
    )


@dataclass(frozen=True)
class ParabolicTrace:
    """Time trace of the subordinate mass w(t, i) = (T_t^(s) 1)_i with the
    weak-formulation defects measured along it."""

    times: np.ndarray
    values: np.ndarray       # shape (len(times), n)
    weak_defects: np.ndarray  # shape (len(times),)


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    raise TypeError(f"not JSON serializable: {type(obj)}")


def dump_json(obj) -> str:
    """Canonical JSON text: sorted keys, two-space indent, repr floats."""
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default) + "\n"


def _atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json_atomic(path: str, obj) -> None:
    _atomic_write_text(path, dump_json(obj))


def format_cell(value) -> str:
    if isinstance(value, (float, np.floating)):
        return "%.17g" % float(value)
    return str(value)


def write_csv_atomic(path: str, header: list, rows: list) -> None:
    """CSV with 17-significant-digit floats, written atomically."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_cell(v) for v in row))
    _atomic_write_text(path, "\n".join(lines) + "\n")

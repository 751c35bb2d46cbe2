"""JSON and CSV serialisation of analysis reports."""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction

from .analysis import ratstr

CSV_BASE_COLUMNS = ["family", "params", "N", "lambda1", "lambda_min",
                    "eta_num", "eta_den", "lemma1_pass"]


def to_jsonable(obj):
    if isinstance(obj, Fraction):
        return ratstr(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    return obj


def dumps(report: dict) -> str:
    return json.dumps(to_jsonable(report), indent=2) + "\n"


def strip_timings(report):
    """Copy of a report without wall-clock fields (for determinism checks)."""
    if isinstance(report, dict):
        return {k: strip_timings(v) for k, v in report.items() if k != "timings"}
    if isinstance(report, list):
        return [strip_timings(v) for v in report]
    return report


def eps_tag(eps: float) -> str:
    """0.25 -> '25', 0.01 -> '01'."""
    text = repr(float(eps))
    return text[2:] if text.startswith("0.") else text.replace(".", "_")


def csv_columns(eps) -> list[str]:
    cols = list(CSV_BASE_COLUMNS)
    for e in eps:
        cols += [f"eq1_bound_eps{eps_tag(e)}", f"tau_exact_eps{eps_tag(e)}"]
    return cols


def csv_row(report: dict, eps) -> dict:
    eta = Fraction(report["walkset"]["eta"])
    desc = report["descriptor"]
    row = {
        "family": desc["family"],
        "params": ";".join(f"{k}={v}" for k, v in desc["params"].items()),
        "N": desc["N"],
        "lambda1": repr(report["spectrum"]["lambda_1"]),
        "lambda_min": repr(report["spectrum"]["lambda_min"]),
        "eta_num": eta.numerator,
        "eta_den": eta.denominator,
        "lemma1_pass": report["checks"]["lemma1"]["status"],
    }
    bounds = {b["epsilon"]: b["bound"] for b in report["bounds"]["eq1"]}
    taus = {t["epsilon"]: t["tau"] for t in (report["oracle"].get("tau_exact") or [])}
    for e in eps:
        row[f"eq1_bound_eps{eps_tag(e)}"] = repr(bounds.get(e))
        tau = taus.get(e)
        row[f"tau_exact_eps{eps_tag(e)}"] = "" if tau is None else tau
    return row


def to_csv(reports: list[dict], eps) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=csv_columns(eps), lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(csv_row(r, eps))
    return buf.getvalue()

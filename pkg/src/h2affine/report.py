"""Report serialization: CSV for the primary series, JSON for everything.

Floats are written with ``repr``, the shortest string that round-trips to
the same double.  Non-finite floats appear in JSON as the strings "nan",
"inf" and "-inf".  Wall time is kept in memory only, so files depend on the
experiment settings alone.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import asdict, fields

import numpy as np

from .experiments import ExperimentReport, Row

CSV_HEADER = ("index", "value", "bound", "err_lo", "err_hi")
SCHEMA_VERSION = "1"

_ROW_SCHEMA = {
    "type": "object",
    "required": list(CSV_HEADER),
    "properties": {
        "index": {"type": "integer"},
        **{k: {"type": ["number", "string"]} for k in CSV_HEADER[1:]},
    },
    "additionalProperties": False,
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema_version", "name", "anchor", "description", "spec", "versions",
                 "rows", "series", "summary", "checks", "passed"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "anchor": {"type": "string"},
        "description": {"type": "string"},
        "bound_source": {"type": "string"},
        "spec": {"type": "object"},
        "versions": {"type": "object"},
        "rows": {"type": "array", "items": _ROW_SCHEMA},
        "series": {"type": "object", "additionalProperties": {"type": "array", "items": _ROW_SCHEMA}},
        "summary": {"type": "object"},
        "checks": {"type": "object", "additionalProperties": {"type": "boolean"}},
        "passed": {"type": "boolean"},
    },
}


class ReportIOError(OSError):
    pass


def fmt_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def plain(obj):
    """JSON-safe copy: numpy scalars unwrapped, complex as [re, im], non-finite as strings."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [plain(float(obj.real)), plain(float(obj.imag))]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else fmt_float(x)
    return obj


def _row_dict(r: Row) -> dict:
    return {f.name: getattr(r, f.name) for f in fields(Row)}


def report_dict(report: ExperimentReport) -> dict:
    spec = asdict(report.spec)
    spec.pop("out", None)
    return plain({
        "schema_version": SCHEMA_VERSION,
        "name": report.spec.name,
        "anchor": report.anchor,
        "description": report.description,
        "bound_source": report.anchor,
        "spec": spec,
        "versions": report.versions,
        "rows": [_row_dict(r) for r in report.rows],
        "series": {k: [_row_dict(r) for r in v] for k, v in report.series.items()},
        "summary": report.summary,
        "checks": report.checks,
        "passed": report.passed,
    })


def to_json(report: ExperimentReport) -> str:
    return json.dumps(report_dict(report), indent=2, allow_nan=False) + "\n"


def to_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in report.rows:
        w.writerow([str(r.index)] + [fmt_float(getattr(r, k)) for k in CSV_HEADER[1:]])
    return buf.getvalue()


def write_report(report: ExperimentReport, fmt: str | None = None, path: str | None = None) -> str:
    """Write ``report`` as csv or json and return the path used."""
    fmt = fmt or report.spec.format
    path = path or report.spec.out
    if fmt not in ("csv", "json"):
        raise ValueError(f"format must be csv or json, got {fmt!r}")
    if not path:
        raise ValueError("no output path given")
    text = to_csv(report) if fmt == "csv" else to_json(report)
    try:
        d = os.path.dirname(os.path.abspath(path))
        os.makedirs(d, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise ReportIOError(f"cannot write report to {path}: {exc}") from exc
    return path


def read_csv(path: str) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        rd = csv.DictReader(fh)
        return [{"index": int(r["index"]), **{k: float(r[k]) for k in CSV_HEADER[1:]}} for r in rd]

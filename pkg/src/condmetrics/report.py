"""Canonical, byte-stable emission of metric reports (JSON and CSV).

Key order and float formatting are fixed so repeated runs produce
byte-identical files that can be diffed and compared in tests.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .metrics import MetricReport

JSON_KEYS = (
    "is", "bcis", "wcis", "fid", "bcfid", "wcfid", "cfid_sum", "accuracy",
    "per_class_fid", "per_class_is", "per_class_accuracy",
    "dims_used", "pairing", "seed", "warnings",
)

CSV_COLUMNS = (
    "param", "is", "bcis", "wcis", "fid", "bcfid", "wcfid", "cfid_sum",
    "accuracy", "dims_used",
)


def format_number(x) -> str:
    """17 significant digits; enough to round-trip any float64."""
    if x is None:
        return "null"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def _json_value(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple, np.ndarray)):
        return "[" + ",".join(_json_value(v) for v in value) + "]"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format_number(value)


def report_values(report: MetricReport) -> dict:
    return {
        "is": report.is_,
        "bcis": report.bcis,
        "wcis": report.wcis,
        "fid": report.fid,
        "bcfid": report.bcfid,
        "wcfid": report.wcfid,
        "cfid_sum": report.cfid_sum,
        "accuracy": report.accuracy,
        "per_class_fid": report.per_class_fid,
        "per_class_is": report.per_class_is,
        "per_class_accuracy": report.per_class_accuracy,
        "dims_used": report.dims_used,
        "pairing": report.pairing,
        "seed": report.seed,
        "warnings": list(report.warnings),
    }


def report_to_json(report: MetricReport) -> str:
    values = report_values(report)
    body = ",".join(f"{json.dumps(key)}:{_json_value(values[key])}" for key in JSON_KEYS)
    return "{" + body + "}\n"


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format_number(value)


def report_to_csv_row(param, report: MetricReport) -> str:
    values = report_values(report)
    cells = [_csv_cell(param)] + [_csv_cell(values[col]) for col in CSV_COLUMNS[1:]]
    return ",".join(cells)


def report_to_csv(report: MetricReport) -> str:
    """Single report as a two-line CSV (scalar columns, no param)."""
    values = report_values(report)
    header = ",".join(CSV_COLUMNS[1:])
    row = ",".join(_csv_cell(values[col]) for col in CSV_COLUMNS[1:])
    return header + "\n" + row + "\n"


def reports_to_csv(rows) -> str:
    """Rows of (param, MetricReport) to a fixed-header CSV document."""
    lines = [",".join(CSV_COLUMNS)]
    lines.extend(report_to_csv_row(param, report) for param, report in rows)
    return "\n".join(lines) + "\n"


def reports_to_json(rows) -> str:
    """Rows of (param, MetricReport) to a JSON array with canonical entries."""
    entries = []
    for param, report in rows:
        values = report_values(report)
        body = ",".join(
            [f"\"param\":{format_number(param)}"]
            + [f"{json.dumps(key)}:{_json_value(values[key])}" for key in JSON_KEYS]
        )
        entries.append("{" + body + "}")
    return "[" + ",".join(entries) + "]\n"


def assignment_to_json(mapping, score, average_probabilities) -> str:
    body = ",".join([
        f"\"mapping\":{_json_value([int(m) for m in mapping])}",
        f"\"score\":{format_number(score)}",
        f"\"average_probabilities\":"
        + "[" + ",".join(_json_value(row) for row in average_probabilities) + "]",
    ])
    return "{" + body + "}\n"

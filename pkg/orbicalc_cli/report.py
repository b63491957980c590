"""Report renderers: a human-readable text report and a JSON record."""

from __future__ import annotations

import json
from typing import Any

import pandas as pd

from orbicalc_cli.runner import Report, render_value

REPORT_WIDTH = 120


def _table(rows: list[dict[str, Any]], columns: list[str]) -> str:
    if not rows:
        return "(none)"
    df = pd.DataFrame(rows, columns=columns)
    with pd.option_context(
        "display.max_rows",
        None,
        "display.max_columns",
        None,
        "display.width",
        REPORT_WIDTH,
        "display.max_colwidth",
        80,
    ):
        return df.to_string(index=False)


def _fact_rows(report: Report) -> list[dict[str, Any]]:
    return [
        {"fact": f.ident, "value": render_value(f.value), "citation": f.citation, "statement": f.statement}
        for f in report.facts
    ]


def _value_rows(report: Report) -> list[dict[str, Any]]:
    return [
        {"step": s.ident, "op": s.op, "key": key, "value": render_value(value)}
        for s in report.steps
        for key, value in s.values.items()
    ]


def _discrepancy_rows(report: Report) -> list[dict[str, Any]]:
    return [
        {
            "discrepancy": d.spec.ident,
            "value": f"{d.spec.step}.{d.spec.key}",
            "computed": render_value(d.computed),
            "printed": render_value(d.printed),
            "agrees": render_value(d.agrees),
            "citation": d.spec.citation,
            "note": d.spec.note,
        }
        for d in report.discrepancies
    ]


def _expectation_rows(report: Report) -> list[dict[str, Any]]:
    return [
        {
            "target": r.expectation.target,
            "expected": r.expectation.expected,
            "computed": render_value(r.computed),
            "tag": r.expectation.tag or "",
            "status": "ok" if r.passed else "FAIL",
            "note": r.message or r.expectation.note,
        }
        for r in report.expectations
    ]


def render_text(report: Report) -> str:
    met = sum(1 for r in report.expectations if r.passed)
    params = ", ".join(f"{k}={v}" for k, v in report.params.items()) or "(none)"
    sections = [
        f"=== SCENARIO {report.name} ===",
        report.description,
        f"params: {params}",
        "",
        "=== FACTS (declared) ===",
        _table(_fact_rows(report), ["fact", "value", "citation", "statement"]),
        "",
        "=== VALUES ===",
        _table(_value_rows(report), ["step", "op", "key", "value"]),
        "",
        "=== DISCREPANCIES ===",
        _table(
            _discrepancy_rows(report),
            ["discrepancy", "value", "computed", "printed", "agrees", "citation", "note"],
        ),
        "",
        "=== EXPECTATIONS ===",
        _table(_expectation_rows(report), ["target", "expected", "computed", "tag", "status", "note"]),
        "",
        f"RESULT: {'PASS' if report.passed else 'FAIL'} ({met}/{len(report.expectations)} expectations met)",
    ]
    return "\n".join(sections) + "\n"


def render_record(report: Report) -> str:
    """JSON with every value in its rendered text form; key order is fixed."""
    record = {
        "scenario": report.name,
        "description": report.description,
        "params": dict(report.params),
        "facts": _fact_rows(report),
        "steps": [
            {"step": s.ident, "op": s.op, "values": {k: render_value(v) for k, v in s.values.items()}}
            for s in report.steps
        ],
        "discrepancies": _discrepancy_rows(report),
        "expectations": _expectation_rows(report),
        "passed": report.passed,
    }
    return json.dumps(record, indent=2, ensure_ascii=False) + "\n"


def render(report: Report, fmt: str = "text") -> str:
    if fmt == "record":
        return render_record(report)
    if fmt == "text":
        return render_text(report)
    raise ValueError(f"unknown report format {fmt!r}")

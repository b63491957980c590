"""Execute a parsed scenario and compare its expectations."""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from orbicalc_cli.scenario import (
    DiscrepancySpec,
    Entry,
    Expectation,
    Fact,
    ParseError,
    Scenario,
    exact_value,
    expand_list,
    parse_bool,
)
from orbicalc_cli.steps import StepContext, StepOutcome, parse_group, run_step
from orbicalc_math.seifert import FgAbelianGroup

UNKNOWN = "unknown"


@dataclass(frozen=True)
class StepRecord:
    ident: str
    op: str
    values: dict[str, Any]


@dataclass(frozen=True)
class ExpectationResult:
    expectation: Expectation
    computed: Any
    passed: bool
    message: str = ""


@dataclass(frozen=True)
class DiscrepancyResult:
    spec: DiscrepancySpec
    computed: Any
    printed: int | Fraction
    agrees: bool


@dataclass
class Report:
    name: str
    description: str
    source: str | None
    params: dict[str, str]
    facts: tuple[Fact, ...]
    steps: list[StepRecord] = field(default_factory=list)
    discrepancies: list[DiscrepancyResult] = field(default_factory=list)
    expectations: list[ExpectationResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.expectations)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1


def render_value(value: Any) -> str:
    """Stable text form of a computed value."""
    if value is None:
        return UNKNOWN
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if isinstance(value, tuple):
        return "(" + ", ".join(render_value(v) for v in value) + ")"
    return str(value)


def _normalize(text: str) -> str:
    return re.sub(r"\s+", " ", text.strip())


def _entry(e: Expectation) -> Entry:
    return Entry(e.target, e.expected, e.line, e.column)


def matches(computed: Any, expected: str, entry: Entry | None = None) -> bool:
    """Type-directed comparison of a computed value with the expected text."""
    text = expected.strip()
    if computed is None:
        return text.lower() == UNKNOWN
    if isinstance(computed, FgAbelianGroup):
        return computed == parse_group(text, entry)
    if isinstance(computed, bool):
        return computed == parse_bool(text, entry)
    if isinstance(computed, float) and math.isinf(computed):
        return text.lower() == ("inf" if computed > 0 else "-inf")
    if isinstance(computed, int | Fraction):
        return computed == exact_value(text, entry)
    if isinstance(computed, tuple):
        inner = text[1:-1] if text[:1] in "([" and text[-1:] in ")]" else text
        items = expand_list(inner, entry)
        return len(items) == len(computed) and all(
            matches(c, item, entry) for c, item in zip(computed, items, strict=True)
        )
    return _normalize(str(computed)) == _normalize(text)


def _check(e: Expectation, records: dict[str, StepRecord]) -> ExpectationResult:
    record = records.get(e.step)
    if record is None:
        return ExpectationResult(e, None, False, f"no step '{e.step}'")
    if e.key not in record.values:
        return ExpectationResult(e, None, False, f"step '{e.step}' has no value '{e.key}'")
    computed = record.values[e.key]
    try:
        ok = matches(computed, e.expected, _entry(e))
    except ParseError as err:
        return ExpectationResult(e, computed, False, err.message)
    message = "" if ok else f"expected {e.expected}, computed {render_value(computed)}"
    return ExpectationResult(e, computed, ok, message)


def _discrepancy(d: DiscrepancySpec, records: dict[str, StepRecord]) -> DiscrepancyResult:
    record = records.get(d.step)
    if record is None or d.key not in record.values:
        raise ParseError(d.line, 1, f"discrepancy '{d.ident}' refers to unknown value {d.step}.{d.key}")
    computed = record.values[d.key]
    printed = exact_value(d.printed.value, d.printed)
    agrees = computed == printed
    if not agrees:
        logging.warning(
            f"Discrepancy {d.ident}: computed {render_value(computed)}, printed {printed} ({d.citation})"
        )
    return DiscrepancyResult(d, computed, printed, agrees)


def run_scenario(scenario: Scenario, workers: int = 1) -> Report:
    """Run every step in order; a failing step raises `StepError`."""
    report = Report(
        name=scenario.name,
        description=scenario.description,
        source=scenario.source,
        params=dict(scenario.params),
        facts=scenario.facts,
    )
    outcomes: dict[str, StepOutcome] = {}
    records: dict[str, StepRecord] = {}
    for spec in scenario.steps:
        upstream = outcomes[spec.input].obj if spec.input is not None else None
        ctx = StepContext(spec=spec, scenario=scenario, input=upstream, workers=workers)
        outcome = run_step(ctx)
        outcomes[spec.ident] = outcome
        records[spec.ident] = StepRecord(spec.ident, spec.op, outcome.values)
        report.steps.append(records[spec.ident])
        logging.info(f"Step {spec.ident} ({spec.op}): {len(outcome.values)} values")

    report.discrepancies = [_discrepancy(d, records) for d in scenario.discrepancies]
    report.expectations = [_check(e, records) for e in scenario.expectations]
    failed = [r for r in report.expectations if not r.passed]
    if failed:
        logging.warning(f"Scenario {scenario.name}: {len(failed)} of {len(report.expectations)} expectations failed")
    return report

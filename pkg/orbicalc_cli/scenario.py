"""Scenario file parser.

A scenario is a line-oriented text file with named sections:

    [scenario]          name, description
    [params]            name = value (referenced as ${name}, overridable with --params)
    [fact <id>]         statement, citation, value (true/false or a predicate)
    [step <id>]         op, input (default: previous step), op-specific keys
    [discrepancy <id>]  computed (step.key), printed (expression), citation, note
    [expect]            step.key = value | TAG note

Lines starting with `#` or `;` are comments. List values are comma separated;
an item containing `{lo..hi}` markers expands once per integer in the range,
several markers in one item advancing in lockstep (`D{1..3}: 2**{1..3}`). A range
runs downwards when lo > hi, except that `{lo..lo-1}` is empty.
"""

from __future__ import annotations

import re
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import sympy
from sympy.parsing.sympy_parser import parse_expr

SECTION_KINDS = ("scenario", "params", "fact", "step", "discrepancy", "expect")
TAGS = ("PAPER", "DERIVED", "TRIVIAL")

_SECTION = re.compile(r"\[\s*(?P<kind>[A-Za-z_]+)(?:\s+(?P<ident>[\w.\-]+))?\s*\]")
_ENTRY = re.compile(r"(?P<key>[\w.\-${}]+)\s*=\s*(?P<value>.*)")
_PARAM_REF = re.compile(r"\$\{(?P<name>[A-Za-z_]\w*)\}")
_RANGE = re.compile(r"\{(?P<lo>[^{}]*?)\.\.(?P<hi>[^{}]*?)\}")


class ParseError(ValueError):
    def __init__(self, line: int, column: int, message: str, source: str | None = None) -> None:
        self.line = line
        self.column = column
        self.message = message
        self.source = source
        super().__init__(f"{source or '<scenario>'}:{line}:{column}: {message}")


@dataclass(frozen=True)
class Entry:
    key: str
    value: str
    line: int
    column: int

    def error(self, message: str) -> ParseError:
        return ParseError(self.line, self.column, f"{self.key}: {message}")


@dataclass(frozen=True)
class Section:
    kind: str
    ident: str | None
    line: int
    entries: tuple[Entry, ...] = ()

    def get(self, key: str) -> Entry | None:
        return next((e for e in self.entries if e.key == key), None)

    def require(self, key: str) -> Entry:
        entry = self.get(key)
        if entry is None:
            label = f"[{self.kind} {self.ident}]" if self.ident else f"[{self.kind}]"
            raise ParseError(self.line, 1, f"{label} needs a '{key}' entry")
        return entry


@dataclass(frozen=True)
class Fact:
    ident: str
    statement: str
    citation: str
    value: bool


@dataclass(frozen=True)
class StepSpec:
    ident: str
    op: str
    input: str | None
    line: int
    entries: Mapping[str, Entry] = field(default_factory=dict)

    def get(self, key: str) -> Entry | None:
        return self.entries.get(key)


@dataclass(frozen=True)
class DiscrepancySpec:
    ident: str
    step: str
    key: str
    printed: Entry
    citation: str
    note: str
    line: int


@dataclass(frozen=True)
class Expectation:
    step: str
    key: str
    expected: str
    tag: str | None
    note: str
    line: int
    column: int

    @property
    def target(self) -> str:
        return f"{self.step}.{self.key}"


@dataclass(frozen=True)
class Scenario:
    name: str
    description: str
    params: Mapping[str, str]
    facts: tuple[Fact, ...]
    steps: tuple[StepSpec, ...]
    discrepancies: tuple[DiscrepancySpec, ...]
    expectations: tuple[Expectation, ...]
    source: str | None = None

    def fact(self, ident: str) -> Fact | None:
        return next((f for f in self.facts if f.ident == ident), None)


# --- values ------------------------------------------------------------------


def split_top_level(text: str, sep: str = ",") -> list[tuple[str, int]]:
    """Split on `sep` outside brackets; returns (item, offset) pairs with items stripped."""
    out: list[tuple[str, int]] = []
    depth, start = 0, 0
    for i, ch in enumerate(text):
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        elif ch == sep and depth == 0:
            out.append((text[start:i], start))
            start = i + 1
    out.append((text[start:], start))
    items = []
    for item, offset in out:
        stripped = item.strip()
        if stripped:
            items.append((stripped, offset + len(item) - len(item.lstrip())))
    return items


def exact_value(text: str, entry: Entry | None = None) -> int | Fraction:
    """Evaluate an integer / rational expression such as `9/(9*2-8)` exactly."""
    try:
        expr = parse_expr(text.strip(), local_dict={}, evaluate=True)
    except Exception as e:  # noqa: BLE001
        raise _value_error(entry, f"cannot read {text!r} as a number") from e
    if not isinstance(expr, sympy.Rational):
        raise _value_error(entry, f"{text!r} is not an exact rational number")
    if expr.q == 1:
        return int(expr.p)
    return Fraction(int(expr.p), int(expr.q))


def exact_int(text: str, entry: Entry | None = None) -> int:
    value = exact_value(text, entry)
    if not isinstance(value, int):
        raise _value_error(entry, f"{text!r} is not an integer")
    return value


def parse_bool(text: str, entry: Entry | None = None) -> bool:
    key = text.strip().lower()
    if key in {"true", "yes", "1"}:
        return True
    if key in {"false", "no", "0"}:
        return False
    raise _value_error(entry, f"expected true or false, got {text!r}")


_PREDICATE_NAMES = frozenset({"gcd", "lcm", "and", "or", "not"})
_IDENTIFIER = re.compile(r"[A-Za-z_]\w*")


def parse_predicate(text: str, entry: Entry | None = None) -> bool:
    """true/false, or an integer predicate such as `gcd(5, 6) == 1`."""
    try:
        return parse_bool(text, entry)
    except ParseError:
        pass
    unknown = sorted(set(_IDENTIFIER.findall(text)) - _PREDICATE_NAMES)
    if unknown:
        raise _value_error(entry, f"unknown names {unknown} in predicate {text!r}")
    try:
        value = parse_expr(text.strip(), local_dict={}, evaluate=True)
    except Exception as e:  # noqa: BLE001
        raise _value_error(entry, f"cannot read {text!r} as a predicate") from e
    if isinstance(value, bool):
        return value
    if isinstance(value, sympy.logic.boolalg.BooleanAtom):
        return bool(value)
    raise _value_error(entry, f"{text!r} is not true or false")


def _value_error(entry: Entry | None, message: str) -> ParseError:
    if entry is None:
        return ParseError(0, 0, message)
    return entry.error(message)


def expand_item(item: str, entry: Entry | None = None) -> list[str]:
    """Expand the `{lo..hi}` markers of one list item in lockstep."""
    markers = list(_RANGE.finditer(item))
    if not markers:
        return [item]
    ranges = []
    for m in markers:
        lo, hi = exact_int(m.group("lo"), entry), exact_int(m.group("hi"), entry)
        if hi == lo - 1:
            ranges.append([])
        elif lo <= hi:
            ranges.append(list(range(lo, hi + 1)))
        else:
            ranges.append(list(range(lo, hi - 1, -1)))
    if len({len(r) for r in ranges}) != 1:
        raise _value_error(entry, f"range markers in {item!r} have different lengths")
    out = []
    for k in range(len(ranges[0])):
        values = iter(str(r[k]) for r in ranges)
        out.append(_RANGE.sub(lambda _m, vs=values: next(vs), item))
    return out


def expand_list(text: str, entry: Entry | None = None, sep: str = ",") -> list[str]:
    out: list[str] = []
    for item, _offset in split_top_level(text, sep):
        out.extend(expand_item(item, entry))
    return out


def parse_class(
    text: str,
    labels: Sequence[str],
    curves: Mapping[str, Sequence[int]] | None = None,
    entry: Entry | None = None,
) -> tuple[int, ...]:
    """Integer vector of a linear expression over basis labels (and curve names)."""
    curves = dict(curves or {})
    names = list(labels) + [c for c in curves if c not in labels]
    symbols = {name: sympy.Symbol(f"_v{i}") for i, name in enumerate(names)}
    try:
        expr = sympy.expand(parse_expr(text.strip(), local_dict=symbols, evaluate=True))
    except Exception as e:  # noqa: BLE001
        raise _value_error(entry, f"cannot read class expression {text!r}") from e
    rest = expr
    vector = [0] * len(labels)
    for name, sym in symbols.items():
        coeff = expr.coeff(sym)
        if coeff == 0:
            continue
        if not (isinstance(coeff, sympy.Integer)):
            raise _value_error(entry, f"coefficient of {name} in {text!r} is not an integer")
        rest -= coeff * sym
        basis = (
            [int(i == labels.index(name)) for i in range(len(labels))]
            if name in labels
            else list(curves[name])
        )
        vector = [v + int(coeff) * b for v, b in zip(vector, basis, strict=True)]
    if sympy.expand(rest) != 0:
        raise _value_error(entry, f"{text!r} is not an integral linear combination of classes")
    return tuple(vector)


# --- parser ------------------------------------------------------------------


def _read_sections(text: str, source: str | None) -> list[Section]:
    sections: list[Section] = []
    current: Section | None = None
    entries: list[Entry] = []

    def close() -> None:
        if current is not None:
            sections.append(Section(current.kind, current.ident, current.line, tuple(entries)))

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        stripped = line.lstrip()
        if not stripped or stripped[0] in "#;":
            continue
        indent = len(line) - len(stripped)
        if stripped.startswith("["):
            match = _SECTION.fullmatch(stripped)
            if match is None:
                raise ParseError(lineno, indent + 1, "malformed section header", source)
            kind = match.group("kind").lower()
            if kind not in SECTION_KINDS:
                raise ParseError(lineno, indent + 2, f"unknown section '{kind}'", source)
            ident = match.group("ident")
            if kind in {"fact", "step", "discrepancy"} and not ident:
                raise ParseError(lineno, indent + 1, f"[{kind}] needs an identifier", source)
            close()
            current, entries = Section(kind, ident, lineno), []
            continue
        match = _ENTRY.fullmatch(stripped)
        if match is None:
            raise ParseError(lineno, indent + 1, "expected 'key = value'", source)
        if current is None:
            raise ParseError(lineno, indent + 1, "entry before any section", source)
        key = match.group("key")
        if current.kind != "expect" and any(e.key == key for e in entries):
            raise ParseError(lineno, indent + 1, f"duplicate key '{key}'", source)
        entries.append(Entry(key, match.group("value").strip(), lineno, indent + match.start("value") + 1))
    close()
    return sections


def _substitute(entry: Entry, params: Mapping[str, str], source: str | None) -> Entry:
    def repl(m: re.Match[str]) -> str:
        name = m.group("name")
        if name not in params:
            raise ParseError(entry.line, entry.column + m.start(), f"unknown parameter '{name}'", source)
        return params[name]

    return Entry(_PARAM_REF.sub(repl, entry.key), _PARAM_REF.sub(repl, entry.value), entry.line, entry.column)


def parse_scenario(
    text: str, overrides: Mapping[str, str] | None = None, source: str | None = None
) -> Scenario:
    sections = _read_sections(text, source)
    overrides = dict(overrides or {})

    params: dict[str, str] = {}
    for section in (s for s in sections if s.kind == "params"):
        for entry in section.entries:
            params[entry.key] = _substitute(entry, params, source).value
            if entry.key in overrides:
                params[entry.key] = overrides[entry.key]
    unknown = sorted(set(overrides) - set(params))
    if unknown:
        raise ParseError(0, 0, f"unknown parameters {unknown}", source)

    resolved = [
        Section(s.kind, s.ident, s.line, tuple(_substitute(e, params, source) for e in s.entries))
        if s.kind != "params"
        else s
        for s in sections
    ]

    headers = [s for s in resolved if s.kind == "scenario"]
    if len(headers) != 1:
        raise ParseError(1, 1, "exactly one [scenario] section is required", source)
    header = headers[0]

    try:
        facts = tuple(_fact(s) for s in resolved if s.kind == "fact")
        steps = _steps([s for s in resolved if s.kind == "step"])
        discrepancies = tuple(_discrepancy(s) for s in resolved if s.kind == "discrepancy")
        expectations = tuple(e for s in resolved if s.kind == "expect" for e in _expectations(s))
    except ParseError as e:
        raise ParseError(e.line, e.column, e.message, source) from None

    idents = [f.ident for f in facts]
    if len(set(idents)) != len(idents):
        raise ParseError(header.line, 1, "duplicate fact identifiers", source)

    return Scenario(
        name=header.require("name").value,
        description=header.get("description").value if header.get("description") else "",
        params=params,
        facts=facts,
        steps=steps,
        discrepancies=discrepancies,
        expectations=expectations,
        source=source,
    )


def load_scenario(path: Path, overrides: Mapping[str, str] | None = None) -> Scenario:
    return parse_scenario(path.read_text(encoding="utf-8"), overrides, source=str(path))


def _fact(s: Section) -> Fact:
    value = s.require("value")
    return Fact(
        ident=s.ident or "",
        statement=s.require("statement").value,
        citation=s.require("citation").value,
        value=parse_predicate(value.value, value),
    )


def _steps(sections: list[Section]) -> tuple[StepSpec, ...]:
    out: list[StepSpec] = []
    seen: list[str] = []
    for s in sections:
        if s.ident in seen:
            raise ParseError(s.line, 1, f"duplicate step '{s.ident}'")
        source = s.get("input")
        if source is not None and source.value not in seen:
            raise source.error(f"step '{source.value}' is not defined before '{s.ident}'")
        out.append(
            StepSpec(
                ident=s.ident or "",
                op=s.require("op").value,
                input=source.value if source is not None else (seen[-1] if seen else None),
                line=s.line,
                entries={e.key: e for e in s.entries if e.key not in {"op", "input"}},
            )
        )
        seen.append(s.ident or "")
    return tuple(out)


def _split_target(entry: Entry, text: str) -> tuple[str, str]:
    step, dot, key = text.partition(".")
    if not dot or not step or not key:
        raise entry.error(f"expected 'step.key', got {text!r}")
    return step, key


def _discrepancy(s: Section) -> DiscrepancySpec:
    computed = s.require("computed")
    step, key = _split_target(computed, computed.value)
    note = s.get("note")
    return DiscrepancySpec(
        ident=s.ident or "",
        step=step,
        key=key,
        printed=s.require("printed"),
        citation=s.require("citation").value,
        note=note.value if note else "",
        line=s.line,
    )


def _expectations(s: Section) -> list[Expectation]:
    out = []
    for e in s.entries:
        step, key = _split_target(e, e.key)
        value, bar, annotation = e.value.partition("|")
        tag, note = None, ""
        if bar:
            words = annotation.strip().split(None, 1)
            if not words or words[0] not in TAGS:
                raise e.error(f"provenance tag must be one of {', '.join(TAGS)}")
            tag = words[0]
            note = words[1] if len(words) > 1 else ""
        out.append(Expectation(step, key, value.strip(), tag, note, e.line, e.column))
    return out

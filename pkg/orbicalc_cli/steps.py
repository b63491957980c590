"""Step handlers: one function per scenario `op`.

Each handler receives a `StepContext` (its entries, the scenario facts and the
object produced by its input step) and returns a `StepOutcome`: the object handed
to later steps plus the flat `values` that expectations and reports refer to.
"""

from __future__ import annotations

import math
import re
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

from orbicalc_cli.scenario import (
    Entry,
    ParseError,
    Scenario,
    StepSpec,
    exact_int,
    exact_value,
    expand_list,
    parse_bool,
    parse_class,
)
from orbicalc_math import constructions
from orbicalc_math.dynkin import (
    DynkinConfiguration,
    FiberData,
    cartan_det_matches,
    check_z1,
    check_z2,
    eu,
    validate_ambient_rank,
)
from orbicalc_math.errors import InvalidValue
from orbicalc_math.hirzebruch_jung import (
    CyclicSingularity,
    chain_recognize,
    hj_dual,
    hj_eval,
    hj_expand,
)
from orbicalc_math.lattice import det, is_even, is_unimodular, signature
from orbicalc_math.obstruction import (
    derive_sum_relation,
    divisibility_audit,
    exhaustive_search,
    kahler_witness,
    verify_sum_relation,
)
from orbicalc_math.orbifold import (
    IsotropyData,
    OrbifoldSurface,
    assign_isotropy,
    blow_down,
    contract_chain,
    is_calabi_yau,
    orbifold_signature,
    orbifold_structure,
)
from orbicalc_math.seifert import (
    FgAbelianGroup,
    H1Verdict,
    SeifertData,
    check_h1_zero,
    chern_class_numerator,
    h2_total_space,
    kahler_positivity,
    seifert_data,
    simply_connected,
)
from orbicalc_math.smale_barden import (
    gk_condition,
    invariants_from_group,
    null_sasakian_constraints,
)
from orbicalc_math.surfaces import (
    SurfaceModel,
    add_curve,
    blow_up_sequence,
    kodaira_dimension,
    make_hirzebruch,
    make_projective_plane,
    multiplication_degree,
)


class StepError(RuntimeError):
    def __init__(self, step: str, op: str, cause: Exception) -> None:
        self.step = step
        self.op = op
        self.cause = cause
        super().__init__(f"step '{step}' ({op}) failed: {type(cause).__name__}: {cause}")


@dataclass
class StepOutcome:
    obj: Any
    values: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class SeifertOutcome:
    data: SeifertData
    verdict: H1Verdict
    group: FgAbelianGroup | None


@dataclass
class StepContext:
    spec: StepSpec
    scenario: Scenario
    input: Any = None
    workers: int = 1

    def entry(self, key: str) -> Entry | None:
        return self.spec.get(key)

    def require(self, key: str) -> Entry:
        entry = self.entry(key)
        if entry is None:
            raise ParseError(self.spec.line, 1, f"step '{self.spec.ident}' ({self.spec.op}) needs '{key}'")
        return entry

    def text(self, key: str, default: str | None = None) -> str | None:
        entry = self.entry(key)
        return entry.value if entry is not None else default

    def integer(self, key: str, default: int | None = None) -> int:
        entry = self.entry(key) if default is not None else self.require(key)
        return exact_int(entry.value, entry) if entry is not None else default

    def flag(self, key: str, default: bool | None = False) -> bool | None:
        """true/false, or `fact:<id>` for the value of a declared fact."""
        entry = self.entry(key)
        if entry is None:
            return default
        if entry.value.startswith("fact:"):
            ident = entry.value.removeprefix("fact:").strip()
            fact = self.scenario.fact(ident)
            if fact is None:
                raise entry.error(f"no declared fact '{ident}'")
            return fact.value
        return parse_bool(entry.value, entry)

    def items(self, key: str, sep: str = ",") -> list[str]:
        entry = self.entry(key)
        return expand_list(entry.value, entry, sep) if entry is not None else []

    def surface(self) -> SurfaceModel:
        if not isinstance(self.input, SurfaceModel):
            raise InvalidValue(f"needs a smooth surface from step '{self.spec.input}'")
        return self.input

    def orbifold(self) -> OrbifoldSurface:
        if isinstance(self.input, SurfaceModel):
            return OrbifoldSurface.from_surface(self.input)
        if not isinstance(self.input, OrbifoldSurface):
            raise InvalidValue(f"needs a surface or orbifold from step '{self.spec.input}'")
        return self.input


StepHandler = Callable[[StepContext], StepOutcome]
HANDLERS: dict[str, StepHandler] = {}

_INNER_PARENS = re.compile(r"\(([^()]*)\)")


def handler(op: str) -> Callable[[StepHandler], StepHandler]:
    def register(fn: StepHandler) -> StepHandler:
        HANDLERS[op] = fn
        return fn

    return register


# --- value extraction ----------------------------------------------------------------


def surface_values(s: SurfaceModel) -> dict[str, Any]:
    sig = signature(s.gram)
    values: dict[str, Any] = {
        "rank": s.rank,
        "det": det(s.gram),
        "signature": (sig.positive, sig.negative),
        "unimodular": is_unimodular(s.gram),
        "even": is_even(s.gram),
        "k_squared": s.k_squared,
        "convention": str(s.convention),
    }
    for c in s.curves:
        values[f"square.{c.name}"] = s.square(c.vector)
        values[f"genus.{c.name}"] = c.genus
    return values


def orbifold_values(x: OrbifoldSurface) -> dict[str, Any]:
    values: dict[str, Any] = {
        "b2": x.b2,
        "signature": orbifold_signature(x),
        "k_squared": x.pairing(x.canonical_q, x.canonical_q),
        "singular_points": len(x.singular_points),
    }
    for k, point in enumerate(orbifold_structure(x), start=1):
        values[f"point{k}.label"] = point.label
        values[f"point{k}.order"] = point.local_order
        values[f"point{k}.multiplicity"] = point.multiplicity
        values[f"point{k}.divisors"] = ", ".join(point.divisors)
    for c in x.curves:
        values[f"square.{c.name}"] = x.self_intersection(c.name)
        values[f"genus.{c.name}"] = c.genus
    return values


def _classes(ctx: StepContext, key: str, base: SurfaceModel) -> list[tuple[int, ...]]:
    entry = ctx.entry(key)
    curves = {c.name: c.vector for c in base.curves}
    return [parse_class(item, base.basis_labels, curves, entry) for item in ctx.items(key)]


def _named_pairs(ctx: StepContext, key: str) -> list[tuple[str, str]]:
    """`name: value` items."""
    entry = ctx.entry(key)
    out = []
    for item in ctx.items(key):
        name, colon, rest = item.partition(":")
        if not colon or not name.strip():
            raise entry.error(f"expected 'name: value', got {item!r}")
        out.append((name.strip(), rest.strip()))
    return out


# --- surfaces ---------------------------------------------------------------------------


@handler("plane")
def plane(ctx: StepContext) -> StepOutcome:
    s = make_projective_plane()
    return StepOutcome(s, surface_values(s))


@handler("hirzebruch")
def hirzebruch(ctx: StepContext) -> StepOutcome:
    s = make_hirzebruch(ctx.integer("n"), ctx.text("convention", "negative"))
    return StepOutcome(s, surface_values(s))


@handler("k3_chain")
def k3_chain(ctx: StepContext) -> StepOutcome:
    s = constructions.make_k3_lattice_with_chain()
    return StepOutcome(s, surface_values(s))


@handler("curves")
def curves(ctx: StepContext) -> StepOutcome:
    """`curves = name: class [@ genus], ...`"""
    s = ctx.surface()
    entry = ctx.require("curves")
    for name, rest in _named_pairs(ctx, "curves"):
        expr, at, genus = rest.partition("@")
        vector = parse_class(expr, s.basis_labels, {c.name: c.vector for c in s.curves}, entry)
        s = add_curve(s, name, vector, exact_int(genus, entry) if at else None)
    return StepOutcome(s, surface_values(s))


@handler("blow_up")
def blow_up(ctx: StepContext) -> StepOutcome:
    s = ctx.surface()
    names = ctx.items("exceptional")
    if ctx.entry("exceptional") is None:
        count = ctx.integer("count", 1)
        names = [f"E{len(s.exceptionals) + k}" for k in range(1, count + 1)]
    through_each = ctx.items("through_each") if ctx.entry("through_each") else None
    s = blow_up_sequence(
        s,
        names,
        through=ctx.items("through"),
        through_each=[tuple(item.split()) for item in through_each] if through_each is not None else None,
        infinitely_near=bool(ctx.flag("infinitely_near")),
    )
    return StepOutcome(s, surface_values(s))


# --- orbifolds --------------------------------------------------------------------------


@handler("contract")
def contract(ctx: StepContext) -> StepOutcome:
    chain = ctx.items("chain")
    if not chain:
        ctx.require("chain")
    x = contract_chain(ctx.orbifold(), chain)
    point = x.singular_points[-1]
    values = orbifold_values(x)
    values.update(
        {
            "singularity": point.singularity.as_tuple(),
            "label": point.label,
            "chain": tuple(hj_expand(point.singularity).b),
            "incident": ", ".join(point.incident),
        }
    )
    return StepOutcome(x, values)


@handler("blow_down")
def blow_down_step(ctx: StepContext) -> StepOutcome:
    x = ctx.orbifold()
    for name in ctx.items("curves"):
        x = blow_down(x, name)
    return StepOutcome(x, orbifold_values(x))


@handler("isotropy")
def isotropy(ctx: StepContext) -> StepOutcome:
    entry = ctx.require("divisors")
    data = [IsotropyData(name, exact_int(m, entry)) for name, m in _named_pairs(ctx, "divisors")]
    pairs = []
    for item in ctx.items("intersect", sep=";"):
        names = item.replace(",", " ").split()
        if len(names) != 2:
            raise ctx.entry("intersect").error(f"expected two curve names, got {item!r}")
        pairs.append((names[0], names[1]))
    x = assign_isotropy(ctx.orbifold(), data, intersections=pairs)
    values = orbifold_values(x)
    for d in x.isotropy:
        values[f"m.{d.divisor}"] = d.multiplicity
    return StepOutcome(x, values)


@handler("calabi_yau")
def calabi_yau(ctx: StepContext) -> StepOutcome:
    x = ctx.orbifold()
    return StepOutcome(x, {"calabi_yau": is_calabi_yau(x), "b2": x.b2})


# --- Seifert bundles and 5-manifolds ----------------------------------------------------


@handler("seifert")
def seifert(ctx: StepContext) -> StepOutcome:
    x = ctx.orbifold()
    base = x.resolution
    entry = ctx.entry("invariants")
    local = {name: exact_int(b, entry) for name, b in _named_pairs(ctx, "invariants")}
    base_class = _classes(ctx, "base_class", base)
    points = {name: exact_int(j, ctx.entry("point_invariants")) for name, j in _named_pairs(ctx, "point_invariants")}
    data = seifert_data(
        x,
        local,
        base_class=base_class[0] if base_class else None,
        test_classes=_classes(ctx, "test_classes", base),
        ample_classes=_classes(ctx, "ample", base),
        point_invariants=points,
    )
    verdict = check_h1_zero(data, ctx.flag("h1_base_zero", None))
    group = h2_total_space(data, verdict) if verdict.holds else None
    kahler = kahler_positivity(data)

    values: dict[str, Any] = {
        "m": data.m,
        "chern_numerator": chern_class_numerator(data),
        "surjective": verdict.surjective,
        "failing_primes": verdict.failing_primes,
        "primitive": verdict.primitive,
        "h1_zero": verdict.holds,
        "simply_connected": simply_connected(verdict.holds, ctx.flag("pi1_orb_trivial", None)),
        "c1_squared": kahler.c1_squared,
        "kahler_positive": kahler.holds,
    }
    if group is not None:
        values["h2"] = group
        values["h2.free_rank"] = group.free_rank
        values["h2.torsion_order"] = group.order
    return StepOutcome(SeifertOutcome(data, verdict, group), values)


@handler("invariants")
def invariants(ctx: StepContext) -> StepOutcome:
    group_entry = ctx.entry("group")
    if group_entry is not None:
        group = parse_group(group_entry.value, group_entry)
    elif isinstance(ctx.input, SeifertOutcome) and ctx.input.group is not None:
        group = ctx.input.group
    else:
        raise InvalidValue("needs a 'group' entry or a Seifert step with H_1(M) = 0")

    barden_entry = ctx.entry("barden")
    barden = None
    if barden_entry is not None:
        raw = barden_entry.value.strip().lower()
        barden = math.inf if raw in {"inf", "infinity"} else exact_int(raw, barden_entry)
    inv = invariants_from_group(group, bool(ctx.flag("spin")), barden)
    gk = gk_condition(inv)
    null = null_sasakian_constraints(inv)

    values: dict[str, Any] = {"group": group, "k": inv.k, "spin": inv.spin, "barden": inv.barden_i}
    for (p, i), c in inv.c_table:
        values[f"c.{p**i}"] = c
    for p, t in inv.t_table:
        values[f"t.{p}"] = t
    values.update(
        {
            "t_max": inv.t_max,
            "c_max": inv.c_max,
            "gk": gk.holds,
            "gk_reasons": "; ".join(gk.reasons),
            "null_admissible": null.holds,
            "null_reasons": "; ".join(null.reasons),
            "null_notes": "; ".join(null.notes),
            "warnings": "; ".join(inv.warnings),
        }
    )
    return StepOutcome(inv, values)


def parse_group(text: str, entry: Entry | None = None) -> FgAbelianGroup:
    """Group notation with exact sub-expressions in parentheses and range items: `Z^(3-1) + Z_(2**{1..3})^2`."""
    terms = expand_list(text, entry, sep="+")

    def evaluate(m: re.Match[str]) -> str:
        return str(exact_int(m.group(1), entry))

    def flatten(term: str) -> str:
        while True:
            reduced = _INNER_PARENS.sub(evaluate, term)
            if reduced == term:
                return term
            term = reduced

    try:
        return FgAbelianGroup.parse(" + ".join(flatten(t) for t in terms))
    except InvalidValue as e:
        if entry is None:
            raise
        raise entry.error(str(e)) from e


# --- standalone calculators ----------------------------------------------------------


@handler("hj")
def hj(ctx: StepContext) -> StepOutcome:
    chain_entry = ctx.entry("chain")
    if chain_entry is not None:
        chain = [exact_int(x, chain_entry) for x in ctx.items("chain")]
        if ctx.flag("relaxed"):
            return StepOutcome(chain, {"value": hj_eval(chain, relaxed=True), "length": len(chain)})
        s = chain_recognize(chain)
    else:
        s = CyclicSingularity(ctx.integer("m"), ctx.integer("r"))
    primal, dual = hj_expand(s), hj_dual(s)
    return StepOutcome(
        s,
        {
            "singularity": s.as_tuple(),
            "label": s.label,
            "chain": primal.b,
            "value": hj_eval(primal),
            "length": len(primal),
            "dual": dual.b,
            "dual_length": len(dual),
        },
    )


@handler("multiplication_degree")
def degree(ctx: StepContext) -> StepOutcome:
    k = ctx.integer("k")
    return StepOutcome(k, {"k": k, "degree": multiplication_degree(k)})


@handler("dynkin")
def dynkin(ctx: StepContext) -> StepOutcome:
    config = DynkinConfiguration.parse(ctx.text("configuration", "") or "")
    fibers = []
    for item in ctx.items("fibers", sep=";"):
        kind, *rest = item.split()
        omitted = [w.removeprefix("-") for w in rest]
        if any(not w.startswith("-") for w in rest):
            raise ctx.entry("fibers").error(f"omitted components are written -Name, got {item!r}")
        fibers.append(FiberData.from_kodaira(kind, omitted))
    if ctx.entry("ambient") is not None:
        validate_ambient_rank(config, ctx.integer("ambient"))
    z1 = check_z1(fibers)
    return StepOutcome(
        config,
        {
            "configuration": str(config),
            "rank": config.rank,
            "eu": eu(config),
            "z2": check_z2(config),
            "z1_count": z1.count,
            "z1": z1.holds,
            "cartan_det_ok": cartan_det_matches(config),
        },
    )


@handler("kodaira")
def kodaira(ctx: StepContext) -> StepOutcome:
    def sign(key: str) -> Any:
        raw = ctx.require(key).value.strip()
        if raw.lower() in {"negative", "zero", "positive"}:
            return raw.lower()
        return exact_value(raw, ctx.entry(key))

    value = kodaira_dimension(sign("k_dot_omega"), sign("k_squared"))
    return StepOutcome(value, {"kodaira_dimension": value})


@handler("sum_relation")
def sum_relation(ctx: StepContext) -> StepOutcome:
    raw_n = (ctx.text("n", "symbolic") or "symbolic").strip()
    n = None if raw_n == "symbolic" else exact_int(raw_n, ctx.entry("n"))
    record = derive_sum_relation(n)
    values: dict[str, Any] = {
        "reduces_on_d1": record.reduces_on_d1,
        "reduces_on_d2": record.reduces_on_d2,
        "form_nondegenerate": record.form_nondegenerate,
        "polynomial_matches": record.polynomial_matches,
        "concluded": record.concluded,
    }
    if ctx.entry("a") is not None:
        if n is None:
            raise ctx.entry("a").error("a numeric check needs an integer n")
        a, b = ctx.integer("a"), ctx.integer("b")
        d2 = (ctx.integer("c", 2 - a), ctx.integer("d", n + 2 - b))
        numeric = verify_sum_relation(n, (a, b), d2)
        values.update(
            {
                "numeric.orthogonal": numeric.orthogonal,
                "numeric.genus_one": numeric.both_genus_one,
                "numeric.spanning": numeric.spanning,
                "numeric.residual": numeric.residual,
                "numeric.concluded": numeric.concluded,
            }
        )
    return StepOutcome(record, values)


@handler("search")
def search(ctx: StepContext) -> StepOutcome:
    bound, n_bound = ctx.integer("bound"), ctx.integer("nbound")
    workers = ctx.integer("workers", ctx.workers)
    kahler = bool(ctx.flag("kahler", True))
    arithmetic = exhaustive_search(bound, n_bound, kahler_filter=False, workers=workers)
    survivors = [c for c in arithmetic if kahler_witness(c) is not None] if kahler else arithmetic
    audit = divisibility_audit(arithmetic)
    return StepOutcome(
        survivors,
        {
            "survivors": len(survivors),
            "pre_positivity": len(arithmetic),
            "all_a_minus_one": all(e.a_is_minus_one for e in audit),
            "all_n_plus_2b_one": all(e.n_plus_2b_is_one for e in audit),
            "divisibility": all(e.a_minus_one_divides_two and e.a_negative for e in audit),
            "sign_argument": all(e.sign_argument for e in audit),
        },
    )


def run_step(ctx: StepContext) -> StepOutcome:
    fn = HANDLERS.get(ctx.spec.op)
    if fn is None:
        raise ParseError(ctx.spec.line, 1, f"unknown op '{ctx.spec.op}'")
    try:
        return fn(ctx)
    except ParseError:
        raise
    except (ValueError, ZeroDivisionError) as e:
        raise StepError(ctx.spec.ident, ctx.spec.op, e) from e

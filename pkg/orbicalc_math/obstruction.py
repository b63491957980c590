"""No disjoint pair of tori spans H_2 of a Hirzebruch surface positively.

Work on H_n with basis (sigma, f), sigma^2 = -n, sigma.f = 1, f^2 = 0 and
K = -2 sigma - (n+2) f. Suppose D1, D2 are disjoint genus one classes that span
H_2 over Q. Adjunction and D1.D2 = 0 give (K + D1 + D2).D_i = 0, hence
D2 = -K - D1. Writing D1 = a sigma + b f this leaves

    D1.D2 = (a - 1)(a n - 2 b) + 2 a = 0

whose only spanning solutions have a = -1 and n + 2b = 1. A Kaehler class
x sigma + y f (x > 0, y > n x) then pairs negatively with D1.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import sympy

from orbicalc_math.errors import InvalidValue


@dataclass(frozen=True, order=True)
class TorusPairCandidate:
    n: int
    a: int
    b: int

    @property
    def d1(self) -> tuple[int, int]:
        return (self.a, self.b)

    @property
    def d2(self) -> tuple[int, int]:
        return (2 - self.a, self.n + 2 - self.b)


def hirzebruch_pair(n: int, u: tuple[int, int], v: tuple[int, int]) -> int:
    """(a sigma + b f).(c sigma + d f) = -n a c + a d + b c."""
    (a, b), (c, d) = u, v
    return -n * a * c + a * d + b * c


def canonical(n: int) -> tuple[int, int]:
    return (-2, -(n + 2))


def relation_polynomial(c: TorusPairCandidate) -> int:
    return (c.a - 1) * (c.a * c.n - 2 * c.b) + 2 * c.a


def spans(c: TorusPairCandidate) -> bool:
    """det [[a, b], [2 - a, n + 2 - b]] = a (n + 2) - 2 b is nonzero."""
    return c.a * (c.n + 2) - 2 * c.b != 0


def genus_one(n: int, v: tuple[int, int]) -> bool:
    k = canonical(n)
    return hirzebruch_pair(n, v, (k[0] + v[0], k[1] + v[1])) == 0


def is_canonical(c: TorusPairCandidate) -> bool:
    """D1 carries the smaller sigma coefficient (a <= 1), ties broken on b."""
    if c.a < 1:
        return True
    return c.a == 1 and c.b <= c.n + 2 - c.b


# --- Kaehler positivity ----------------------------------------------------------


def _positive_interval(a: int, b: int) -> tuple[Fraction, Fraction | None] | None:
    """{s > 0 : a s + b > 0} as an open interval (lo, hi), hi=None for infinity."""
    if a == 0:
        return (Fraction(0), None) if b > 0 else None
    root = Fraction(-b, a)
    if a > 0:
        return (max(Fraction(0), root), None)
    return (Fraction(0), root) if root > 0 else None


def kahler_witness(c: TorusPairCandidate) -> tuple[Fraction, Fraction] | None:
    """A Kaehler class (x, y) pairing positively with D1 and D2, or None.

    With y = n x + t the pairing of a sigma + b f is a t + b x, so only the ratio
    s = t / x matters and each class cuts out an open interval of s > 0.
    """
    lo, hi = Fraction(0), None
    for a, b in (c.d1, c.d2):
        interval = _positive_interval(a, b)
        if interval is None:
            return None
        lo = max(lo, interval[0])
        if interval[1] is not None:
            hi = interval[1] if hi is None else min(hi, interval[1])
    if hi is not None and lo >= hi:
        return None
    s = lo + 1 if hi is None else (lo + hi) / 2
    return (Fraction(1), c.n + s)


def sign_argument_holds(c: TorusPairCandidate) -> bool:
    """For a < 0 and b <= 0 the form a t + b x is negative on the whole cone."""
    a, b = c.d1
    if a < 0 and b <= 0:
        return kahler_witness(c) is None
    return True


# --- symbolic derivation -----------------------------------------------------------


@dataclass(frozen=True)
class SumRelationRecord:
    n: int | None
    reduces_on_d1: bool
    reduces_on_d2: bool
    form_nondegenerate: bool
    polynomial_matches: bool
    concluded: bool


def derive_sum_relation(n: int | None = None) -> SumRelationRecord:
    """Check symbolically that adjunction plus D1.D2 = 0 force K + D1 + D2 = 0.

    (K + D1 + D2).D_i expands to the adjunction and orthogonality expressions,
    so it vanishes once they do; the form has det -1, so a class orthogonal to a
    spanning pair is zero. `n=None` keeps n symbolic.
    """
    a, b, c, d, sym_n = sympy.symbols("a b c d n", integer=True)
    nn = sym_n if n is None else sympy.Integer(n)

    def pair(u, v):
        return -nn * u[0] * v[0] + u[0] * v[1] + u[1] * v[0]

    k = (sympy.Integer(-2), -(nn + 2))
    d1, d2 = (a, b), (c, d)
    total = tuple(k[i] + d1[i] + d2[i] for i in range(2))
    adj1 = pair(d1, (k[0] + a, k[1] + b))
    adj2 = pair(d2, (k[0] + c, k[1] + d))
    orth = pair(d1, d2)

    on_d1 = sympy.expand(pair(total, d1) - (adj1 + orth)) == 0
    on_d2 = sympy.expand(pair(total, d2) - (adj2 + orth)) == 0
    form_det = sympy.Matrix([[-nn, 1], [1, 0]]).det()
    substituted = orth.subs({c: 2 - a, d: nn + 2 - b})
    poly = (a - 1) * (a * nn - 2 * b) + 2 * a
    matches = sympy.expand(substituted - poly) == 0

    record = SumRelationRecord(
        n=n,
        reduces_on_d1=bool(on_d1),
        reduces_on_d2=bool(on_d2),
        form_nondegenerate=form_det != 0,
        polynomial_matches=bool(matches),
        concluded=bool(on_d1 and on_d2 and form_det != 0),
    )
    logging.info(f"Sum relation derivation for n={n}: {record}")
    return record


@dataclass(frozen=True)
class NumericSumRelation:
    orthogonal: bool
    both_genus_one: bool
    spanning: bool
    residual: tuple[int, int]

    @property
    def concluded(self) -> bool:
        return self.orthogonal and self.both_genus_one and self.spanning


def verify_sum_relation(n: int, d1: tuple[int, int], d2: tuple[int, int]) -> NumericSumRelation:
    """Numeric check; `residual` is K + D1 + D2, zero whenever the hypotheses hold."""
    k = canonical(n)
    return NumericSumRelation(
        orthogonal=hirzebruch_pair(n, d1, d2) == 0,
        both_genus_one=genus_one(n, d1) and genus_one(n, d2),
        spanning=d1[0] * d2[1] - d1[1] * d2[0] != 0,
        residual=(k[0] + d1[0] + d2[0], k[1] + d1[1] + d2[1]),
    )


# --- exhaustive search ---------------------------------------------------------------


def survives_arithmetic(c: TorusPairCandidate) -> bool:
    if relation_polynomial(c) != 0 or not is_canonical(c):
        return False
    if not spans(c):
        return False
    if hirzebruch_pair(c.n, c.d1, c.d2) != 0:
        return False
    return genus_one(c.n, c.d1) and genus_one(c.n, c.d2)


def _search_fixed_n(args: tuple[int, int, bool]) -> list[TorusPairCandidate]:
    n, bound, kahler_filter = args
    out = []
    for a in range(-bound, min(1, bound) + 1):
        for b in range(-bound, bound + 1):
            if (a - 1) * (a * n - 2 * b) + 2 * a:
                continue
            c = TorusPairCandidate(n, a, b)
            if not survives_arithmetic(c):
                continue
            if kahler_filter and kahler_witness(c) is None:
                continue
            out.append(c)
    return out


def exhaustive_search(
    bound: int, n_bound: int, *, kahler_filter: bool = True, workers: int = 1
) -> list[TorusPairCandidate]:
    """All canonical (n, a, b) with |a|, |b| <= bound, 0 <= n <= n_bound passing every filter."""
    if bound < 1 or n_bound < 1:
        raise InvalidValue("search bounds must be >= 1")
    jobs = [(n, bound, kahler_filter) for n in range(n_bound + 1)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_search_fixed_n, jobs))
    else:
        chunks = [_search_fixed_n(job) for job in jobs]
    found = sorted(c for chunk in chunks for c in chunk)
    logging.info(
        f"Search |a|,|b| <= {bound}, n <= {n_bound}, kahler={kahler_filter}: {len(found)} survivors"
    )
    return found


@dataclass(frozen=True)
class AuditEntry:
    candidate: TorusPairCandidate
    a_minus_one_divides_two: bool
    a_negative: bool
    a_is_minus_one: bool
    n_plus_2b_is_one: bool
    sign_argument: bool

    @property
    def ok(self) -> bool:
        return (
            self.a_minus_one_divides_two
            and self.a_negative
            and self.a_is_minus_one
            and self.n_plus_2b_is_one
            and self.sign_argument
        )


def divisibility_audit(candidates: list[TorusPairCandidate]) -> list[AuditEntry]:
    """Replay the gcd(a, a-1) = 1 argument on every pre-positivity survivor."""
    return [
        AuditEntry(
            candidate=c,
            a_minus_one_divides_two=c.a != 1 and 2 % (c.a - 1) == 0,
            a_negative=c.a <= -1,
            a_is_minus_one=c.a == -1,
            n_plus_2b_is_one=c.n + 2 * c.b == 1,
            sign_argument=sign_argument_holds(c),
        )
        for c in candidates
    ]

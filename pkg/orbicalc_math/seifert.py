"""Seifert bundles over cyclic orbifolds: H_1 criteria and H_2 of the total space.

A Seifert bundle M -> X is described by the isotropy divisors D_i of X with
local invariants (m_i, b_i), gcd(b_i, m_i) = 1, and an optional base class L.
With m = lcm(m_i) the first Chern class of the quotient M/m is represented by

    c = m L + sum_i b_i (m / m_i) D_i

H_1(M) = 0 iff H_1(X) = 0, the reduction map H^2(X) -> sum H^2(D_i, Z_{m_i})
is onto, and c is primitive. Then H_2(M) = Z^(b2 - 1) + sum Z_{m_i}^(2 g_i).
"""

from __future__ import annotations

import logging
import math
import re
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from sympy import factorint

from orbicalc_math.errors import H1NotZero, InvalidValue, MissingPairingData, ZeroVector
from orbicalc_math.lattice import IntMatrix, cokernel_invariants, is_primitive, rank_mod_p
from orbicalc_math.orbifold import OrbifoldSurface


@dataclass(frozen=True)
class FgAbelianGroup:
    """Z^free_rank plus cyclic groups of prime-power order.

    `torsion` holds (order, multiplicity) pairs sorted by (prime, order).
    """

    free_rank: int = 0
    torsion: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        if self.free_rank < 0:
            raise InvalidValue(f"free rank must be >= 0, got {self.free_rank}")
        counts: Counter[int] = Counter()
        for order, mult in self.torsion:
            factors = factorint(order)
            if order < 2 or len(factors) != 1:
                raise InvalidValue(f"torsion order {order} is not a prime power")
            if mult < 0:
                raise InvalidValue(f"negative multiplicity for Z_{order}")
            counts[order] += mult
        canonical = tuple(
            sorted(((o, c) for o, c in counts.items() if c), key=lambda oc: (_prime_of(oc[0]), oc[0]))
        )
        object.__setattr__(self, "torsion", canonical)

    @classmethod
    def from_cyclic(cls, free_rank: int, orders: Iterable[int]) -> FgAbelianGroup:
        """Split each Z_n into its prime-power parts."""
        counts: Counter[int] = Counter()
        for n in orders:
            if n < 1:
                raise InvalidValue(f"cyclic order must be positive, got {n}")
            for p, e in factorint(n).items():
                counts[p**e] += 1
        return cls(free_rank, tuple(counts.items()))

    @classmethod
    def cokernel(cls, a: IntMatrix) -> FgAbelianGroup:
        """Z^rows / a Z^cols."""
        free, factors = cokernel_invariants(a)
        return cls.from_cyclic(free, factors)

    @classmethod
    def parse(cls, text: str) -> FgAbelianGroup:
        """Inverse of `str`: `Z^2 + Z_3^2 + Z_9`, `0` for the trivial group."""
        text = text.strip()
        if text in {"0", ""}:
            return cls()
        free = 0
        orders: list[int] = []
        for term in (t.strip() for t in text.split("+")):
            match = _TERM.fullmatch(term)
            if match is None:
                raise InvalidValue(f"cannot parse group term {term!r}")
            order, power = match.group("order"), int(match.group("power") or 1)
            if order is None:
                free += power
            else:
                orders.extend([int(order)] * power)
        return cls.from_cyclic(free, orders)

    @property
    def order(self) -> int:
        """Order of the torsion subgroup."""
        return math.prod(o**c for o, c in self.torsion)

    def prime_power_table(self) -> dict[tuple[int, int], int]:
        """c(p^i) keyed by (p, i)."""
        out = {}
        for order, mult in self.torsion:
            ((p, e),) = factorint(order).items()
            out[(int(p), int(e))] = mult
        return out

    def __str__(self) -> str:
        terms = [f"Z^{self.free_rank}"] if self.free_rank else []
        terms += [f"Z_{o}^{c}" for o, c in self.torsion]
        return " + ".join(terms) if terms else "0"


_TERM = re.compile(r"Z(?:_(?P<order>\d+))?(?:\^(?P<power>\d+))?")


def _prime_of(order: int) -> int:
    return min(factorint(order))


def cokernel(a: IntMatrix) -> FgAbelianGroup:
    return FgAbelianGroup.cokernel(a)


@dataclass(frozen=True)
class SeifertDivisor:
    name: str
    m: int
    genus: int
    b: int = 1

    def __post_init__(self) -> None:
        if math.gcd(self.b, self.m) != 1:
            raise InvalidValue(f"local invariant b={self.b} of {self.name} is not a unit mod {self.m}")


@dataclass(frozen=True, eq=False)
class SeifertData:
    base: OrbifoldSurface
    divisors: tuple[SeifertDivisor, ...] = ()
    base_class: tuple[int, ...] | None = None
    test_classes: tuple[tuple[int, ...], ...] = ()
    ample_classes: tuple[tuple[int, ...], ...] = ()
    point_invariants: Mapping[str, int] = field(default_factory=dict)

    @property
    def m(self) -> int:
        return math.lcm(*(d.m for d in self.divisors)) if self.divisors else 1

    def effective_test_classes(self) -> tuple[tuple[int, ...], ...]:
        if self.test_classes:
            return self.test_classes
        return tuple(self.base.basis_vector(i) for i in self.base.surviving_basis)


def seifert_data(
    base: OrbifoldSurface,
    local_invariants: Mapping[str, int] | None = None,
    *,
    base_class: Sequence[int] | None = None,
    test_classes: Sequence[Sequence[int]] = (),
    ample_classes: Sequence[Sequence[int]] = (),
    point_invariants: Mapping[str, int] | None = None,
) -> SeifertData:
    """Seifert data over `base` using its isotropy divisors.

    `local_invariants` maps divisor names to b_i (default 1). The j_x of singular
    points are kept as given.
    """
    local_invariants = dict(local_invariants or {})
    known = {d.divisor for d in base.isotropy}
    unknown = set(local_invariants) - known
    if unknown:
        raise InvalidValue(f"local invariants for non-isotropy divisors {sorted(unknown)}")
    divisors = tuple(
        SeifertDivisor(d.divisor, d.multiplicity, d.genus, local_invariants.get(d.divisor, 1))
        for d in base.isotropy
    )
    rank = base.resolution.rank
    for v in (*test_classes, *ample_classes, *([base_class] if base_class is not None else [])):
        if len(v) != rank:
            raise InvalidValue(f"class {tuple(v)} does not live on the rank {rank} resolution")
    return SeifertData(
        base=base,
        divisors=divisors,
        base_class=tuple(base_class) if base_class is not None else None,
        test_classes=tuple(tuple(v) for v in test_classes),
        ample_classes=tuple(tuple(v) for v in ample_classes),
        point_invariants=dict(point_invariants or {}),
    )


def chern_class_numerator(s: SeifertData) -> tuple[int, ...]:
    """m L + sum b_i (m / m_i) D_i on the resolution basis."""
    m = s.m
    out = [m * x for x in s.base_class] if s.base_class is not None else [0] * s.base.resolution.rank
    for d in s.divisors:
        coeff = d.b * (m // d.m)
        out = [a + coeff * x for a, x in zip(out, s.base.curve(d.name).vector, strict=True)]
    return tuple(out)


def _test_pairing(s: SeifertData) -> IntMatrix:
    """Columns: resolution pairing of each basis coordinate with each test class."""
    tests = s.effective_test_classes()
    if not tests:
        raise MissingPairingData("no test classes to pair against")
    gram = s.base.resolution.gram
    columns = [gram.apply(t) for t in tests]
    return IntMatrix([[col[i] for col in columns] for i in range(gram.rows)])


@dataclass(frozen=True)
class H1Verdict:
    base_h1_zero: bool | None
    surjective: bool
    primitive: bool
    failing_primes: tuple[int, ...] = ()

    @property
    def holds(self) -> bool | None:
        """None when the other two conditions hold but H_1(X) = 0 was not declared."""
        if not (self.surjective and self.primitive) or self.base_h1_zero is False:
            return False
        return True if self.base_h1_zero else None


def surjectivity_failures(s: SeifertData) -> tuple[int, ...]:
    """Primes p for which the divisors with p | m_i are not independent mod p on the test classes."""
    if not s.divisors:
        return ()
    pairing = _test_pairing(s)
    rows = [
        [sum(v * pairing[i, j] for i, v in enumerate(s.base.curve(d.name).vector)) for d in s.divisors]
        for j in range(pairing.cols)
    ]
    primes = sorted({int(p) for d in s.divisors for p in factorint(d.m)})
    failures = []
    for p in primes:
        cols = [k for k, d in enumerate(s.divisors) if d.m % p == 0]
        sub = IntMatrix([[row[k] for k in cols] for row in rows])
        if rank_mod_p(sub, p) < len(cols):
            failures.append(p)
    return tuple(failures)


def chern_class_is_primitive(s: SeifertData) -> bool:
    try:
        return is_primitive(chern_class_numerator(s), _test_pairing(s))
    except ZeroVector:
        logging.warning("Chern class numerator is zero; it is not primitive")
        return False


def check_h1_zero(s: SeifertData, h1_base_zero: bool | None) -> H1Verdict:
    if s.divisors and not s.effective_test_classes():
        raise MissingPairingData("isotropy divisors present but no classes to pair them with")
    failures = surjectivity_failures(s)
    verdict = H1Verdict(
        base_h1_zero=h1_base_zero,
        surjective=not failures,
        primitive=chern_class_is_primitive(s),
        failing_primes=failures,
    )
    logging.info(
        f"H1 check: base={h1_base_zero} surjective={verdict.surjective} primitive={verdict.primitive}"
    )
    return verdict


def h2_total_space(s: SeifertData, verdict: H1Verdict) -> FgAbelianGroup:
    if verdict.holds is not True:
        raise H1NotZero(f"H_1(M) = 0 is not established ({verdict})")
    b2 = s.base.b2
    if b2 < 1:
        raise InvalidValue("the base orbifold has b2 = 0")
    orders = [d.m for d in s.divisors for _ in range(2 * d.genus)]
    return FgAbelianGroup.from_cyclic(b2 - 1, orders)


@dataclass(frozen=True)
class KahlerCheck:
    c1_squared: Fraction
    ample_pairings: tuple[Fraction, ...]

    @property
    def holds(self) -> bool:
        return self.c1_squared > 0 and all(x > 0 for x in self.ample_pairings)


def kahler_positivity(s: SeifertData) -> KahlerCheck:
    """c_1(M) = c / m: positive square and positive on each declared ample class."""
    c1 = [Fraction(x, s.m) for x in chern_class_numerator(s)]
    return KahlerCheck(
        c1_squared=Fraction(s.base.pairing(c1, c1)),
        ample_pairings=tuple(Fraction(s.base.pairing(c1, a)) for a in s.ample_classes),
    )


def simply_connected(h1_zero: bool | None, pi1_orb_trivial: bool | None) -> bool | None:
    """pi_1(M) = 1 when H_1(M) = 0 and pi_1^orb(X) = 1; unknown otherwise."""
    if h1_zero and pi1_orb_trivial:
        return True
    return None

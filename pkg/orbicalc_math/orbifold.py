"""Cyclic orbifold surfaces obtained by contracting curves on a smooth model.

An `OrbifoldSurface` keeps the smooth resolution together with the classes of
every contracted curve. The rational intersection form is the smooth pairing
corrected by the inverse Gram matrix M of the contracted curves:

    v . w  =  v.w - U_v^T M^{-1} U_w,    U_v = (v . c_k)_k

which is the smooth pairing of the projections of v and w onto the orthogonal
complement of the contracted span.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property

from orbicalc_math.errors import (
    ChainTouchesSingularPoint,
    CoprimalityViolation,
    InvalidIncidence,
    InvalidValue,
    MultiplicityNotGreaterThanOne,
    NotAChain,
    NotNegativeDefinite,
)
from orbicalc_math.hirzebruch_jung import (
    CyclicSingularity,
    chain_gram,
    chain_recognize,
    hj_expand,
)
from orbicalc_math.lattice import IntMatrix, RatMatrix, det, invert, rank, signature, snf
from orbicalc_math.surfaces import CurveClass, SurfaceModel

Rational = int | Fraction


@dataclass(frozen=True)
class SingularPoint:
    singularity: CyclicSingularity
    chain: tuple[str, ...]
    incident: tuple[str, ...] = ()

    @property
    def label(self) -> str:
        return self.singularity.label


@dataclass(frozen=True)
class IsotropyData:
    divisor: str
    multiplicity: int
    genus: int | None = None

    def __post_init__(self) -> None:
        if self.multiplicity <= 1:
            raise MultiplicityNotGreaterThanOne(
                f"isotropy multiplicity of {self.divisor} must be > 1, got {self.multiplicity}"
            )


@dataclass(frozen=True, eq=False)
class OrbifoldSurface:
    resolution: SurfaceModel
    contracted: tuple[str, ...] = ()
    contracted_vectors: tuple[tuple[int, ...], ...] = ()
    singular_points: tuple[SingularPoint, ...] = ()
    isotropy: tuple[IsotropyData, ...] = ()
    declared_intersections: frozenset[frozenset[str]] = field(default_factory=frozenset)

    @classmethod
    def from_surface(cls, s: SurfaceModel) -> OrbifoldSurface:
        return cls(resolution=s)

    # --- the rational pairing ----------------------------------------------

    @cached_property
    def _correction(self) -> RatMatrix | None:
        if not self.contracted_vectors:
            return None
        m = IntMatrix(
            [[self.resolution.pair(u, v) for v in self.contracted_vectors] for u in self.contracted_vectors]
        )
        return invert(m)

    def _incidence(self, v: Sequence[Rational]) -> tuple[Rational, ...]:
        return tuple(self.resolution.pair(c, v) for c in self.contracted_vectors)

    def pairing(self, u: Sequence[Rational], v: Sequence[Rational]) -> Rational:
        value = self.resolution.pair(u, v)
        if self._correction is None:
            return value
        uu, uv = self._incidence(u), self._incidence(v)
        correction = sum(
            (uu[i] * self._correction[i, j] * uv[j] for i in range(len(uu)) for j in range(len(uv))),
            Fraction(0),
        )
        return _normalize(value - correction)

    def project(self, v: Sequence[Rational]) -> tuple[Rational, ...]:
        """Ambient rational vector of v pushed off the contracted curves."""
        if self._correction is None:
            return tuple(v)
        alpha = self._correction.apply(self._incidence(v))
        out = list(v)
        for a, c in zip(alpha, self.contracted_vectors, strict=True):
            out = [x - a * y for x, y in zip(out, c, strict=True)]
        return tuple(_normalize(x) for x in out)

    # --- surviving lattice --------------------------------------------------

    @cached_property
    def surviving_basis(self) -> tuple[int, ...]:
        """Indices of standard basis classes completing the contracted span."""
        chosen: list[tuple[int, ...]] = list(self.contracted_vectors)
        picked: list[int] = []
        n = self.resolution.rank
        for i in range(n):
            e = tuple(int(i == j) for j in range(n))
            if rank(IntMatrix([*chosen, e])) > len(chosen):
                chosen.append(e)
                picked.append(i)
        return tuple(picked)

    @property
    def b2(self) -> int:
        return len(self.surviving_basis)

    def basis_vector(self, index: int) -> tuple[int, ...]:
        return tuple(int(index == j) for j in range(self.resolution.rank))

    @cached_property
    def gram_q(self) -> RatMatrix:
        basis = [self.basis_vector(i) for i in self.surviving_basis]
        if not basis:
            return RatMatrix.zeros(0, 0)
        return RatMatrix([[self.pairing(u, v) for v in basis] for u in basis])

    @cached_property
    def canonical_q(self) -> tuple[Rational, ...]:
        return self.project(self.resolution.canonical)

    @property
    def curves(self) -> tuple[CurveClass, ...]:
        return tuple(c for c in self.resolution.curves if c.name not in self.contracted)

    def curve(self, name: str) -> CurveClass:
        if name in self.contracted:
            raise InvalidIncidence(f"curve {name!r} has been contracted")
        return self.resolution.curve(name)

    def self_intersection(self, name: str) -> Rational:
        v = self.curve(name).vector
        return self.pairing(v, v)

    def isotropy_of(self, name: str) -> IsotropyData | None:
        return next((d for d in self.isotropy if d.divisor == name), None)

    def intersect(self, first: str, second: str) -> bool:
        """True when the two curves meet: nonzero rational pairing or a declared intersection."""
        if frozenset((first, second)) in self.declared_intersections:
            return True
        return self.pairing(self.curve(first).vector, self.curve(second).vector) != 0


def _normalize(x: Rational) -> Rational:
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def _as_orbifold(x: SurfaceModel | OrbifoldSurface) -> OrbifoldSurface:
    return x if isinstance(x, OrbifoldSurface) else OrbifoldSurface.from_surface(x)


def _leading_minors_positive(m: list[list[Rational]]) -> bool:
    for k in range(1, len(m) + 1):
        if det(RatMatrix([row[:k] for row in m[:k]])) <= 0:
            return False
    return True


def _touched_chain(x: OrbifoldSurface, vector: Sequence[int]) -> SingularPoint | None:
    for point in x.singular_points:
        for name in point.chain:
            if x.resolution.pair(x.resolution.curve(name).vector, vector) != 0:
                return point
    return None


def contract_chain(surface: SurfaceModel | OrbifoldSurface, chain: Sequence[str]) -> OrbifoldSurface:
    """Contract a Hirzebruch-Jung chain of curves to a cyclic singular point.

    Surviving curves meeting the chain must meet only a tail curve, once.
    """
    x = _as_orbifold(surface)
    names = tuple(chain)
    if not names:
        raise NotAChain("empty chain")
    if len(set(names)) != len(names):
        raise NotAChain(f"repeated curve in chain {list(names)}")
    for name in names:
        if name in x.contracted:
            raise ChainTouchesSingularPoint(f"curve {name!r} is already contracted")
        if not x.resolution.has_curve(name):
            raise NotAChain(f"unknown curve {name!r}")

    vectors = [x.resolution.curve(n).vector for n in names]
    for name, v in zip(names, vectors, strict=True):
        point = _touched_chain(x, v)
        if point is not None:
            raise ChainTouchesSingularPoint(f"curve {name!r} meets the chain of singular point {point.label}")

    g = [[x.pairing(u, v) for v in vectors] for u in vectors]
    for i, name in enumerate(names):
        sq = g[i][i]
        if not (isinstance(sq, int) and sq <= -2):
            raise NotAChain(f"curve {name!r} has self-intersection {sq}, need an integer <= -2")
        for j in range(i + 1, len(names)):
            want = 1 if j == i + 1 else 0
            if g[i][j] != want:
                raise NotAChain(f"curves {name!r} and {names[j]!r} meet {g[i][j]} times, expected {want}")

    if not _leading_minors_positive([[-e for e in row] for row in g]):
        raise NotNegativeDefinite(f"chain {list(names)} is not negative definite")

    incident: list[str] = []
    for c in x.curves:
        if c.name in names:
            continue
        u = [x.pairing(c.vector, v) for v in vectors]
        if not any(u):
            continue
        tail = [0] * len(u)
        head = [0] * len(u)
        head[0] = 1
        tail[-1] = 1
        if u not in (head, tail):
            raise InvalidIncidence(f"curve {c.name!r} meets the chain as {u}; only a single tail crossing is allowed")
        incident.append(c.name)

    singularity = chain_recognize(tuple(-g[i][i] for i in range(len(names))))
    logging.info(f"Contracted {list(names)} to a {singularity.label} point {singularity}")
    return replace(
        x,
        contracted=(*x.contracted, *names),
        contracted_vectors=(*x.contracted_vectors, *vectors),
        singular_points=(*x.singular_points, SingularPoint(singularity, names, tuple(incident))),
    )


def blow_down(surface: SurfaceModel | OrbifoldSurface, name: str) -> OrbifoldSurface:
    """Contract a curve of rational self-intersection -1 to a smooth point."""
    x = _as_orbifold(surface)
    v = x.curve(name).vector
    sq = x.pairing(v, v)
    if sq != -1:
        raise NotAChain(f"curve {name!r} has self-intersection {sq}, a blow-down needs -1")
    logging.info(f"Blew down {name}")
    return replace(
        x,
        contracted=(*x.contracted, name),
        contracted_vectors=(*x.contracted_vectors, v),
    )


def assign_isotropy(
    surface: OrbifoldSurface,
    data: Iterable[IsotropyData],
    *,
    intersections: Iterable[tuple[str, str]] = (),
) -> OrbifoldSurface:
    """Record isotropy divisors; intersecting divisors need coprime multiplicities."""
    x = surface
    declared = set(x.declared_intersections)
    for first, second in intersections:
        x.curve(first)
        x.curve(second)
        declared.add(frozenset((first, second)))
    x = replace(x, declared_intersections=frozenset(declared))

    incoming: dict[str, IsotropyData] = {}
    for d in data:
        stored = x.curve(d.divisor).genus
        if d.genus is not None and d.genus != stored:
            raise InvalidValue(f"divisor {d.divisor}: declared genus {d.genus}, curve has genus {stored}")
        incoming[d.divisor] = IsotropyData(d.divisor, d.multiplicity, stored)

    merged = [d for d in x.isotropy if d.divisor not in incoming] + list(incoming.values())
    for i, first in enumerate(merged):
        for second in merged[i + 1 :]:
            if math.gcd(first.multiplicity, second.multiplicity) != 1 and x.intersect(
                first.divisor, second.divisor
            ):
                raise CoprimalityViolation(
                    first.divisor, second.divisor, first.multiplicity, second.multiplicity
                )
    return replace(x, isotropy=tuple(merged))


@dataclass(frozen=True)
class PointStructure:
    label: str
    local_order: int
    divisors: tuple[str, ...]
    multiplicity: int


def orbifold_structure(x: OrbifoldSurface) -> tuple[PointStructure, ...]:
    """Multiplicity d(x) * prod m_i of each singular point over the divisors through it."""
    out = []
    for point in x.singular_points:
        through = tuple(n for n in point.incident if x.isotropy_of(n) is not None)
        mult = point.singularity.m * math.prod(x.isotropy_of(n).multiplicity for n in through)
        out.append(PointStructure(point.label, point.singularity.m, through, mult))
    return tuple(out)


def branch_divisor(x: OrbifoldSurface) -> tuple[Fraction, ...]:
    """Ambient rational vector of sum (1 - 1/m_i) D_i."""
    out = [Fraction(0)] * x.resolution.rank
    for d in x.isotropy:
        coeff = 1 - Fraction(1, d.multiplicity)
        v = x.curve(d.divisor).vector
        out = [a + coeff * b for a, b in zip(out, v, strict=True)]
    return tuple(out)


def is_calabi_yau(x: OrbifoldSurface) -> bool:
    """True iff K + Delta pairs to zero with every surviving basis class."""
    k_plus_delta = [a + b for a, b in zip(x.resolution.canonical, branch_divisor(x), strict=True)]
    return all(x.pairing(k_plus_delta, x.basis_vector(i)) == 0 for i in x.surviving_basis)


def orbifold_signature(x: OrbifoldSurface) -> tuple[int, int]:
    sig = signature(x.gram_q)
    return sig.positive, sig.negative


def resolution_basis(x: OrbifoldSurface) -> tuple[tuple[int, ...], ...]:
    """Integral classes completing the contracted curves, followed by the contracted curves.

    The complement comes from the Smith form `u @ C @ v = D` of the contracted
    classes C: the last rows of `v^-1`. When the contracted span is saturated the
    whole family is a basis of the smooth lattice.
    """
    n = x.resolution.rank
    if not x.contracted_vectors:
        return tuple(x.basis_vector(i) for i in range(n))
    k = len(x.contracted_vectors)
    v_inv = invert(snf(IntMatrix(x.contracted_vectors)).v)
    complement = [tuple(int(e) for e in v_inv.row(i)) for i in range(k, n)]
    return (*complement, *x.contracted_vectors)


def resolution_gram(x: OrbifoldSurface) -> RatMatrix:
    """Rebuild the integral form of the resolution from the orbifold data.

    Basis as in `resolution_basis`. Complement classes pair through the rational
    form plus the correction `U^T M^-1 U`, cross terms are the incidences U, and
    each singular point's block is the chain Gram of `hj_expand(m, r)`. Curves
    removed by `blow_down` keep their smooth pairings.
    """
    basis = resolution_basis(x)
    k = len(x.contracted_vectors)
    complement = basis[: len(basis) - k]
    size = len(basis)
    out: list[list[Rational]] = [[Fraction(0)] * size for _ in range(size)]

    incidence = [x._incidence(w) for w in complement]
    correction = x._correction
    for i, w in enumerate(complement):
        for j, z in enumerate(complement):
            value = x.pairing(w, z)
            if correction is not None:
                value += sum(
                    (incidence[i][a] * correction[a, b] * incidence[j][b] for a in range(k) for b in range(k)),
                    Fraction(0),
                )
            out[i][j] = value
        for a in range(k):
            out[i][len(complement) + a] = out[len(complement) + a][i] = incidence[i][a]

    offset = len(complement)
    for a in range(k):
        for b in range(k):
            out[offset + a][offset + b] = x.resolution.pair(x.contracted_vectors[a], x.contracted_vectors[b])
    for point in x.singular_points:
        where = [offset + x.contracted.index(name) for name in point.chain]
        block = chain_gram(hj_expand(point.singularity))
        for a, row in enumerate(where):
            for b, col in enumerate(where):
                out[row][col] = block[a, b]
    return RatMatrix(out) if size else RatMatrix.zeros(0, 0)

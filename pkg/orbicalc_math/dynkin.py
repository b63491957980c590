"""ADE configurations of (-2)-curves on elliptic K3 surfaces.

eu(A_l) = l + 1, eu(D_m) = m + 2, eu(E_n) = n + 2 and eu is additive. For a
configuration Gamma taken from the reducible fibers of an elliptic fibration:

- (Z1): at most one fiber has every multiplicity-one component inside Gamma
- (Z2): eu(Gamma) <= 23
"""

from __future__ import annotations

import re
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from orbicalc_math.errors import InvalidValue
from orbicalc_math.lattice import IntMatrix, det

EU_BOUND = 23
K3_RANK = 22
HYPERBOLIC_RANK = 2

# Multiplicities of the exceptional-type Kodaira fibers, in Theta order.
_STAR_FIBERS: dict[str, tuple[tuple[int, ...], str, int]] = {
    "II*": ((1, 2, 3, 4, 5, 6, 4, 2, 3), "E", 8),
    "III*": ((1, 2, 3, 4, 3, 2, 1, 2), "E", 7),
    "IV*": ((1, 2, 3, 2, 1, 2, 1), "E", 6),
}


@dataclass(frozen=True, order=True)
class DynkinComponent:
    kind: str
    rank: int

    def __post_init__(self) -> None:
        ok = (
            (self.kind == "A" and self.rank >= 1)
            or (self.kind == "D" and self.rank >= 4)
            or (self.kind == "E" and self.rank in (6, 7, 8))
        )
        if not ok:
            raise InvalidValue(f"no Dynkin diagram {self.kind}{self.rank}")

    @property
    def eu(self) -> int:
        return self.rank + 1 if self.kind == "A" else self.rank + 2

    def edges(self) -> list[tuple[int, int]]:
        n = self.rank
        if self.kind == "A":
            return [(i, i + 1) for i in range(n - 1)]
        if self.kind == "D":
            # path 0..n-2 with the extra node n-1 hanging off n-3
            return [(i, i + 1) for i in range(n - 2)] + [(n - 3, n - 1)]
        # E_n: path 0..n-2 with node n-1 attached to node 2
        return [(i, i + 1) for i in range(n - 2)] + [(2, n - 1)]

    def __str__(self) -> str:
        return f"{self.kind}{self.rank}"


@dataclass(frozen=True)
class DynkinConfiguration:
    components: tuple[DynkinComponent, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", tuple(sorted(self.components)))

    @classmethod
    def parse(cls, text: str) -> DynkinConfiguration:
        """`E8+E8+D4`, `A19`, `2A1+E6`; an empty string is the empty configuration."""
        comps: list[DynkinComponent] = []
        for term in (t.strip() for t in text.split("+")):
            if not term:
                continue
            match = re.fullmatch(r"(\d*)\s*([ADE])_?(\d+)", term)
            if match is None:
                raise InvalidValue(f"cannot parse Dynkin component {term!r}")
            times = int(match.group(1) or 1)
            comps.extend([DynkinComponent(match.group(2), int(match.group(3)))] * times)
        return cls(tuple(comps))

    def __add__(self, other: DynkinConfiguration) -> DynkinConfiguration:
        return DynkinConfiguration(self.components + other.components)

    @property
    def rank(self) -> int:
        return sum(c.rank for c in self.components)

    def counts(self) -> dict[str, int]:
        """a_l, d_m, e_n keyed by component label."""
        return dict(Counter(str(c) for c in self.components))

    def __str__(self) -> str:
        return "+".join(str(c) for c in self.components) or "0"


def eu(config: DynkinConfiguration) -> int:
    return sum(c.eu for c in config.components)


def check_z2(config: DynkinConfiguration) -> bool:
    return eu(config) <= EU_BOUND


def cartan_gram(config: DynkinConfiguration) -> IntMatrix:
    """Negative definite Gram matrix of the root lattice (-2 on the diagonal)."""
    n = config.rank
    rows = [[0] * n for _ in range(n)]
    offset = 0
    for c in config.components:
        for i in range(c.rank):
            rows[offset + i][offset + i] = -2
        for i, j in c.edges():
            rows[offset + i][offset + j] = rows[offset + j][offset + i] = 1
        offset += c.rank
    return IntMatrix(rows) if n else IntMatrix.zeros(0, 0)


def discriminant(component: DynkinComponent) -> int:
    """|det| of the root lattice: l+1, 4, 3, 2, 1 for A_l, D_m, E6, E7, E8."""
    if component.kind == "A":
        return component.rank + 1
    if component.kind == "D":
        return 4
    return 9 - component.rank


def cartan_det_matches(config: DynkinConfiguration) -> bool:
    expected = 1
    for c in config.components:
        expected *= discriminant(c)
    return abs(det(cartan_gram(config))) == expected


def validate_ambient_rank(config: DynkinConfiguration, ambient: int = K3_RANK) -> None:
    """Gamma sits in the orthogonal complement of the hyperbolic plane spanned by fiber and section."""
    limit = ambient - HYPERBOLIC_RANK
    if config.rank > limit:
        raise InvalidValue(f"configuration {config} has rank {config.rank} > {limit}")


@dataclass(frozen=True)
class FiberComponent:
    name: str
    multiplicity: int
    included: bool = True

    def __post_init__(self) -> None:
        if self.multiplicity < 1:
            raise InvalidValue(f"component {self.name} has multiplicity {self.multiplicity}")


@dataclass(frozen=True)
class FiberData:
    kodaira_type: str
    components: tuple[FiberComponent, ...]

    @classmethod
    def from_kodaira(cls, kodaira_type: str, omitted: Iterable[str] = ()) -> FiberData:
        """Components Theta0, Theta1, ... of a Kodaira fiber, all included except `omitted`."""
        kind = kodaira_type.strip()
        mults = kodaira_multiplicities(kind)
        names = [f"Theta{i}" for i in range(len(mults))]
        omitted = set(omitted)
        unknown = omitted - set(names)
        if unknown:
            raise InvalidValue(f"fiber {kind} has no components {sorted(unknown)}")
        return cls(
            kind,
            tuple(FiberComponent(n, m, n not in omitted) for n, m in zip(names, mults, strict=True)),
        )

    @property
    def fully_included(self) -> bool:
        """Every multiplicity-one component lies in the configuration."""
        return all(c.included for c in self.components if c.multiplicity == 1)


def kodaira_multiplicities(kind: str) -> tuple[int, ...]:
    if kind in _STAR_FIBERS:
        return _STAR_FIBERS[kind][0]
    if kind == "II":
        return (1,)
    if kind == "III":
        return (1, 1)
    if kind == "IV":
        return (1, 1, 1)
    match = re.fullmatch(r"I(\d+)(\*?)", kind)
    if match is None:
        raise InvalidValue(f"unknown Kodaira fiber type {kind!r}")
    n, star = int(match.group(1)), bool(match.group(2))
    if star:
        return (1, 1, 1, 1) + (2,) * (n + 1)
    if n < 1:
        raise InvalidValue("I_0 is a smooth fiber")
    return (1,) * n


def kodaira_root_type(kind: str) -> DynkinComponent | None:
    """Root lattice spanned by the components missing the zero section; None if irreducible."""
    if kind in _STAR_FIBERS:
        _, letter, rank = _STAR_FIBERS[kind]
        return DynkinComponent(letter, rank)
    if kind == "III":
        return DynkinComponent("A", 1)
    if kind == "IV":
        return DynkinComponent("A", 2)
    if kind == "II":
        return None
    mults = kodaira_multiplicities(kind)
    if kind.endswith("*"):
        return DynkinComponent("D", len(mults) - 1)
    return DynkinComponent("A", len(mults) - 1) if len(mults) > 1 else None


@dataclass(frozen=True)
class Z1Verdict:
    count: int

    @property
    def holds(self) -> bool:
        return self.count <= 1


def check_z1(fibers: Sequence[FiberData]) -> Z1Verdict:
    return Z1Verdict(sum(1 for f in fibers if f.fully_included))

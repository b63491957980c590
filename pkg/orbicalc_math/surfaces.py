"""Smooth surfaces as intersection lattices.

A `SurfaceModel` is the Gram matrix of H^2 on a labelled basis, the canonical
class in that basis and a set of named curve classes. Every operation returns a
new model.

Hirzebruch surfaces come in two conventions:
- `Convention.NEGATIVE`: basis (sigma, f) with sigma^2 = -n, K = -2 sigma - (n+2) f
- `Convention.POSITIVE`: basis (sigma, f) with sigma^2 = +n, K = -2 sigma + (n-2) f
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction

try:
    from enum import StrEnum
except ImportError:  # Python < 3.11

    class StrEnum(str, Enum):
        __str__ = str.__str__
        __format__ = str.__format__


from orbicalc_math.errors import (
    InvalidIncidence,
    InvalidValue,
    NonIntegralGenus,
    NonRepresentable,
    UndefinedCase,
)
from orbicalc_math.lattice import IntMatrix, as_vector, det, pair, signature


class Convention(StrEnum):
    NEGATIVE = "negative"
    POSITIVE = "positive"
    NONE = "none"


@dataclass(frozen=True)
class CurveClass:
    name: str
    vector: tuple[int, ...]
    genus: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "vector", as_vector(self.vector))
        if self.genus < 0:
            raise InvalidValue(f"curve {self.name} would have negative genus {self.genus}")


@dataclass(frozen=True)
class PointSpec:
    """Where a blow-up happens: the curves through the point.

    `infinitely_near` puts the point on the most recent exceptional curve, which
    is then added to `through` automatically.
    """

    through: tuple[str, ...] = ()
    infinitely_near: bool = False


@dataclass(frozen=True, eq=False)
class SurfaceModel:
    gram: IntMatrix
    canonical: tuple[int, ...]
    basis_labels: tuple[str, ...]
    curves: tuple[CurveClass, ...] = ()
    convention: Convention = Convention.NONE
    exceptionals: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        n = self.gram.rows
        if not self.gram.is_symmetric():
            raise InvalidValue("intersection form must be symmetric")
        if len(self.canonical) != n or len(self.basis_labels) != n:
            raise InvalidValue("canonical class and basis labels must match the lattice rank")
        if len(set(self.basis_labels)) != n:
            raise InvalidValue("basis labels must be unique")
        names = [c.name for c in self.curves]
        if len(set(names)) != len(names):
            raise InvalidValue("curve names must be unique")
        object.__setattr__(self, "canonical", as_vector(self.canonical))

    @property
    def rank(self) -> int:
        return self.gram.rows

    def pair(self, u: Sequence[int | Fraction], v: Sequence[int | Fraction]) -> int | Fraction:
        return pair(u, self.gram, v)

    def square(self, v: Sequence[int | Fraction]) -> int | Fraction:
        return self.pair(v, v)

    def k_dot(self, v: Sequence[int | Fraction]) -> int | Fraction:
        return self.pair(self.canonical, v)

    @property
    def k_squared(self) -> int:
        return self.square(self.canonical)

    def has_curve(self, name: str) -> bool:
        return any(c.name == name for c in self.curves)

    def curve(self, name: str) -> CurveClass:
        for c in self.curves:
            if c.name == name:
                return c
        raise InvalidIncidence(f"unknown curve {name!r}")

    def basis_vector(self, label: str) -> tuple[int, ...]:
        if label not in self.basis_labels:
            raise InvalidValue(f"unknown basis class {label!r}")
        idx = self.basis_labels.index(label)
        return tuple(int(i == idx) for i in range(self.rank))

    def describe(self) -> dict[str, object]:
        sig = signature(self.gram)
        return {
            "rank": self.rank,
            "det": det(self.gram),
            "signature": (sig.positive, sig.negative),
            "k_squared": self.k_squared,
        }


def make_projective_plane() -> SurfaceModel:
    return SurfaceModel(gram=IntMatrix([[1]]), canonical=(-3,), basis_labels=("H",))


def make_hirzebruch(n: int, convention: Convention | str = Convention.NEGATIVE) -> SurfaceModel:
    """Hirzebruch surface H_n on the basis (sigma, f).

    The negative convention also names the positive section `sigma_positive`
    (= sigma + n f); the positive one names `sigma_infinity` (= sigma - n f).
    """
    convention = Convention(convention)
    if n < 0:
        raise InvalidValue(f"Hirzebruch index must be >= 0, got {n}")
    if convention is Convention.NONE:
        raise InvalidValue("a Hirzebruch surface needs the negative or positive convention")

    if convention is Convention.NEGATIVE:
        gram = IntMatrix([[-n, 1], [1, 0]])
        canonical = (-2, -(n + 2))
        extra = ("sigma_positive", (1, n))
    else:
        gram = IntMatrix([[n, 1], [1, 0]])
        canonical = (-2, n - 2)
        extra = ("sigma_infinity", (1, -n))

    s = SurfaceModel(
        gram=gram,
        canonical=canonical,
        basis_labels=("sigma", "f"),
        convention=convention,
    )
    s = add_curve(s, "sigma", (1, 0), 0)
    s = add_curve(s, "f", (0, 1), 0)
    if n > 0:
        s = add_curve(s, extra[0], extra[1], 0)
    return s


def adjunction_genus(s: SurfaceModel, v: Sequence[int]) -> int:
    """1 + (v^2 + K.v) / 2.

    Negative values are returned (and logged): such a class is not a smooth
    connected curve.
    """
    v = as_vector(v)
    if len(v) != s.rank:
        raise InvalidValue(f"class of length {len(v)} on a rank {s.rank} surface")
    if not any(v):
        raise NonRepresentable("the zero class is not a curve")
    total = s.square(v) + s.k_dot(v)
    if total % 2:
        raise NonIntegralGenus(f"v^2 + K.v = {total} is odd for v = {v}")
    genus = 1 + total // 2
    if genus < 0:
        logging.warning(f"Class {v} has negative adjunction genus {genus}")
    return genus


def add_curve(
    s: SurfaceModel, name: str, vector: Sequence[int], genus: int | None = None
) -> SurfaceModel:
    """Store a named curve; a declared genus must agree with adjunction."""
    if s.has_curve(name):
        raise InvalidValue(f"curve {name!r} already exists")
    computed = adjunction_genus(s, vector)
    if genus is not None and genus != computed:
        raise InvalidValue(f"curve {name!r}: declared genus {genus}, adjunction gives {computed}")
    return replace(s, curves=(*s.curves, CurveClass(name, tuple(vector), computed)))


def blow_up(s: SurfaceModel, point: PointSpec = PointSpec(), *, exceptional: str | None = None) -> SurfaceModel:
    """Blow up one point.

    The new basis class `e_<name>` is the total transform of the exceptional
    curve, which is stored as the curve `<name>` (square -1). Curves through the
    point become C - e and K becomes K + e.
    """
    name = exceptional or f"E{len(s.exceptionals) + 1}"
    through = list(point.through)
    if point.infinitely_near:
        if not s.exceptionals:
            raise InvalidIncidence("no previous exceptional curve for an infinitely near point")
        if s.exceptionals[-1] not in through:
            through.append(s.exceptionals[-1])
    for c in through:
        if not s.has_curve(c):
            raise InvalidIncidence(f"blow-up through unknown curve {c!r}")
    if s.has_curve(name):
        raise InvalidValue(f"curve {name!r} already exists")
    label = f"e_{name}"
    if label in s.basis_labels:
        raise InvalidValue(f"basis class {label!r} already exists")

    n = s.rank
    rows = [list(r) + [0] for r in s.gram.to_lists()]
    rows.append([0] * n + [-1])

    incident = set(through)
    curves = tuple(
        CurveClass(c.name, (*c.vector, -1 if c.name in incident else 0), c.genus)
        for c in s.curves
    )
    new_curve = CurveClass(name, (0,) * n + (1,), 0)

    logging.info(f"Blow-up {name} through {sorted(incident)}")
    return SurfaceModel(
        gram=IntMatrix(rows),
        canonical=(*s.canonical, 1),
        basis_labels=(*s.basis_labels, label),
        curves=(*curves, new_curve),
        convention=s.convention,
        exceptionals=(*s.exceptionals, name),
    )


def blow_up_sequence(
    s: SurfaceModel,
    names: Sequence[str],
    *,
    through: Sequence[str] = (),
    through_each: Sequence[Sequence[str]] | None = None,
    infinitely_near: bool = False,
) -> SurfaceModel:
    """Blow up once per name.

    With `infinitely_near`, every blow-up after the first lies on the exceptional
    curve created just before it.
    """
    if through_each is not None and len(through_each) != len(names):
        raise InvalidValue("through_each needs one entry per blow-up")
    for k, name in enumerate(names):
        extra = tuple(through_each[k]) if through_each is not None else ()
        point = PointSpec(through=(*through, *extra), infinitely_near=infinitely_near and k > 0)
        s = blow_up(s, point, exceptional=name)
    return s


def plane_curve_genus(d: int) -> int:
    if d < 1:
        raise InvalidValue(f"degree must be positive, got {d}")
    return (d - 1) * (d - 2) // 2


def pencil_base_multiplicity(d: int) -> int:
    """Two degree-d curves meeting at one point meet there with multiplicity d^2."""
    return d * d


def multiplication_degree(k: int) -> int:
    """Degree of multiplication by k on an elliptic curve, i.e. the number of preimages of a point."""
    if k == 0:
        raise InvalidValue("multiplication by 0 has no finite degree")
    return k * k


def _sign(x: int | Fraction | str) -> int:
    if isinstance(x, str):
        key = x.strip().lower()
        table = {"negative": -1, "-": -1, "zero": 0, "0": 0, "positive": 1, "+": 1}
        if key not in table:
            raise InvalidValue(f"unknown sign {x!r}")
        return table[key]
    return (x > 0) - (x < 0)


def kodaira_dimension(k_dot_omega: int | Fraction | str, k_squared: int | Fraction | str) -> float | int:
    """Kodaira dimension of a symplectic 4-manifold from the signs of K.[w] and K^2.

    Returns -inf, 0, 1 or 2; K.[w] = 0 with K^2 > 0 is not covered and raises.
    """
    kw, kk = _sign(k_dot_omega), _sign(k_squared)
    if kw < 0 or kk < 0:
        return -math.inf
    table = {(0, 0): 0, (1, 0): 1, (1, 1): 2}
    if (kw, kk) not in table:
        raise UndefinedCase(f"no Kodaira dimension for K.[w] sign {kw}, K^2 sign {kk}")
    return table[(kw, kk)]

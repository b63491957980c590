"""Hirzebruch-Jung continued fractions for cyclic quotient singularities.

C^2 / Z_m acting by (z1, z2) -> (xi z1, xi^r z2) resolves into a chain of
rational curves with self-intersections -b_1, ..., -b_l where

    m / r = b_1 - 1 / (b_2 - 1 / (... - 1 / b_l))
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from orbicalc_math.errors import ChainDivisionByZero, InvalidValue
from orbicalc_math.lattice import IntMatrix


@dataclass(frozen=True, order=True)
class CyclicSingularity:
    m: int
    r: int

    def __post_init__(self) -> None:
        if not 0 < self.r < self.m:
            raise InvalidValue(f"need 0 < r < m, got (m, r) = ({self.m}, {self.r})")
        if math.gcd(self.m, self.r) != 1:
            raise InvalidValue(f"gcd(m, r) must be 1, got ({self.m}, {self.r})")

    @property
    def label(self) -> str:
        return singularity_label(self)

    def as_tuple(self) -> tuple[int, int]:
        return (self.m, self.r)

    def __str__(self) -> str:
        return f"({self.m}, {self.r})"


@dataclass(frozen=True)
class HJChain:
    b: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "b", tuple(int(x) for x in self.b))
        if not self.b:
            raise InvalidValue("a resolution chain has at least one curve")
        if any(x < 2 for x in self.b):
            raise InvalidValue(f"chain entries must be >= 2, got {list(self.b)}")

    def __len__(self) -> int:
        return len(self.b)

    def __iter__(self):
        return iter(self.b)

    def __str__(self) -> str:
        return "[" + ", ".join(str(x) for x in self.b) + "]"


def hj_expand(s: CyclicSingularity) -> HJChain:
    """m/r as the unique continued fraction with every entry >= 2."""
    out: list[int] = []
    prev, cur = s.m, s.r
    while cur:
        b = -(-prev // cur)
        out.append(b)
        prev, cur = cur, b * cur - prev
    return HJChain(tuple(out))


def hj_eval(chain: HJChain | Sequence[int], *, relaxed: bool = False) -> Fraction:
    """Evaluate b_1 - 1/(b_2 - ...) exactly.

    Strict mode needs every entry >= 2. `relaxed=True` accepts entries >= 1 (used
    to audit degenerate chains such as [1, 2, ..., 2]); a zero tail then raises
    ChainDivisionByZero.
    """
    entries = tuple(chain.b if isinstance(chain, HJChain) else chain)
    if not entries:
        raise InvalidValue("cannot evaluate an empty chain")
    floor = 1 if relaxed else 2
    if any(x < floor for x in entries):
        raise InvalidValue(f"chain entries must be >= {floor}, got {list(entries)}")

    value = Fraction(entries[-1])
    for pos in range(len(entries) - 2, -1, -1):
        if value == 0:
            raise ChainDivisionByZero(
                f"tail of {list(entries)} starting at position {pos + 2} evaluates to 0"
            )
        value = entries[pos] - 1 / value
    return value


def hj_dual(s: CyclicSingularity) -> HJChain:
    """Chain of m/(m-r); its length generally differs from hj_expand(s)."""
    return hj_expand(CyclicSingularity(s.m, s.m - s.r))


def chain_recognize(chain: HJChain | Sequence[int]) -> CyclicSingularity:
    c = chain if isinstance(chain, HJChain) else HJChain(tuple(chain))
    value = hj_eval(c)
    return CyclicSingularity(value.numerator, value.denominator)


def singularity_label(s: CyclicSingularity) -> str:
    if s.r == s.m - 1:
        return f"A_{s.m - 1}"
    return f"1/{s.m}(1,{s.r})"


def chain_gram(chain: HJChain | Sequence[int]) -> IntMatrix:
    """Intersection matrix of the resolution chain: -b_i on the diagonal, 1 between neighbours."""
    b = tuple(chain.b if isinstance(chain, HJChain) else chain)
    n = len(b)
    return IntMatrix(
        [[-b[i] if i == j else int(abs(i - j) == 1) for j in range(n)] for i in range(n)]
    )

"""Exact integer / rational linear algebra.

Matrices are immutable numpy object arrays holding Python `int` (IntMatrix) or
`fractions.Fraction` (RatMatrix) entries, so products never overflow and never
round. Everything else in `orbicalc_math` builds on the helpers here:

- `snf` / `hnf`: Smith and Hermite normal forms with unimodular witnesses
- `invert`, `det`, `rank`, `signature`: exact linear algebra over the rationals
- `rank_mod_p`: rank over the prime field F_p
- `is_primitive`: gcd test of a class against a pairing
"""

from __future__ import annotations

import math
import operator
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, NamedTuple

import numpy as np
from sympy import isprime

from orbicalc_math.errors import InvalidValue, NotPrime, SingularMatrix, ZeroVector

Number = int | Fraction


@dataclass(frozen=True, eq=False)
class _ExactMatrix:
    entries: Any

    def __post_init__(self) -> None:
        if isinstance(self.entries, np.ndarray) and self.entries.ndim == 2:
            rows = [list(r) for r in self.entries]
            n_cols = self.entries.shape[1]
        else:
            rows = [list(r) for r in self.entries]
            n_cols = len(rows[0]) if rows else 0
        if any(len(r) != n_cols for r in rows):
            raise InvalidValue("matrix rows must all have the same length")

        arr = np.empty((len(rows), n_cols), dtype=object)
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                arr[i, j] = self._coerce(x)
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @staticmethod
    def _coerce(x: Any) -> Number:
        raise NotImplementedError

    # --- constructors -------------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int):
        arr = np.empty((rows, cols), dtype=object)
        arr.fill(0)
        return cls(arr)

    @classmethod
    def identity(cls, n: int):
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, values: Sequence[Number], rows: int | None = None, cols: int | None = None):
        rows = len(values) if rows is None else rows
        cols = len(values) if cols is None else cols
        out = [[0] * cols for _ in range(rows)]
        for k, x in enumerate(values):
            out[k][k] = x
        arr = np.empty((rows, cols), dtype=object)
        for i in range(rows):
            for j in range(cols):
                arr[i, j] = out[i][j]
        return cls(arr)

    # --- accessors ----------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, idx):
        return self.entries[idx]

    def row(self, i: int) -> tuple[Number, ...]:
        return tuple(self.entries[i, :])

    def column(self, j: int) -> tuple[Number, ...]:
        return tuple(self.entries[:, j])

    def to_lists(self) -> list[list[Number]]:
        return [list(r) for r in self.entries]

    def transpose(self):
        return type(self)(self.entries.T)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]):
        return type(self)([[self.entries[i, j] for j in cols] for i in rows]) if rows else type(self).zeros(0, len(cols))

    def is_symmetric(self) -> bool:
        return self.is_square and bool(np.array_equal(self.entries, self.entries.T))

    def apply(self, v: Sequence[Number]) -> tuple[Number, ...]:
        """Matrix times column vector."""
        if len(v) != self.cols:
            raise InvalidValue(f"vector of length {len(v)} does not match {self.cols} columns")
        return tuple(sum((self.entries[i, j] * v[j] for j in range(self.cols)), 0) for i in range(self.rows))

    def __matmul__(self, other: _ExactMatrix) -> _ExactMatrix:
        if not isinstance(other, _ExactMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise InvalidValue(f"cannot multiply {self.shape} by {other.shape}")
        cls = RatMatrix if RatMatrix in (type(self), type(other)) else IntMatrix
        if self.cols == 0:
            return cls.zeros(self.rows, other.cols)
        return cls(self.entries @ other.entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, _ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.entries, other.entries))

    def __hash__(self) -> int:
        return hash((self.shape, tuple(self.entries.flat)))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in r) for r in self.entries)
        return f"{type(self).__name__}({self.rows}x{self.cols}: [{body}])"


class IntMatrix(_ExactMatrix):
    """Immutable arbitrary-precision integer matrix."""

    @staticmethod
    def _coerce(x: Any) -> int:
        if isinstance(x, bool):
            raise InvalidValue("booleans are not matrix entries")
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise InvalidValue(f"non-integral entry {x}")
            return x.numerator
        try:
            return operator.index(x)
        except TypeError as e:
            raise InvalidValue(f"non-integral entry {x!r}") from e


class RatMatrix(_ExactMatrix):
    """Immutable rational matrix; entries are `Fraction`s in lowest terms."""

    @staticmethod
    def _coerce(x: Any) -> Fraction:
        if isinstance(x, bool | float):
            raise InvalidValue(f"inexact entry {x!r}")
        if isinstance(x, Fraction):
            return x
        try:
            return Fraction(operator.index(x))
        except TypeError:
            return Fraction(x)


class SnfResult(NamedTuple):
    d: tuple[int, ...]
    u: IntMatrix
    v: IntMatrix


class HnfResult(NamedTuple):
    h: IntMatrix
    u: IntMatrix


class Signature(NamedTuple):
    positive: int
    negative: int
    zero: int


# --- elementary operations on list-of-lists ----------------------------------


def _identity_lists(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _swap_rows(m: list[list[Number]], i: int, j: int) -> None:
    if i != j:
        m[i], m[j] = m[j], m[i]


def _swap_cols(m: list[list[Number]], i: int, j: int) -> None:
    if i != j:
        for row in m:
            row[i], row[j] = row[j], row[i]


def _add_row(m: list[list[Number]], target: int, source: int, factor: Number) -> None:
    """row[target] += factor * row[source]"""
    src = m[source]
    m[target] = [a + factor * b for a, b in zip(m[target], src, strict=True)]


def _add_col(m: list[list[Number]], target: int, source: int, factor: Number) -> None:
    for row in m:
        row[target] += factor * row[source]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with x*a + y*b = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


# --- normal forms -------------------------------------------------------------


def _smallest_entry(work: list[list[int]], t: int) -> tuple[int, int] | None:
    best: tuple[int, int, int] | None = None
    for i in range(t, len(work)):
        for j in range(t, len(work[i])):
            x = work[i][j]
            if x and (best is None or abs(x) < best[0]):
                best = (abs(x), i, j)
    return None if best is None else (best[1], best[2])


def _first_non_multiple(work: list[list[int]], t: int, p: int) -> int | None:
    for i in range(t + 1, len(work)):
        for j in range(t + 1, len(work[i])):
            if work[i][j] % p:
                return i
    return None


def snf(a: IntMatrix) -> SnfResult:
    """Smith normal form `u @ a @ v == diag(d)` with `d[i] | d[i+1]`.

    Pivot: smallest nonzero absolute value in the remaining block, ties broken
    by lowest (row, column) index, so the factors are reproducible.
    """
    m, n = a.shape
    work = a.to_lists()
    left = _identity_lists(m)
    right = _identity_lists(n)

    t = 0
    while t < min(m, n):
        pivot = _smallest_entry(work, t)
        if pivot is None:
            break
        i, j = pivot
        _swap_rows(work, t, i)
        _swap_rows(left, t, i)
        _swap_cols(work, t, j)
        _swap_cols(right, t, j)

        p = work[t][t]
        clean = True
        for i in range(t + 1, m):
            q = work[i][t] // p
            if q:
                _add_row(work, i, t, -q)
                _add_row(left, i, t, -q)
            clean = clean and work[i][t] == 0
        for j in range(t + 1, n):
            q = work[t][j] // p
            if q:
                _add_col(work, j, t, -q)
                _add_col(right, j, t, -q)
            clean = clean and work[t][j] == 0
        if not clean:
            continue

        bad = _first_non_multiple(work, t, p)
        if bad is not None:
            _add_row(work, t, bad, 1)
            _add_row(left, t, bad, 1)
            continue

        if p < 0:
            work[t] = [-x for x in work[t]]
            left[t] = [-x for x in left[t]]
        t += 1

    d = tuple(work[k][k] for k in range(min(m, n)))
    return SnfResult(d=d, u=IntMatrix(left) if m else IntMatrix.zeros(0, 0), v=IntMatrix(right) if n else IntMatrix.zeros(0, 0))


def hnf(a: IntMatrix) -> HnfResult:
    """Row-style Hermite normal form `u @ a == h`.

    Pivots are positive and every entry above a pivot lies in [0, pivot).
    """
    m, n = a.shape
    work = a.to_lists()
    left = _identity_lists(m)

    r = 0
    for col in range(n):
        if r == m:
            break
        for i in range(r + 1, m):
            if work[i][col] == 0:
                continue
            x, y = work[r][col], work[i][col]
            g, s, t = _xgcd(x, y)
            for mat in (work, left):
                top, bottom = mat[r], mat[i]
                mat[r] = [s * p + t * q for p, q in zip(top, bottom, strict=True)]
                mat[i] = [(-y // g) * p + (x // g) * q for p, q in zip(top, bottom, strict=True)]
        pivot = work[r][col]
        if pivot == 0:
            continue
        if pivot < 0:
            work[r] = [-x for x in work[r]]
            left[r] = [-x for x in left[r]]
            pivot = -pivot
        for k in range(r):
            q = work[k][col] // pivot
            if q:
                _add_row(work, k, r, -q)
                _add_row(left, k, r, -q)
        r += 1

    h = IntMatrix(work) if m else IntMatrix.zeros(0, n)
    return HnfResult(h=h, u=IntMatrix(left) if m else IntMatrix.zeros(0, 0))


def cokernel_invariants(a: IntMatrix) -> tuple[int, tuple[int, ...]]:
    """Free rank and nontrivial invariant factors of Z^rows / a Z^cols."""
    nonzero = [x for x in snf(a).d if x]
    return a.rows - len(nonzero), tuple(x for x in nonzero if x > 1)


# --- linear algebra over Q ------------------------------------------------------


def _fractions(a: _ExactMatrix) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in a.entries]


def det(a: _ExactMatrix) -> Number:
    """Exact determinant (fraction-free Bareiss for integer matrices)."""
    if not a.is_square:
        raise InvalidValue(f"determinant of non-square {a.shape} matrix")
    n = a.rows
    if n == 0:
        return 1
    if isinstance(a, RatMatrix):
        work = _fractions(a)
        result = Fraction(1)
        for k in range(n):
            pivot = next((i for i in range(k, n) if work[i][k]), None)
            if pivot is None:
                return Fraction(0)
            if pivot != k:
                _swap_rows(work, k, pivot)
                result = -result
            result *= work[k][k]
            for i in range(k + 1, n):
                f = work[i][k] / work[k][k]
                if f:
                    _add_row(work, i, k, -f)
        return result

    work = a.to_lists()
    sign, prev = 1, 1
    for k in range(n - 1):
        if work[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if work[i][k]), None)
            if swap is None:
                return 0
            _swap_rows(work, k, swap)
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                work[i][j] = (work[i][j] * work[k][k] - work[i][k] * work[k][j]) // prev
        prev = work[k][k]
    return sign * work[n - 1][n - 1]


def invert(g: _ExactMatrix) -> RatMatrix:
    """Exact inverse over Q; raises SingularMatrix when det(g) == 0."""
    if not g.is_square:
        raise InvalidValue(f"cannot invert non-square {g.shape} matrix")
    n = g.rows
    x = _fractions(g)
    y = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]

    for i in range(n):
        pivot = next((j for j in range(i, n) if x[j][i] != 0), None)
        if pivot is None:
            raise SingularMatrix(f"matrix {g!r} is not invertible")
        _swap_rows(x, i, pivot)
        _swap_rows(y, i, pivot)
        p = x[i][i]
        x[i] = [v / p for v in x[i]]
        y[i] = [v / p for v in y[i]]
        for j in range(n):
            if j != i and x[j][i] != 0:
                f = x[j][i]
                _add_row(y, j, i, -f)
                _add_row(x, j, i, -f)

    return RatMatrix(y) if n else RatMatrix.zeros(0, 0)


def rank(a: _ExactMatrix) -> int:
    work = _fractions(a)
    m, n = a.shape
    r = 0
    for col in range(n):
        pivot = next((i for i in range(r, m) if work[i][col] != 0), None)
        if pivot is None:
            continue
        _swap_rows(work, r, pivot)
        for i in range(r + 1, m):
            if work[i][col]:
                _add_row(work, i, r, -work[i][col] / work[r][col])
        r += 1
    return r


def rank_mod_p(a: IntMatrix, p: int) -> int:
    """Rank of `a` over the field with p elements."""
    if isinstance(p, bool) or not isinstance(p, int) or not isprime(p):
        raise NotPrime(f"{p!r} is not a prime")
    work = [[x % p for x in row] for row in a.entries]
    m, n = a.shape
    r = 0
    for col in range(n):
        pivot = next((i for i in range(r, m) if work[i][col]), None)
        if pivot is None:
            continue
        _swap_rows(work, r, pivot)
        inv = pow(work[r][col], -1, p)
        work[r] = [(x * inv) % p for x in work[r]]
        for i in range(m):
            if i != r and work[i][col]:
                f = work[i][col]
                work[i] = [(x - f * y) % p for x, y in zip(work[i], work[r], strict=True)]
        r += 1
    return r


def signature(g: _ExactMatrix) -> Signature:
    """Inertia of a symmetric matrix by congruence diagonalization over Q."""
    if not g.is_symmetric():
        raise InvalidValue("signature needs a symmetric matrix")
    work = _fractions(g)
    n = g.rows
    pos = neg = 0
    for k in range(n):
        if work[k][k] == 0:
            swap = next((j for j in range(k + 1, n) if work[j][j] != 0), None)
            if swap is not None:
                _swap_rows(work, k, swap)
                _swap_cols(work, k, swap)
            else:
                partner = next((j for j in range(k + 1, n) if work[k][j] != 0), None)
                if partner is None:
                    continue
                _add_row(work, k, partner, 1)
                _add_col(work, k, partner, 1)
        p = work[k][k]
        if p > 0:
            pos += 1
        else:
            neg += 1
        for i in range(k + 1, n):
            f = work[i][k] / p
            if f:
                _add_row(work, i, k, -f)
                _add_col(work, i, k, -f)
    return Signature(pos, neg, n - pos - neg)


def is_unimodular(g: IntMatrix) -> bool:
    return g.is_square and abs(det(g)) == 1


def is_even(g: IntMatrix) -> bool:
    return all(g[i, i] % 2 == 0 for i in range(g.rows))


# --- pairings -------------------------------------------------------------------


def pair(u: Sequence[Number], g: _ExactMatrix, v: Sequence[Number]) -> Number:
    """Bilinear form value u^T g v."""
    return sum((x * y for x, y in zip(u, g.apply(v), strict=True)), 0)


def is_primitive(v: Sequence[int], pairing: IntMatrix) -> bool:
    """True iff the pairings of `v` with every test class have gcd 1.

    `pairing` has one row per coordinate of `v` and one column per test class;
    with the identity pairing this is the gcd of the coordinates.
    """
    if pairing.rows != len(v):
        raise InvalidValue(f"vector of length {len(v)} against {pairing.rows}-row pairing")
    if not any(v):
        raise ZeroVector("the zero class is never primitive")
    values = pairing.transpose().apply(tuple(v))
    return math.gcd(*values) == 1 if values else False


def as_vector(values: Iterable[Any]) -> tuple[int, ...]:
    return tuple(IntMatrix._coerce(x) for x in values)

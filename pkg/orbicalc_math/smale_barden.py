"""Smale-Barden invariants of simply connected 5-manifolds.

From H_2(M) = Z^k + sum Z_{p^i}^{c(p^i)} this computes t(p) = #{i : c(p^i) > 0},
t(M) = max_p t(p) and c(M) = max c(p^i) / 2, then tests the G-K condition for
K-contact structures and the constraints for null Sasakian structures.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from orbicalc_math.errors import InvalidValue
from orbicalc_math.seifert import FgAbelianGroup

NULL_MIN_B2 = 2
NULL_MAX_B2 = 21


@dataclass(frozen=True)
class SmaleBardenInvariants:
    k: int
    c_table: tuple[tuple[tuple[int, int], int], ...]
    t_table: tuple[tuple[int, int], ...]
    t_max: int
    c_max: Fraction
    barden_i: int | float
    spin: bool
    warnings: tuple[str, ...] = ()

    def c(self, p: int, i: int) -> int:
        return dict(self.c_table).get((p, i), 0)

    def t(self, p: int) -> int:
        return dict(self.t_table).get(p, 0)

    @property
    def torsion_free(self) -> bool:
        return not self.c_table


def invariants_from_group(
    group: FgAbelianGroup, spin: bool, barden_i: int | float | None = None
) -> SmaleBardenInvariants:
    """Barden's i(M) defaults to 0 for spin and infinity otherwise."""
    if barden_i is None:
        barden_i = 0 if spin else math.inf
    if barden_i != math.inf and (not isinstance(barden_i, int) or barden_i < 0):
        raise InvalidValue(f"Barden invariant must be a non-negative integer or inf, got {barden_i!r}")

    table = group.prime_power_table()
    c_table = tuple(sorted(table.items()))
    t_by_prime: dict[int, int] = {}
    for (p, _i), count in c_table:
        if count > 0:
            t_by_prime[p] = t_by_prime.get(p, 0) + 1
    t_table = tuple(sorted(t_by_prime.items()))

    warnings: list[str] = []
    odd = [f"c({p}^{i})={c}" for (p, i), c in c_table if c % 2]
    if odd:
        msg = f"NonSeifertRealizable: odd torsion multiplicities {', '.join(odd)}"
        logging.warning(msg)
        warnings.append(msg)

    return SmaleBardenInvariants(
        k=group.free_rank,
        c_table=c_table,
        t_table=t_table,
        t_max=max(t_by_prime.values(), default=0),
        c_max=Fraction(max((c for _, c in c_table), default=0), 2),
        barden_i=barden_i,
        spin=spin,
        warnings=tuple(warnings),
    )


@dataclass(frozen=True)
class Verdict:
    holds: bool
    reasons: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()


def gk_condition(inv: SmaleBardenInvariants) -> Verdict:
    """t(p) <= k + 1 for every p, i(M) in {0, inf}, and t(2) <= k when M is not spin."""
    reasons = [f"t({p})={t} > k+1={inv.k + 1}" for p, t in inv.t_table if t > inv.k + 1]
    if inv.barden_i not in (0, math.inf):
        reasons.append(f"i(M)={inv.barden_i} is neither 0 nor inf")
    if not inv.spin and inv.t(2) > inv.k:
        reasons.append(f"non-spin with t(2)={inv.t(2)} > k={inv.k}")
    return Verdict(holds=not reasons, reasons=tuple(reasons))


def null_sasakian_constraints(inv: SmaleBardenInvariants) -> Verdict:
    reasons = []
    if not inv.torsion_free:
        reasons.append("H_2 has torsion")
    if not NULL_MIN_B2 <= inv.k <= NULL_MAX_B2:
        reasons.append(f"b2={inv.k} outside [{NULL_MIN_B2}, {NULL_MAX_B2}]")
    if not inv.spin:
        reasons.append("not spin")
    notes = []
    if not reasons:
        notes.append(f"realized by the connected sum of {inv.k} copies of S^2 x S^3")
        if inv.k == NULL_MAX_B2:
            notes.append("the null structure is regular")
    return Verdict(holds=not reasons, reasons=tuple(reasons), notes=tuple(notes))

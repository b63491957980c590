"""Exception hierarchy for the exact invariant calculus.

Everything derives from `OrbicalcError`, itself a `ValueError`, so callers that
only care about "bad input" can keep catching `ValueError`.
"""

from __future__ import annotations


class OrbicalcError(ValueError):
    """Base class for every error raised by `orbicalc_math`."""


class InvalidValue(OrbicalcError):
    """A value type was constructed with data violating its invariants."""


# exact-lattice
class SingularMatrix(OrbicalcError):
    pass


class ZeroVector(OrbicalcError):
    pass


class NotPrime(OrbicalcError):
    pass


# hirzebruch-jung
class ChainDivisionByZero(OrbicalcError, ZeroDivisionError):
    """A trailing sub-fraction of a relaxed chain evaluated to zero."""


# surface-calculus
class NonIntegralGenus(OrbicalcError):
    pass


class NonRepresentable(OrbicalcError):
    pass


class UndefinedCase(OrbicalcError):
    pass


class InvalidIncidence(OrbicalcError):
    pass


# orbifold
class NotAChain(OrbicalcError):
    pass


class NotNegativeDefinite(OrbicalcError):
    pass


class ChainTouchesSingularPoint(OrbicalcError):
    pass


class CoprimalityViolation(OrbicalcError):
    def __init__(self, first: str, second: str, m_first: int, m_second: int) -> None:
        self.pair = (first, second)
        super().__init__(
            f"divisors {first} (m={m_first}) and {second} (m={m_second}) intersect "
            "but their multiplicities are not coprime"
        )


class MultiplicityNotGreaterThanOne(OrbicalcError):
    pass


# seifert
class MissingPairingData(OrbicalcError):
    pass


class H1NotZero(OrbicalcError):
    pass

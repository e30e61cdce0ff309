"""Exact non-negative dyadic rationals of the form m / 2**n.

Every quantity in this package (masses of cylinder sets, stage values of
semi-measures, thresholds) is a non-negative dyadic rational, and every
operation on them is exact.  Floats never appear.

Canonical form: the numerator is odd unless the exponent is zero, and zero
is stored as ``0/2^0``.  Because construction always canonicalises,
structural equality coincides with numeric equality and instances are safe
to hash and to use as dict keys.

The text form is ``m/2^n`` (for example ``3/2^2`` for 3/4).  Bare integer
literals are accepted on input and rendered with exponent zero on output.
"""

from __future__ import annotations

import re
from functools import total_ordering

from .errors import ParseError

_LITERAL = re.compile(r"\A(\d+)(?:/2\^(\d+))?\Z")


@total_ordering
class Dyadic:
    __slots__ = ("numerator", "exponent")

    numerator: int
    exponent: int

    def __init__(self, numerator: int, exponent: int = 0):
        if not isinstance(numerator, int) or not isinstance(exponent, int):
            raise TypeError("numerator and exponent must be int")
        if numerator < 0:
            raise ValueError("dyadic values are non-negative")
        if exponent < 0:
            raise ValueError("exponent must be non-negative")
        if numerator == 0:
            exponent = 0
        else:
            # strip common factors of two: keep numerator odd or exponent zero
            trailing = (numerator & -numerator).bit_length() - 1
            shift = min(trailing, exponent)
            numerator >>= shift
            exponent -= shift
        object.__setattr__(self, "numerator", numerator)
        object.__setattr__(self, "exponent", exponent)

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("Dyadic is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def from_text(cls, text: str) -> "Dyadic":
        """Parse ``m/2^n`` or a bare integer literal.

        Anything else (negative signs, floats, non power-of-two
        denominators such as ``1/3``) raises ParseError.
        """
        m = _LITERAL.match(text.strip())
        if m is None:
            raise ParseError(f"not a dyadic literal: {text!r}")
        num = int(m.group(1))
        exp = int(m.group(2)) if m.group(2) is not None else 0
        return cls(num, exp)

    @classmethod
    def pow2(cls, k: int) -> "Dyadic":
        """2**k for any integer k (negative k gives 1/2^|k|)."""
        if k >= 0:
            return cls(1 << k, 0)
        return cls(1, -k)

    # -- arithmetic ----------------------------------------------------

    @staticmethod
    def _coerce(value) -> "Dyadic | None":
        if isinstance(value, Dyadic):
            return value
        if isinstance(value, int):
            return Dyadic(value)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        e = max(self.exponent, other.exponent)
        num = (self.numerator << (e - self.exponent)) + (
            other.numerator << (e - other.exponent)
        )
        return Dyadic(num, e)

    __radd__ = __add__

    def __sub__(self, other):
        """Partial: the result must stay non-negative."""
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        e = max(self.exponent, other.exponent)
        num = (self.numerator << (e - self.exponent)) - (
            other.numerator << (e - other.exponent)
        )
        if num < 0:
            raise ValueError(f"dyadic subtraction went negative: {self} - {other}")
        return Dyadic(num, e)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return Dyadic(self.numerator * other.numerator, self.exponent + other.exponent)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        return Dyadic(self.numerator**k, self.exponent * k)

    def scaled(self, k: int) -> "Dyadic":
        """self * 2**k, exact for either sign of k."""
        return self * Dyadic.pow2(k)

    # -- comparison ----------------------------------------------------

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.numerator == other.numerator and self.exponent == other.exponent

    def __lt__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        e = max(self.exponent, other.exponent)
        return (self.numerator << (e - self.exponent)) < (
            other.numerator << (e - other.exponent)
        )

    def __hash__(self):
        return hash((self.numerator, self.exponent))

    def __bool__(self):
        return self.numerator != 0

    @property
    def is_zero(self) -> bool:
        return self.numerator == 0

    # -- text ------------------------------------------------------------

    def __str__(self):
        return f"{self.numerator}/2^{self.exponent}"

    def __repr__(self):
        return f"Dyadic('{self}')"


ZERO = Dyadic(0)
ONE = Dyadic(1)
HALF = Dyadic(1, 1)


def expansion_bits(value: Dyadic, n: int) -> str:
    """First n digits of the binary expansion of ``value`` in [0, 1).

    Dyadics have a finite expansion; past it the digits are zero.  (The
    all-ones alternative expansion is never used.)
    """
    if not ZERO <= value or not value < ONE:
        raise ValueError("expansion requires a value in [0, 1)")
    if n < 0:
        raise ValueError("digit count must be non-negative")
    if n == 0:
        return ""
    if n >= value.exponent:
        digits = format(value.numerator, f"0{value.exponent}b") if value.numerator else ""
        return digits.rjust(value.exponent, "0") + "0" * (n - value.exponent)
    # truncate: shift out the digits beyond position n
    kept = value.numerator >> (value.exponent - n)
    return format(kept, f"0{n}b")

"""Guaranteed-precision real numbers as dyadic intervals.

A :class:`Real` stores two integers ``lo <= hi`` and a precision ``prec``;
the represented number is known to lie in ``[lo / 2**prec, hi / 2**prec]``.
Every operation rounds outward, so the enclosure is always valid.  Floors
and comparisons that cannot be decided from the enclosure raise
:class:`~qnrlab.errors.PrecisionError` instead of guessing.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional, Union

from .errors import DomainError, PrecisionError

DEFAULT_PREC = 192
MIN_PREC = 192

#: Values closer than this to a decision boundary are treated as
#: indeterminate when the enclosure is not exact.
GUARD = Fraction(1, 2**64)

Number = Union[int, Fraction, "Real"]


def _ceil_shift(x: int, k: int) -> int:
    return -((-x) >> k)


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


class Real:
    """Closed dyadic interval ``[lo, hi] / 2**prec`` enclosing one real."""

    __slots__ = ("lo", "hi", "prec")

    def __init__(self, lo: int, hi: int, prec: int = DEFAULT_PREC):
        if lo > hi:
            raise ValueError("empty enclosure")
        self.lo = lo
        self.hi = hi
        self.prec = prec

    # -- construction -------------------------------------------------
    @classmethod
    def from_int(cls, k: int, prec: int = DEFAULT_PREC) -> "Real":
        v = k << prec
        return cls(v, v, prec)

    @classmethod
    def from_fraction(cls, f: Fraction, prec: int = DEFAULT_PREC) -> "Real":
        f = Fraction(f)
        num = f.numerator << prec
        return cls(num // f.denominator, _ceil_div(num, f.denominator), prec)

    @classmethod
    def coerce(cls, x: Number, prec: int = DEFAULT_PREC) -> "Real":
        if isinstance(x, Real):
            return x.with_prec(max(prec, x.prec)) if x.prec < prec else x
        if isinstance(x, int):
            return cls.from_int(x, prec)
        if isinstance(x, float):
            return cls.from_fraction(Fraction(x), prec)
        return cls.from_fraction(Fraction(x), prec)

    def with_prec(self, prec: int) -> "Real":
        if prec == self.prec:
            return self
        if prec > self.prec:
            k = prec - self.prec
            return Real(self.lo << k, self.hi << k, prec)
        k = self.prec - prec
        return Real(self.lo >> k, _ceil_shift(self.hi, k), prec)

    # -- inspection ---------------------------------------------------
    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    @property
    def lower(self) -> Fraction:
        return Fraction(self.lo, 1 << self.prec)

    @property
    def upper(self) -> Fraction:
        return Fraction(self.hi, 1 << self.prec)

    @property
    def width(self) -> Fraction:
        return Fraction(self.hi - self.lo, 1 << self.prec)

    def __float__(self) -> float:
        return float(Fraction(self.lo + self.hi, 2 << self.prec))

    def __repr__(self) -> str:
        return f"Real({float(self)!r} +- {float(self.width):.1e})"

    # -- arithmetic ---------------------------------------------------
    def _align(self, other: Number) -> tuple["Real", "Real"]:
        o = Real.coerce(other, self.prec)
        p = max(self.prec, o.prec)
        return self.with_prec(p), o.with_prec(p)

    def __add__(self, other: Number) -> "Real":
        a, b = self._align(other)
        return Real(a.lo + b.lo, a.hi + b.hi, a.prec)

    __radd__ = __add__

    def __neg__(self) -> "Real":
        return Real(-self.hi, -self.lo, self.prec)

    def __sub__(self, other: Number) -> "Real":
        a, b = self._align(other)
        return Real(a.lo - b.hi, a.hi - b.lo, a.prec)

    def __rsub__(self, other: Number) -> "Real":
        return (-self) + other

    def __mul__(self, other: Number) -> "Real":
        if isinstance(other, int):
            if other >= 0:
                return Real(self.lo * other, self.hi * other, self.prec)
            return Real(self.hi * other, self.lo * other, self.prec)
        a, b = self._align(other)
        prods = (a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi)
        p = a.prec
        return Real(min(prods) >> p, _ceil_shift(max(prods), p), p)

    __rmul__ = __mul__

    def reciprocal(self) -> "Real":
        if self.lo <= 0 <= self.hi:
            raise PrecisionError("enclosure contains zero; cannot invert")
        one = 1 << (2 * self.prec)
        if self.lo > 0:
            return Real(one // self.hi, _ceil_div(one, self.lo), self.prec)
        # negative interval
        return -((-self).reciprocal())

    def __truediv__(self, other: Number) -> "Real":
        if isinstance(other, int):
            if other == 0:
                raise ZeroDivisionError
            if other > 0:
                return Real(self.lo // other, _ceil_div(self.hi, other), self.prec)
            return (-self) / (-other)
        return self * Real.coerce(other, self.prec).reciprocal()

    def __rtruediv__(self, other: Number) -> "Real":
        return Real.coerce(other, self.prec) * self.reciprocal()

    # -- decisions ----------------------------------------------------
    def floor(self) -> int:
        """Exact floor, or PrecisionError if the enclosure straddles an integer."""
        f_lo = self.lo >> self.prec
        f_hi = self.hi >> self.prec
        if f_lo != f_hi:
            raise PrecisionError(f"floor undecided at {self.prec} bits")
        return f_lo

    def ceil(self) -> int:
        c_lo = _ceil_shift(self.lo, self.prec)
        c_hi = _ceil_shift(self.hi, self.prec)
        if c_lo != c_hi:
            raise PrecisionError(f"ceiling undecided at {self.prec} bits")
        return c_lo

    def frac(self) -> "Real":
        k = self.floor()
        return self - k

    def sign(self) -> int:
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        if self.lo == self.hi == 0:
            return 0
        raise PrecisionError("sign undecided")

    def compare(self, other: Number) -> int:
        """Return -1, 0 or 1; PrecisionError when enclosures overlap inexactly."""
        return (self - other).sign()

    def distance_to_integer(self) -> Fraction:
        """Lower bound on the distance from the enclosure to the nearest integer."""
        f_lo = self.lo >> self.prec
        if (self.hi >> self.prec) != f_lo or (self.lo == f_lo << self.prec):
            return Fraction(0)
        below = Fraction(self.lo, 1 << self.prec) - f_lo
        above = (f_lo + 1) - Fraction(self.hi, 1 << self.prec)
        return min(below, above)


def near(x: Real, target: Number, guard: Fraction = GUARD) -> bool:
    """True when ``x`` is inexact and its enclosure comes within ``guard`` of ``target``."""
    t = Real.coerce(target, x.prec)
    if x.exact and t.exact:
        return False
    d = x - t
    return d.lower <= guard and d.upper >= -guard


# -- named constants ----------------------------------------------------

def sqrt_int(k: int, prec: int = DEFAULT_PREC) -> Real:
    if k < 0:
        raise DomainError("square root of a negative integer")
    s = math.isqrt(k << (2 * prec))
    return Real(s, s if s * s == k << (2 * prec) else s + 1, prec)


def golden_ratio(prec: int = DEFAULT_PREC) -> Real:
    return (sqrt_int(5, prec) + 1) / 2


def euler_e(prec: int = DEFAULT_PREC) -> Real:
    # sum of 2^prec // k!; each floor loses < 1 ulp, tail after K terms < 1 ulp
    one = 1 << prec
    total, term, k = 0, one, 0
    while term:
        total += term
        k += 1
        term //= k
    return Real(total, total + k + 2, prec)


NAMED_CONSTANTS = {
    "sqrt2": lambda prec: sqrt_int(2, prec),
    "sqrt3": lambda prec: sqrt_int(3, prec),
    "sqrt5": lambda prec: sqrt_int(5, prec),
    "phi": golden_ratio,
    "e": euler_e,
}


def parse_real(token: Union[str, int, Fraction, Real], prec: int = DEFAULT_PREC) -> tuple[Real, bool]:
    """Parse a CLI-style real token.

    Accepts the names in :data:`NAMED_CONSTANTS`, an optional leading ``-``,
    the reciprocal form ``1/name``, and decimal or fraction literals.
    Returns the enclosure and whether it came from a named irrational.
    """
    if isinstance(token, Real):
        return token.with_prec(max(prec, token.prec)), not token.exact
    if not isinstance(token, str):
        return Real.from_fraction(Fraction(token), prec), False
    t = token.strip().lower()
    if t.startswith("-"):
        r, irr = parse_real(t[1:], prec)
        return -r, irr
    if t in NAMED_CONSTANTS:
        return NAMED_CONSTANTS[t](prec), True
    if t.startswith("1/") and t[2:] in NAMED_CONSTANTS:
        return NAMED_CONSTANTS[t[2:]](prec).reciprocal(), True
    try:
        return Real.from_fraction(Fraction(t), prec), False
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"cannot parse real {token!r}") from exc


def frac_float(x: Real) -> Optional[float]:
    """Fractional part as a float, or None when the floor is undecided."""
    try:
        return float(x.frac())
    except PrecisionError:
        return None

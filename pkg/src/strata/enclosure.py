"""Rational interval enclosures with outward rounding.

An Enclosure is a closed interval [low, high] with exact rational endpoints.
All numeric results in the package are delivered as enclosures; exact values
are zero-width intervals.  Outward rounding to a dyadic grid keeps the
denominators bounded during long computations without sacrificing soundness.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import DomainError

RationalLike = Union[Fraction, int]


@dataclass(frozen=True)
class Enclosure:
    low: Fraction
    high: Fraction

    def __post_init__(self):
        if not isinstance(self.low, Fraction):
            object.__setattr__(self, "low", Fraction(self.low))
        if not isinstance(self.high, Fraction):
            object.__setattr__(self, "high", Fraction(self.high))
        if self.low > self.high:
            raise DomainError(f"enclosure endpoints out of order: {self.low} > {self.high}")

    @staticmethod
    def exact(value: RationalLike) -> "Enclosure":
        v = Fraction(value)
        return Enclosure(v, v)

    @property
    def width(self) -> Fraction:
        return self.high - self.low

    @property
    def midpoint(self) -> Fraction:
        return (self.low + self.high) / 2

    def is_exact(self) -> bool:
        return self.low == self.high

    def contains(self, value: RationalLike) -> bool:
        v = Fraction(value)
        return self.low <= v <= self.high

    def contains_enclosure(self, other: "Enclosure") -> bool:
        return self.low <= other.low and other.high <= self.high

    def overlaps(self, other: "Enclosure") -> bool:
        return self.low <= other.high and other.low <= self.high

    def gap(self, other: "Enclosure") -> Fraction:
        """Distance between two enclosures; zero when they overlap."""
        if self.overlaps(other):
            return Fraction(0)
        if self.low > other.high:
            return self.low - other.high
        return other.low - self.high

    def hull(self, other: "Enclosure") -> "Enclosure":
        return Enclosure(min(self.low, other.low), max(self.high, other.high))

    def intersect(self, other: "Enclosure") -> "Enclosure":
        lo = max(self.low, other.low)
        hi = min(self.high, other.high)
        if lo > hi:
            raise DomainError("enclosures do not intersect")
        return Enclosure(lo, hi)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "Enclosure") -> "Enclosure":
        return Enclosure(self.low + other.low, self.high + other.high)

    def __sub__(self, other: "Enclosure") -> "Enclosure":
        return Enclosure(self.low - other.high, self.high - other.low)

    def __neg__(self) -> "Enclosure":
        return Enclosure(-self.high, -self.low)

    def __mul__(self, other: "Enclosure") -> "Enclosure":
        products = (
            self.low * other.low,
            self.low * other.high,
            self.high * other.low,
            self.high * other.high,
        )
        return Enclosure(min(products), max(products))

    def __truediv__(self, other: "Enclosure") -> "Enclosure":
        if other.low <= 0 <= other.high:
            raise DomainError("division by an enclosure containing zero")
        inv = Enclosure(Fraction(1) / other.high, Fraction(1) / other.low)
        return self * inv

    def scale(self, factor: RationalLike) -> "Enclosure":
        f = Fraction(factor)
        if f >= 0:
            return Enclosure(self.low * f, self.high * f)
        return Enclosure(self.high * f, self.low * f)

    def shift(self, offset: RationalLike) -> "Enclosure":
        o = Fraction(offset)
        return Enclosure(self.low + o, self.high + o)

    def abs(self) -> "Enclosure":
        if self.low >= 0:
            return self
        if self.high <= 0:
            return -self
        return Enclosure(Fraction(0), max(-self.low, self.high))

    def int_pow(self, k: int) -> "Enclosure":
        if k == 0:
            return Enclosure.exact(1)
        if k < 0:
            return Enclosure.exact(1) / self.int_pow(-k)
        if k % 2 == 0:
            a = self.abs()
            return Enclosure(a.low**k, a.high**k)
        return Enclosure(self.low**k, self.high**k)

    def round_out(self, bits: int) -> "Enclosure":
        """Widen to the dyadic grid with denominator 2**bits.

        Exact values are kept exact when their denominator is already small;
        this preserves zero-width results for polynomial arithmetic while
        keeping interval computations from accumulating huge denominators.
        """
        scale = 1 << bits
        if self.low == self.high:
            if self.low.denominator <= scale:
                return self
        lo_num = (self.low.numerator * scale) // self.low.denominator
        lo = Fraction(lo_num, scale)
        hi_num = -((-self.high.numerator * scale) // self.high.denominator)
        hi = Fraction(hi_num, scale)
        return Enclosure(lo, hi)

    def __repr__(self) -> str:
        return f"Enclosure({self.low}, {self.high})"


def sign_of(e: Enclosure) -> int | None:
    """Certified sign of every point in the enclosure, or None if undecided."""
    if e.low > 0:
        return 1
    if e.high < 0:
        return -1
    if e.low == e.high == 0:
        return 0
    return None

"""Layered exact real numbers.

A value carries a representation (dyadic, rational, algebraic, or series) and
a rank tag recording the definability layer it lives on.  Rank 0 holds dyadic
and rational numbers, rank 1 adds real algebraic numbers given by an integer
polynomial plus an isolating interval, rank 2 holds catalogued series reals
(e, pi, trig/exp values), and rank 3 and above hold series with
factorial-type convergence such as the Liouville constant.

Arithmetic keeps exact classes exact where a closed form exists; sums and
products of unrelated algebraic numbers fall back to enclosure-refinable
series values at the same rank, and exactness is recovered only when the
refined enclosure collapses onto a low-height rational candidate that can be
verified exactly.  No resultant computations anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from typing import Callable, Optional, Union

from . import polys
from .enclosure import Enclosure
from .errors import (
    BudgetExhaustedError,
    DemotionError,
    DomainError,
    RepresentationError,
)

Rank = int

# Denominator cap for rational candidates when deciding whether a refined
# enclosure has collapsed onto an exact rational.
COLLAPSE_DENOMINATOR_CAP = 1 << 24
DEFAULT_ZERO_TEST_BITS = 256


@dataclass(frozen=True)
class ComplexityBudget:
    """Finite enumeration bounds standing in for a formal system's reach."""

    max_dyadic_exponent: int = 8
    max_poly_degree: int = 2
    max_coeff_height: int = 4
    max_series_terms: int = 64

    def __post_init__(self):
        if self.max_dyadic_exponent < 0 or self.max_poly_degree < 1:
            raise DomainError("budget bounds must be nonnegative")
        if self.max_coeff_height < 1 or self.max_series_terms < 1:
            raise DomainError("budget bounds must be positive")


# ---------------------------------------------------------------------------
# representations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Dyadic:
    """numerator / 2**exponent in canonical form (odd numerator or exponent 0)."""

    numerator: int
    exponent: int

    def __post_init__(self):
        if self.exponent < 0:
            raise RepresentationError("dyadic exponent must be nonnegative")
        if self.exponent > 0 and self.numerator % 2 == 0:
            raise RepresentationError("dyadic numerator must be odd unless exponent is 0")

    @staticmethod
    def from_fraction(v: Fraction) -> "Dyadic":
        den = v.denominator
        if den & (den - 1):
            raise RepresentationError(f"{v} is not dyadic")
        return Dyadic(v.numerator, den.bit_length() - 1)

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.exponent)


@dataclass(frozen=True)
class Rational:
    """A reduced fraction; Fraction keeps gcd(p, q) = 1 for us."""

    value: Fraction


@dataclass(frozen=True)
class Algebraic:
    """Root of a square-free primitive integer polynomial, isolated by a
    rational interval containing exactly that one root.

    The polynomial has nonzero sign at both interval endpoints.  Construction
    goes through make_algebraic, which also rejects rational roots so that a
    value of this class is genuinely irrational.
    """

    coeffs: tuple[int, ...]
    iso_low: Fraction
    iso_high: Fraction
    _cache: list = field(default_factory=list, compare=False, repr=False, hash=False)

    def current_interval(self) -> tuple[Fraction, Fraction]:
        if self._cache:
            return self._cache[-1]
        return (self.iso_low, self.iso_high)

    def refine(self, width: Fraction) -> tuple[Fraction, Fraction]:
        lo, hi = self.current_interval()
        if hi - lo <= width:
            return lo, hi
        lo, hi = polys.refine_root(self.coeffs, lo, hi, width)
        self._cache.clear()
        self._cache.append((lo, hi))
        return lo, hi


@dataclass(frozen=True)
class SeriesValue:
    """Limit of a rational series with an explicit decreasing tail bound.

    terms(k) is the k-th exact rational term; tail(k) bounds the absolute
    value of everything after the k-th partial sum, so partial_sum(k) +/-
    tail(k) is always a valid enclosure of the limit.
    """

    terms: Callable[[int], Fraction] = field(compare=False)
    tail: Callable[[int], Fraction] = field(compare=False)
    declared_rank: int = 2
    label: str = "series"
    known_irrational: bool = False
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def partial_sum(self, k: int) -> Fraction:
        best = self._cache.get("upto", -1)
        acc = self._cache.get("sum", Fraction(0))
        if k <= best:
            return self._cache[("s", k)]
        for i in range(best + 1, k + 1):
            acc = acc + self.terms(i)
            self._cache[("s", i)] = acc
        self._cache["upto"] = k
        self._cache["sum"] = acc
        return acc

    @staticmethod
    def from_refiner(refiner: Callable[[int], Enclosure], rank: int,
                     label: str = "computed") -> "SeriesValue":
        """Wrap any enclosure refiner as a series: terms are successive
        midpoint corrections, tails come from the refiner's precision."""

        mids: dict[int, Fraction] = {}

        def mid(k: int) -> Fraction:
            if k not in mids:
                mids[k] = refiner(4 + 2 * k).midpoint
            return mids[k]

        def terms(k: int) -> Fraction:
            if k == 0:
                return mid(0)
            return mid(k) - mid(k - 1)

        def tail(k: int) -> Fraction:
            return Fraction(1, 1 << (3 + 2 * k))

        return SeriesValue(terms=terms, tail=tail, declared_rank=rank, label=label)


Representation = Union[Dyadic, Rational, Algebraic, SeriesValue]

_CLASS_ORDER = {Dyadic: 0, Rational: 1, Algebraic: 2, SeriesValue: 3}


@dataclass(frozen=True)
class LayeredReal:
    """A representation together with its rank tag.

    The tag starts at the representation class's minimal rank and can only
    grow (through promotion or arithmetic); it never drops below it.
    """

    rep: Representation
    rank: Rank

    def __post_init__(self):
        if self.rank < minimal_rank(self.rep):
            raise RepresentationError(
                f"rank tag {self.rank} below representation class minimum"
            )

    def exact_fraction(self) -> Optional[Fraction]:
        if isinstance(self.rep, Dyadic):
            return self.rep.as_fraction()
        if isinstance(self.rep, Rational):
            return self.rep.value
        return None

    def class_order(self) -> int:
        return _CLASS_ORDER[type(self.rep)]

    def __repr__(self) -> str:
        f = self.exact_fraction()
        if f is not None:
            return f"LayeredReal({f}, rank={self.rank})"
        if isinstance(self.rep, Algebraic):
            return (f"LayeredReal(root of {self.rep.coeffs} in "
                    f"({self.rep.iso_low},{self.rep.iso_high}), rank={self.rank})")
        return f"LayeredReal(<{self.rep.label}>, rank={self.rank})"


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def minimal_rank(rep: Representation) -> int:
    if isinstance(rep, (Dyadic, Rational)):
        return 0
    if isinstance(rep, Algebraic):
        return 1
    return rep.declared_rank


def from_fraction(v, rank: Rank = 0) -> LayeredReal:
    v = Fraction(v)
    den = v.denominator
    if den & (den - 1) == 0:
        rep: Representation = Dyadic.from_fraction(v)
    else:
        rep = Rational(v)
    return LayeredReal(rep, max(rank, 0))


def from_int(n: int, rank: Rank = 0) -> LayeredReal:
    return from_fraction(Fraction(n), rank)


def make_algebraic(coeffs, iso_low, iso_high, rank: Rank = 1) -> LayeredReal:
    """Build an algebraic value from an integer polynomial and an isolating
    interval.  Rational roots collapse to the rational class."""
    iso_low, iso_high = Fraction(iso_low), Fraction(iso_high)
    p = polys.square_free(tuple(int(c) for c in coeffs))
    if polys.degree(p) < 1:
        raise RepresentationError("polynomial must be nonconstant")
    if iso_low >= iso_high:
        raise RepresentationError("isolating interval is empty")

    roots = polys.isolate_roots(p, iso_low, iso_high)
    inside = [
        (lo, hi) for lo, hi in roots
        if not (hi < iso_low or lo > iso_high)
    ]
    if len(inside) != 1:
        raise RepresentationError(
            f"interval ({iso_low}, {iso_high}) isolates {len(inside)} roots, need exactly 1"
        )
    lo, hi = inside[0]

    r = polys.rational_root_between(p, lo, hi)
    if r is not None:
        return from_fraction(r, rank)

    return LayeredReal(Algebraic(p, lo, hi), max(rank, 1))


def sqrt_int(n: int, rank: Rank = 1) -> LayeredReal:
    if n < 0:
        raise DomainError("square root of a negative integer")
    r = math.isqrt(n)
    if r * r == n:
        return from_int(r, max(rank - 1, 0))
    return make_algebraic((-n, 0, 1), r, r + 1, rank)


def series_value(terms, tail, declared_rank, label, known_irrational=False) -> LayeredReal:
    rep = SeriesValue(terms=terms, tail=tail, declared_rank=declared_rank,
                      label=label, known_irrational=known_irrational)
    return LayeredReal(rep, declared_rank)


# ---------------------------------------------------------------------------
# catalogue constants
# ---------------------------------------------------------------------------


def _euler_e() -> LayeredReal:
    fact = [1]

    def terms(k: int) -> Fraction:
        while len(fact) <= k:
            fact.append(fact[-1] * len(fact))
        return Fraction(1, fact[k])

    def tail(k: int) -> Fraction:
        while len(fact) <= k + 1:
            fact.append(fact[-1] * len(fact))
        return Fraction(2, fact[k + 1])

    return series_value(terms, tail, 2, "e", known_irrational=True)


def _pi() -> LayeredReal:
    # 16*arctan(1/5) - 4*arctan(1/239), both series alternating

    def arctan_term(inv: int, k: int) -> Fraction:
        return Fraction((-1) ** k, (2 * k + 1) * inv ** (2 * k + 1))

    def terms(k: int) -> Fraction:
        return 16 * arctan_term(5, k) - 4 * arctan_term(239, k)

    def tail(k: int) -> Fraction:
        return 16 * abs(arctan_term(5, k + 1)) + 4 * abs(arctan_term(239, k + 1))

    return series_value(terms, tail, 2, "pi", known_irrational=True)


def _liouville() -> LayeredReal:
    def terms(k: int) -> Fraction:
        return Fraction(1, 10 ** math.factorial(k + 1))

    def tail(k: int) -> Fraction:
        return Fraction(2, 10 ** math.factorial(k + 2))

    return series_value(terms, tail, 3, "liouville", known_irrational=True)


@dataclass(frozen=True)
class CatalogueEntry:
    name: str
    kind: str
    params: tuple[str, ...]
    declared_rank: int
    value: LayeredReal


DEFAULT_CATALOGUE_TEXT = """\
# name      kind       params     rank
half        rational   1/2        0
third       rational   1/3        0
sqrt2       sqrt       2          1
sqrt3       sqrt       3          1
sqrt5       sqrt       5          1
sqrt2_over_2 sqrt_scaled 2 1/2    1
golden      algebraic  -1,-1,1;1;2 1
e           euler      -          2
pi          pi         -          2
liouville   liouville  -          3
"""


def _build_entry(name: str, kind: str, params: tuple[str, ...], rank: int) -> CatalogueEntry:
    if kind == "rational":
        value = from_fraction(Fraction(params[0]))
    elif kind == "dyadic":
        value = from_fraction(Fraction(int(params[0]), 1 << int(params[1])))
    elif kind == "sqrt":
        value = sqrt_int(int(params[0]))
    elif kind == "sqrt_scaled":
        value = combine(sqrt_int(int(params[0])), from_fraction(Fraction(params[1])), "*")
    elif kind == "algebraic":
        spec_coeffs, lo, hi = params[0].split(";")
        coeffs = tuple(int(c) for c in spec_coeffs.split(","))
        value = make_algebraic(coeffs, Fraction(lo), Fraction(hi))
    elif kind == "euler":
        value = _euler_e()
    elif kind == "pi":
        value = _pi()
    elif kind == "liouville":
        value = _liouville()
    else:
        raise DomainError(f"unknown catalogue kind: {kind}")
    if value.rank != rank:
        value = promote(value, rank) if rank > value.rank else value
    return CatalogueEntry(name, kind, params, rank, value)


def parse_catalogue(text: str) -> dict[str, CatalogueEntry]:
    entries: dict[str, CatalogueEntry] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        name, kind, rank = parts[0], parts[1], int(parts[-1])
        params = tuple(parts[2:-1])
        entries[name] = _build_entry(name, kind, params, rank)
    return entries


def load_catalogue(path: str | None = None) -> dict[str, CatalogueEntry]:
    if path is None:
        return parse_catalogue(DEFAULT_CATALOGUE_TEXT)
    with open(path, "r", encoding="utf-8") as fh:
        return parse_catalogue(fh.read())


_DEFAULT_CATALOGUE: dict[str, CatalogueEntry] | None = None


def default_catalogue() -> dict[str, CatalogueEntry]:
    global _DEFAULT_CATALOGUE
    if _DEFAULT_CATALOGUE is None:
        _DEFAULT_CATALOGUE = parse_catalogue(DEFAULT_CATALOGUE_TEXT)
    return _DEFAULT_CATALOGUE


def constant(name: str) -> LayeredReal:
    cat = default_catalogue()
    if name not in cat:
        raise DomainError(f"unknown constant: {name}")
    return cat[name].value


# ---------------------------------------------------------------------------
# core operations
# ---------------------------------------------------------------------------


def classify_rank(x: LayeredReal) -> Rank:
    """Minimal rank of the value's representation class (ignores the tag)."""
    return minimal_rank(x.rep)


def promote(x: LayeredReal, m: Rank) -> LayeredReal:
    if m < x.rank:
        raise DemotionError(f"cannot demote rank {x.rank} to {m}")
    return LayeredReal(x.rep, m)


def enclose(x: LayeredReal, precision_bits: int,
            max_series_terms: int | None = None) -> Enclosure:
    """Enclosure of width at most 2**-precision_bits."""
    target = Fraction(1, 1 << precision_bits)
    rep = x.rep
    if isinstance(rep, Dyadic):
        return Enclosure.exact(rep.as_fraction())
    if isinstance(rep, Rational):
        return Enclosure.exact(rep.value)
    if isinstance(rep, Algebraic):
        lo, hi = rep.refine(target)
        return Enclosure(lo, hi)
    cap = max_series_terms if max_series_terms is not None else 100_000
    k = 0
    while k <= cap:
        t = rep.tail(k)
        if 2 * t <= target:
            s = rep.partial_sum(k)
            return Enclosure(s - t, s + t)
        # factorial-type tails drop fast; simple linear scan is fine
        k += 1
    raise BudgetExhaustedError(
        f"series '{rep.label}' did not reach width 2^-{precision_bits} "
        f"within {cap} terms"
    )


def _algebraic_equal(a: Algebraic, b: Algebraic) -> bool:
    g = polys.gcd_rat(a.coeffs, b.coeffs)
    if polys.degree(g) < 1:
        return False
    width = Fraction(1, 1 << 16)
    alo, ahi = a.refine(width)
    blo, bhi = b.refine(width)
    lo, hi = max(alo, blo), min(ahi, bhi)
    while lo < hi and (polys.evaluate(g, lo) == 0 or polys.evaluate(g, hi) == 0):
        width /= 4
        alo, ahi = a.refine(width)
        blo, bhi = b.refine(width)
        lo, hi = max(alo, blo), min(ahi, bhi)
    if lo >= hi:
        return False
    return polys.count_roots(g, lo, hi) >= 1


def compare(x: LayeredReal, y: LayeredReal,
            zero_test_bits: int = DEFAULT_ZERO_TEST_BITS) -> int:
    """Exact three-way comparison: -1, 0, or 1.

    Dyadic/rational pairs compare exactly; algebraic values get exact
    equality decisions through polynomial gcds; series values are refined
    until the enclosures separate, and a tie that survives past
    zero_test_bits raises BudgetExhaustedError rather than guessing.
    """
    if x.rep is y.rep:
        return 0
    fx, fy = x.exact_fraction(), y.exact_fraction()
    if fx is not None and fy is not None:
        return (fx > fy) - (fx < fy)

    if isinstance(x.rep, Algebraic) and fy is not None:
        return -_compare_algebraic_rational(x.rep, fy)
    if isinstance(y.rep, Algebraic) and fx is not None:
        return _compare_algebraic_rational(y.rep, fx)
    if isinstance(x.rep, Algebraic) and isinstance(y.rep, Algebraic):
        if _algebraic_equal(x.rep, y.rep):
            return 0

    bits = 8
    while bits <= zero_test_bits:
        ex = enclose(x, bits)
        ey = enclose(y, bits)
        if ex.high < ey.low:
            return -1
        if ey.high < ex.low:
            return 1
        bits *= 2
    raise BudgetExhaustedError(
        f"comparison undecided at 2^-{zero_test_bits} enclosure width"
    )


def _compare_algebraic_rational(a: Algebraic, q: Fraction) -> int:
    """Sign of q - a, decided exactly.

    The interval test comes first so that the common case (q clearly on one
    side of the cached isolating interval) costs two comparisons.
    """
    lo, hi = a.current_interval()
    if q <= lo:
        return -1
    if q >= hi:
        return 1
    if polys.evaluate(a.coeffs, q) == 0:
        return 0
    width = max(hi - lo, Fraction(1)) / 4
    while lo < q < hi:
        lo, hi = a.refine(width)
        width /= 4
    if q <= lo:
        return -1
    return 1


def is_zero(x: LayeredReal, zero_test_bits: int = DEFAULT_ZERO_TEST_BITS) -> bool:
    return compare(x, from_int(0), zero_test_bits) == 0


def _simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """The rational with smallest denominator in [lo, hi] (Stern-Brocot)."""
    if lo > hi:
        raise DomainError("empty interval")
    if lo <= 0 <= hi:
        return Fraction(0)
    if hi < 0:
        return -_simplest_between(-hi, -lo)

    def simplest_pos(a: Fraction, b: Fraction) -> Fraction:
        fl = a.numerator // a.denominator
        if fl + 1 <= b or a == fl:
            return Fraction(max(fl if a == fl else fl + 1, 1))
        frac = simplest_pos(1 / (b - fl), 1 / (a - fl))
        return fl + 1 / frac

    return simplest_pos(lo, hi)


def _affine_algebraic(a: Algebraic, scale: Fraction, offset: Fraction,
                      rank: Rank) -> LayeredReal:
    """Exact representation of scale*root + offset (scale nonzero)."""
    # substitute X -> (X - offset)/scale into the defining polynomial
    d = polys.degree(a.coeffs)
    new_coeffs: list[Fraction] = [Fraction(0)] * (d + 1)
    # expand sum c_i * ((X - offset)/scale)^i
    power: tuple = (Fraction(1),)
    base = (Fraction(-offset), Fraction(1))
    inv = Fraction(1) / scale
    for i, c in enumerate(a.coeffs):
        coeff = Fraction(c) * inv**i
        for j, pc in enumerate(power):
            new_coeffs[j] += coeff * pc
        power = polys.mul(power, base)
    p = polys.to_int_poly(tuple(new_coeffs))
    lo, hi = a.current_interval()
    nlo, nhi = lo * scale + offset, hi * scale + offset
    if nlo > nhi:
        nlo, nhi = nhi, nlo
    return make_algebraic(p, nlo, nhi, rank)


def _invert_algebraic(a: Algebraic, rank: Rank) -> LayeredReal:
    lo, hi = a.current_interval()
    width = (hi - lo) / 4
    while lo <= 0 <= hi:
        lo, hi = a.refine(width)
        width /= 4
    rev = tuple(reversed(a.coeffs))
    return make_algebraic(rev, 1 / hi, 1 / lo, rank)


def _refined_binary(x: LayeredReal, y: LayeredReal, op: str, rank: Rank,
                    zero_test_bits: int = DEFAULT_ZERO_TEST_BITS) -> LayeredReal:
    """Series-valued combination defined by joint enclosure refinement."""
    if op == "/":
        if is_zero(y, zero_test_bits):
            raise DomainError("division by zero")

    def refiner(bits: int) -> Enclosure:
        work = bits + 4
        for _ in range(64):
            ex = enclose(x, work)
            ey = enclose(y, work)
            if op == "+":
                r = ex + ey
            elif op == "-":
                r = ex - ey
            elif op == "*":
                r = ex * ey
            else:
                r = ex / ey
            r = r.round_out(bits + 2)
            if r.width <= Fraction(1, 1 << bits):
                return r
            work *= 2
        raise BudgetExhaustedError(f"could not refine {op}-combination")

    label = f"({_label(x)} {op} {_label(y)})"
    rep = SeriesValue.from_refiner(refiner, rank, label)
    return LayeredReal(rep, rank)


def _label(x: LayeredReal) -> str:
    f = x.exact_fraction()
    if f is not None:
        return str(f)
    if isinstance(x.rep, Algebraic):
        return f"alg{x.rep.coeffs}"
    return x.rep.label


def _try_rational_collapse(x: LayeredReal, y: LayeredReal, op: str,
                           result_rank: Rank) -> Optional[LayeredReal]:
    """If x op y looks rational, verify it exactly and return the collapse.

    Only attempted for algebraic operands, where the candidate identity can
    be decided by exact polynomial arithmetic: x + y = c iff x = c - y, etc.
    Returns None when no verified candidate exists.
    """
    if not (isinstance(x.rep, Algebraic) and isinstance(y.rep, Algebraic)):
        return None
    bits = 64
    ex, ey = enclose(x, bits), enclose(y, bits)
    if op == "+":
        e = ex + ey
    elif op == "-":
        e = ex - ey
    elif op == "*":
        e = ex * ey
    else:
        if ey.contains(0):
            return None
        e = ex / ey
    cand = _simplest_between(e.low, e.high)
    if cand.denominator > COLLAPSE_DENOMINATOR_CAP:
        return None

    # verify: rewrite x op y == cand as x == (cand inverse-op y)
    try:
        if op == "+":
            rhs = combine(from_fraction(cand), y, "-")
        elif op == "-":
            rhs = combine(from_fraction(cand), y, "+")
        elif op == "*":
            if cand == 0:
                return None  # operands are irrational, product of two reals
            rhs = combine(from_fraction(cand), y, "/")
        else:
            rhs = combine(from_fraction(cand), y, "*")
    except DomainError:
        return None
    if rhs.exact_fraction() is not None:
        return None
    if isinstance(rhs.rep, Algebraic) and _algebraic_equal(x.rep, rhs.rep):
        return from_fraction(cand, result_rank)
    return None


def combine(x: LayeredReal, y: LayeredReal, op: str,
            zero_test_bits: int = DEFAULT_ZERO_TEST_BITS) -> LayeredReal:
    """Arithmetic on layered values; result rank = max of the operand tags."""
    if op not in {"+", "-", "*", "/"}:
        raise DomainError(f"unknown operation: {op}")
    rank = max(x.rank, y.rank)
    fx, fy = x.exact_fraction(), y.exact_fraction()

    if fx is not None and fy is not None:
        if op == "+":
            v = fx + fy
        elif op == "-":
            v = fx - fy
        elif op == "*":
            v = fx * fy
        else:
            if fy == 0:
                raise DomainError("division by zero")
            v = fx / fy
        return from_fraction(v, rank)

    # algebraic with rational stays algebraic (affine maps and inversion)
    if isinstance(x.rep, Algebraic) and fy is not None:
        if op == "+":
            return _affine_algebraic(x.rep, Fraction(1), fy, rank)
        if op == "-":
            return _affine_algebraic(x.rep, Fraction(1), -fy, rank)
        if op == "*":
            if fy == 0:
                return from_fraction(0, rank)
            return _affine_algebraic(x.rep, fy, Fraction(0), rank)
        if fy == 0:
            raise DomainError("division by zero")
        return _affine_algebraic(x.rep, 1 / fy, Fraction(0), rank)
    if isinstance(y.rep, Algebraic) and fx is not None:
        if op == "+":
            return _affine_algebraic(y.rep, Fraction(1), fx, rank)
        if op == "-":
            return _affine_algebraic(y.rep, Fraction(-1), fx, rank)
        if op == "*":
            if fx == 0:
                return from_fraction(0, rank)
            return _affine_algebraic(y.rep, fx, Fraction(0), rank)
        inv = _invert_algebraic(y.rep, rank)
        if fx == 0:
            return from_fraction(0, rank)
        if isinstance(inv.rep, Algebraic):
            return _affine_algebraic(inv.rep, fx, Fraction(0), rank)
        return combine(from_fraction(fx), inv, "*", zero_test_bits)

    # identical objects have exact self-relations
    if x.rep is y.rep:
        if op == "-":
            return from_fraction(0, rank)
        if op == "/":
            if is_zero(x, zero_test_bits):
                raise DomainError("division by zero")
            return from_fraction(1, rank)

    if isinstance(x.rep, Algebraic) and isinstance(y.rep, Algebraic):
        if _algebraic_equal(x.rep, y.rep):
            if op == "-":
                return from_fraction(0, rank)
            if op == "/":
                return from_fraction(1, rank)
            if op == "+":
                return _affine_algebraic(x.rep, Fraction(2), Fraction(0), rank)
        collapsed = _try_rational_collapse(x, y, op, rank)
        if collapsed is not None:
            return collapsed

    return _refined_binary(x, y, op, rank, zero_test_bits)


def negate(x: LayeredReal) -> LayeredReal:
    return combine(from_int(0), x, "-")


def abs_value(x: LayeredReal, zero_test_bits: int = DEFAULT_ZERO_TEST_BITS) -> LayeredReal:
    try:
        s = compare(x, from_int(0), zero_test_bits)
    except BudgetExhaustedError:
        s = None
    if s is not None and s >= 0:
        return x
    if s == -1:
        return negate(x)

    def refiner(bits: int) -> Enclosure:
        return enclose(x, bits).abs()

    rep = SeriesValue.from_refiner(refiner, x.rank, f"|{_label(x)}|")
    return LayeredReal(rep, x.rank)


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


def _bounds_as_fractions(lo: LayeredReal, hi: LayeredReal,
                         bits: int = 32) -> tuple[Fraction, Fraction]:
    elo, ehi = enclose(lo, bits), enclose(hi, bits)
    return elo.low, ehi.high


def _in_range(v: LayeredReal, lo: LayeredReal, hi: LayeredReal) -> bool:
    return compare(lo, v) <= 0 and compare(v, hi) <= 0


def enumerate_layer(n: Rank, interval: tuple[LayeredReal, LayeredReal],
                    budget: ComplexityBudget) -> list[LayeredReal]:
    """All rank <= n values in the closed interval reachable under the budget,
    sorted ascending, duplicates collapsed to their lowest representation
    class.  Layer 0 enumerates the dyadic grid; layer 1 adds bounded-height
    rationals and roots of bounded integer polynomials; layers 2 and up add
    catalogued series constants of matching declared rank.
    """
    lo, hi = interval
    if lo.rank > n or hi.rank > n:
        raise DomainError("interval endpoints must have rank <= layer")
    if compare(lo, hi) > 0:
        raise DomainError("interval endpoints out of order")

    out_lo, out_hi = _bounds_as_fractions(lo, hi)
    found: list[LayeredReal] = []

    k = budget.max_dyadic_exponent
    scale = 1 << k
    p_min = math.floor(out_lo * scale)
    p_max = math.ceil(out_hi * scale)
    for p in range(p_min, p_max + 1):
        cand = from_fraction(Fraction(p, scale))
        if _in_range(cand, lo, hi):
            found.append(cand)

    if n >= 1:
        h = budget.max_coeff_height
        seen: set[Fraction] = set()
        for q in range(2, h + 1):
            for p in range(-h, h + 1):
                v = Fraction(p, q)
                if v.denominator == 1 or v in seen:
                    continue
                seen.add(v)
                cand = from_fraction(v)
                if _in_range(cand, lo, hi):
                    found.append(cand)
        found.extend(_enumerate_algebraic(n, lo, hi, out_lo, out_hi, budget))

    if n >= 2:
        for entry in default_catalogue().values():
            if 2 <= entry.declared_rank <= n and _in_range(entry.value, lo, hi):
                found.append(entry.value)

    return _sort_dedup(found)


def _enumerate_algebraic(n: Rank, lo: LayeredReal, hi: LayeredReal,
                         out_lo: Fraction, out_hi: Fraction,
                         budget: ComplexityBudget) -> list[LayeredReal]:
    h = budget.max_coeff_height
    out: list[LayeredReal] = []
    pad = Fraction(1, 256)
    for d in range(2, budget.max_poly_degree + 1):
        for coeffs in _coeff_tuples(d, h):
            p = polys.square_free(coeffs)
            if polys.degree(p) < 2:
                continue
            bound = polys.root_bound(p)
            if bound < out_lo or -bound > out_hi:
                continue
            for rlo, rhi in polys.isolate_roots(p, out_lo - pad, out_hi + pad):
                try:
                    v = make_algebraic(p, rlo, rhi)
                except RepresentationError:
                    continue
                if v.exact_fraction() is not None:
                    continue  # rational roots already enumerated by height
                if _in_range(v, lo, hi):
                    out.append(v)
    return out


def _coeff_tuples(degree: int, height: int):
    """Primitive-candidate integer coefficient tuples with positive lead."""
    def rec(i: int, acc: list[int]):
        if i == degree:
            for lead in range(1, height + 1):
                yield tuple(acc + [lead])
            return
        for c in range(-height, height + 1):
            acc.append(c)
            yield from rec(i + 1, acc)
            acc.pop()

    yield from rec(0, [])


def _sort_dedup(values: list[LayeredReal]) -> list[LayeredReal]:
    ordered = sorted(values, key=cmp_to_key(compare))
    out: list[LayeredReal] = []
    for v in ordered:
        if out and compare(out[-1], v) == 0:
            if v.class_order() < out[-1].class_order():
                out[-1] = v
            continue
        out.append(v)
    return out


# ---------------------------------------------------------------------------
# serialization helpers
# ---------------------------------------------------------------------------


def format_fraction(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


def value_payload(x: LayeredReal, bits: int = 48) -> dict:
    """JSON-ready description of a layered value."""
    payload: dict = {"rank": x.rank}
    f = x.exact_fraction()
    if f is not None:
        payload["repr_kind"] = "dyadic" if isinstance(x.rep, Dyadic) else "rational"
        payload["value"] = format_fraction(f)
        return payload
    if isinstance(x.rep, Algebraic):
        payload["repr_kind"] = "algebraic"
        payload["coeffs"] = list(x.rep.coeffs)
        payload["iso_low"] = format_fraction(x.rep.iso_low)
        payload["iso_high"] = format_fraction(x.rep.iso_high)
    else:
        payload["repr_kind"] = "series"
        payload["label"] = x.rep.label
    e = enclose(x, bits)
    payload["enclosure"] = [format_fraction(e.low), format_fraction(e.high)]
    return payload

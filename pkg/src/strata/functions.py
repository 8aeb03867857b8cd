"""Symbolic function descriptors and their enclosure evaluators.

A function is a small expression tree over layered constants. Evaluation
comes in two flavors: at a point (exact comparisons decide every branch,
so rational inputs through rational operations give zero-width answers)
and over an interval (outer enclosures, used by integrals and covers).

Jump decisions (heaviside, switch) always compare the input itself
against a stored threshold, which the number kernel decides exactly.
Floor and sign of composite arguments refine adaptively and fall back
to an outer hull when the argument cannot be pinned down.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from . import layers as L
from .enclosure import Enclosure
from .errors import BudgetExhaustedError, DomainError
from .layers import LayeredReal

DEFAULT_SERIES_TERMS = 30

_PI = L.constant("pi")


# ---------------------------------------------------------------------------
# expression nodes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: LayeredReal


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class BinOp:
    op: str  # + - * /
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class IntPow:
    base: "Expr"
    power: int


@dataclass(frozen=True)
class RatPow:
    """base^(num/den); even den requires a nonnegative base."""

    base: "Expr"
    num: int
    den: int


@dataclass(frozen=True)
class Abs:
    arg: "Expr"


@dataclass(frozen=True)
class Floor:
    arg: "Expr"


@dataclass(frozen=True)
class Sign:
    arg: "Expr"


@dataclass(frozen=True)
class IndicatorRational:
    """1 on provably rational inputs, 0 on provably irrational ones,
    the full [0,1] hull when the input's class is unknown."""


@dataclass(frozen=True)
class Heaviside:
    """0 below the threshold, 1 at and above it."""

    threshold: LayeredReal


@dataclass(frozen=True)
class SwitchAt:
    """left of the threshold / right of it / a pinned value exactly at it."""

    threshold: LayeredReal
    left: "Expr"
    right: "Expr"
    at_value: LayeredReal


@dataclass(frozen=True)
class SeriesFun:
    """sin/cos/exp as truncated power series with certified tail bounds."""

    kind: str  # sin | cos | exp
    arg: "Expr"
    terms: int = DEFAULT_SERIES_TERMS


@dataclass(frozen=True)
class TruncatedSum:
    """Finite families of scaled oscillations.

    weierstrass: sum a^k cos(b^k pi x), k = 0..terms
    takagi:      sum a^k frac(b^k x),   k = 0..terms
    fourier:     sum a^k sin(k pi x),   k = 1..terms
    """

    kind: str
    coeff: LayeredReal
    base: LayeredReal
    terms: int


@dataclass(frozen=True)
class PiecewiseLinear:
    """Exact rational polyline; evaluation clamps to the breakpoint span."""

    points: tuple[tuple[Fraction, Fraction], ...]


@dataclass(frozen=True)
class LayerGate:
    """inner when the observer layer reaches min_layer, fallback below it.

    An observer layer of None means no restriction."""

    min_layer: int
    inner: "Expr"
    fallback: "Expr"


Expr = (Const | Var | BinOp | IntPow | RatPow | Abs | Floor | Sign
        | IndicatorRational | Heaviside | SwitchAt | SeriesFun | TruncatedSum
        | PiecewiseLinear | LayerGate)


@dataclass(frozen=True)
class FunctionDescriptor:
    """Expression tree plus the ranks and domain data the calculus needs.

    envelope_low/envelope_high, when both set, declare an a-priori bound on
    the function's values over its whole domain; range evaluation falls
    back on them for subintervals where the expression itself cannot be
    enclosed (say, a divisor interval through zero).
    """

    expression: Expr
    domain_rank: int
    codomain_rank: int
    domain_low: LayeredReal | None = None
    domain_high: LayeredReal | None = None
    domain_low_closed: bool = True
    domain_high_closed: bool = True
    envelope_low: Fraction | None = None
    envelope_high: Fraction | None = None

    def __post_init__(self):
        cap = max(self.domain_rank, self.codomain_rank)
        for c in embedded_constants(self.expression):
            if c.rank > cap:
                raise ValueError(
                    f"embedded constant of rank {c.rank} exceeds the declared "
                    f"ranks ({self.domain_rank}, {self.codomain_rank})")
        if (self.envelope_low is None) != (self.envelope_high is None):
            raise ValueError("an envelope needs both bounds")
        if self.envelope_low is not None and self.envelope_low > self.envelope_high:
            raise ValueError("envelope bounds out of order")


def embedded_constants(node: Expr):
    """Every layered constant stored in the tree, thresholds included."""
    if isinstance(node, Const):
        yield node.value
    elif isinstance(node, BinOp):
        yield from embedded_constants(node.left)
        yield from embedded_constants(node.right)
    elif isinstance(node, (IntPow, RatPow)):
        yield from embedded_constants(node.base)
    elif isinstance(node, (Abs, Floor, Sign, SeriesFun)):
        yield from embedded_constants(node.arg)
    elif isinstance(node, Heaviside):
        yield node.threshold
    elif isinstance(node, SwitchAt):
        yield node.threshold
        yield node.at_value
        yield from embedded_constants(node.left)
        yield from embedded_constants(node.right)
    elif isinstance(node, TruncatedSum):
        yield node.coeff
        yield node.base
    elif isinstance(node, LayerGate):
        yield from embedded_constants(node.inner)
        yield from embedded_constants(node.fallback)


def var() -> Var:
    return Var()


def const(v) -> Const:
    if isinstance(v, LayeredReal):
        return Const(v)
    return Const(L.from_fraction(Fraction(v)))


def add(a, b) -> BinOp:
    return BinOp("+", a, b)


def sub(a, b) -> BinOp:
    return BinOp("-", a, b)


def mul(a, b) -> BinOp:
    return BinOp("*", a, b)


def div(a, b) -> BinOp:
    return BinOp("/", a, b)


# ---------------------------------------------------------------------------
# series helpers
# ---------------------------------------------------------------------------


def _exact_sin_cos(kind: str, r: Fraction, terms: int,
                   prec_bits: int = 120) -> tuple[Fraction, Fraction]:
    """Partial sum and error bound for sin/cos at an exact argument.

    The sum runs in scaled integer arithmetic, so an argument with an
    enormous denominator (a reduced 1/x, say) costs the same as a tame
    one. The returned bound covers the omitted tail together with the
    argument snapping and every floor division. Sound for |r| <= 4 and
    terms >= 8: past the cutoff successive terms shrink by better than
    half, so the tail is at most twice the first omitted term.
    """
    if terms < 8:
        raise BudgetExhaustedError("sin/cos need a series budget of at least 8 terms")
    if abs(r) > 4:
        raise DomainError("sin/cos argument escaped range reduction")
    if not r:
        return Fraction(1 if kind == "cos" else 0), Fraction(0)
    scale = 1 << prec_bits
    fx = round(abs(r) * scale)
    k = 1 if kind == "sin" else 0
    mag = fx if kind == "sin" else scale  # |r|^k / k!, scaled, exact so far
    total = mag
    sign = -1
    for _ in range(terms):
        mag = mag * fx // scale * fx // scale // ((k + 1) * (k + 2))
        k += 2
        total += sign * mag
        sign = -sign
    omitted = mag * fx // scale * fx // scale // ((k + 1) * (k + 2))
    # each step injects < 3 ulp and later steps amplify by a bounded factor
    slack = 9 * (terms + 3)
    value = Fraction(-total if kind == "sin" and r < 0 else total, scale)
    return value, Fraction(2 * omitted + 3 * slack + 2, scale)


def _exact_exp(r: Fraction, terms: int) -> tuple[Fraction, Fraction]:
    if terms < 2 * abs(r) + 4:
        raise BudgetExhaustedError(
            f"exp series budget of {terms} terms is too small for argument {float(r):.3g}")
    total = Fraction(0)
    for j in range(terms + 1):
        total += r**j / math.factorial(j)
    tail = 2 * abs(r) ** (terms + 1) / math.factorial(terms + 1)
    return total, tail


def pi_enclosure(bits: int) -> Enclosure:
    return L.enclose(_PI, bits)


def _reduce_mod_2pi(t: Fraction, bits: int) -> Enclosure:
    """Enclosure of t - 2*pi*m with the integer m chosen so the result
    lands within about pi of zero. Exact (zero-width) when m = 0."""
    if abs(t) <= 3:
        return Enclosure.exact(t)
    two_pi = pi_enclosure(bits + 16 + max(0, t.numerator.bit_length())).scale(2)
    m = round(t / two_pi.midpoint)
    if m == 0:
        return Enclosure.exact(t)
    return Enclosure.exact(t) - two_pi.scale(m)


def _series_point(kind: str, arg: Enclosure, terms: int, bits: int) -> Enclosure:
    """Truncated series over an enclosure argument: exact partial sums at
    the midpoint, a certified tail, and a Lipschitz term for the width."""
    mid = arg.midpoint
    half_width = arg.width / 2
    if kind == "exp":
        value, tail = _exact_exp(mid, terms)
        # |exp'| on the interval is at most exp(high) <= 3^ceil(high)
        lip = Fraction(3) ** max(0, math.ceil(arg.high)) if arg.high > 0 else Fraction(1)
    else:
        reduced = _reduce_mod_2pi(mid, bits)
        value, tail = _exact_sin_cos(kind, reduced.midpoint, terms, bits + 32)
        tail += reduced.width / 2  # reduction slack, |sin'|,|cos'| <= 1
        lip = Fraction(1)
    pad = tail + lip * half_width
    out = Enclosure(value - pad, value + pad)
    if kind != "exp" and pad > 0:
        out = out.intersect(Enclosure(Fraction(-1), Fraction(1)))
    return out


def _frac_part_range(t: Enclosure) -> Enclosure:
    """Range of the sawtooth t - floor(t) over an interval."""
    if t.is_exact():
        v = t.low
        return Enclosure.exact(v - math.floor(v))
    flo, fhi = math.floor(t.low), math.floor(t.high)
    if flo == fhi:
        return Enclosure(t.low - flo, t.high - flo)
    return Enclosure(Fraction(0), Fraction(1))


# ---------------------------------------------------------------------------
# roots
# ---------------------------------------------------------------------------


def _int_nth_root(n: int, q: int) -> int:
    """floor(n^(1/q)) for n >= 0 by Newton iteration on integers."""
    if n == 0:
        return 0
    x = 1 << (n.bit_length() // q + 1)
    while True:
        y = ((q - 1) * x + n // x ** (q - 1)) // q
        if y >= x:
            return x
        x = y


def _root_of_fraction(v: Fraction, q: int, bits: int) -> Enclosure:
    """Enclosure of v^(1/q) for v >= 0, exact for perfect powers."""
    if v == 0:
        return Enclosure.exact(Fraction(0))
    rn = _int_nth_root(v.numerator, q)
    rd = _int_nth_root(v.denominator, q)
    if rn**q == v.numerator and rd**q == v.denominator:
        return Enclosure.exact(Fraction(rn, rd))
    scale = 1 << bits
    m = (v.numerator * scale**q) // v.denominator
    r = _int_nth_root(m, q)
    return Enclosure(Fraction(r, scale), Fraction(r + 1, scale))


def _rat_pow_range(e: Enclosure, num: int, den: int, bits: int) -> Enclosure:
    if den % 2 == 0 and e.low < 0:
        raise DomainError("rational power of a negative value")
    if num < 0 and e.contains(Fraction(0)):
        raise DomainError("negative power of a value near zero")

    def endpoint(v: Fraction) -> Enclosure:
        if v < 0:
            inner = _root_of_fraction(-v, den, bits)
            root = Enclosure(-inner.high, -inner.low)
        else:
            root = _root_of_fraction(v, den, bits)
        return root.int_pow(num)

    a, b = endpoint(e.low), endpoint(e.high)
    return a.hull(b)  # x^(p/q) is monotone on each sign domain


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

_REFINE_STEPS = 4


def _eval_point(node: Expr, x: LayeredReal, bits: int, layer: int | None) -> Enclosure:
    if isinstance(node, Const):
        return L.enclose(node.value, bits)
    if isinstance(node, Var):
        return L.enclose(x, bits)
    if isinstance(node, BinOp):
        extra = 8
        for _ in range(_REFINE_STEPS):
            a = _eval_point(node.left, x, bits + extra, layer)
            b = _eval_point(node.right, x, bits + extra, layer)
            try:
                out = _apply_binop(node.op, a, b)
            except ZeroDivisionError:
                raise DomainError("division by exact zero")
            if out is not None:
                return out
            extra *= 2
        raise BudgetExhaustedError(
            f"cannot separate a divisor from zero at {bits + extra} bits")
    if isinstance(node, IntPow):
        return _eval_point(node.base, x, bits + 8, layer).int_pow(node.power)
    if isinstance(node, RatPow):
        base = _eval_point(node.base, x, bits + 8, layer)
        return _rat_pow_range(base, node.num, node.den, bits + 8)
    if isinstance(node, Abs):
        return _eval_point(node.arg, x, bits + 4, layer).abs()
    if isinstance(node, Floor):
        return _floor_point(node.arg, x, bits, layer)
    if isinstance(node, Sign):
        return _sign_point(node.arg, x, bits, layer)
    if isinstance(node, IndicatorRational):
        return _indicator_rational(x)
    if isinstance(node, Heaviside):
        return Enclosure.exact(Fraction(0 if L.compare(x, node.threshold) < 0 else 1))
    if isinstance(node, SwitchAt):
        c = L.compare(x, node.threshold)
        if c < 0:
            return _eval_point(node.left, x, bits, layer)
        if c > 0:
            return _eval_point(node.right, x, bits, layer)
        return L.enclose(node.at_value, bits)
    if isinstance(node, SeriesFun):
        arg = _eval_point(node.arg, x, bits + 8, layer)
        return _series_point(node.kind, arg, node.terms, bits + 8)
    if isinstance(node, TruncatedSum):
        return _truncated_sum(node, L.enclose(x, bits + 16 + 4 * node.terms), bits)
    if isinstance(node, PiecewiseLinear):
        return _piecewise_point(node, x, bits)
    if isinstance(node, LayerGate):
        active = layer is None or layer >= node.min_layer
        return _eval_point(node.inner if active else node.fallback, x, bits, layer)
    raise DomainError(f"unknown node {type(node).__name__}")


def _apply_binop(op: str, a: Enclosure, b: Enclosure) -> Enclosure | None:
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if b.is_exact() and b.low == 0:
            raise ZeroDivisionError
        if b.contains(Fraction(0)):
            return None  # ask the caller to refine
        return a / b
    raise DomainError(f"unknown operator {op!r}")


def _floor_point(arg: Expr, x: LayeredReal, bits: int, layer: int | None) -> Enclosure:
    extra = 8
    for _ in range(_REFINE_STEPS):
        e = _eval_point(arg, x, bits + extra, layer)
        lo, hi = math.floor(e.low), math.floor(e.high)
        if lo == hi:
            return Enclosure.exact(Fraction(lo))
        if e.is_exact():
            break
        extra *= 2
    return Enclosure(Fraction(math.floor(e.low)), Fraction(math.floor(e.high)))


def _sign_point(arg: Expr, x: LayeredReal, bits: int, layer: int | None) -> Enclosure:
    extra = 8
    for _ in range(_REFINE_STEPS):
        e = _eval_point(arg, x, bits + extra, layer)
        if e.low > 0:
            return Enclosure.exact(Fraction(1))
        if e.high < 0:
            return Enclosure.exact(Fraction(-1))
        if e.is_exact():
            return Enclosure.exact(Fraction(0))
        extra *= 2
    return Enclosure(Fraction(-1), Fraction(1))


def _indicator_rational(x: LayeredReal) -> Enclosure:
    if x.exact_fraction() is not None:
        return Enclosure.exact(Fraction(1))
    if isinstance(x.rep, L.Algebraic):
        return Enclosure.exact(Fraction(0))
    if isinstance(x.rep, L.SeriesValue) and x.rep.known_irrational:
        return Enclosure.exact(Fraction(0))
    return Enclosure(Fraction(0), Fraction(1))


def _truncated_sum(node: TruncatedSum, xe: Enclosure, bits: int) -> Enclosure:
    a = node.coeff.exact_fraction()
    b = node.base.exact_fraction()
    if a is None or b is None:
        raise DomainError("truncated sums need rational coefficient and base")
    total = Enclosure.exact(Fraction(0))
    inner_bits = bits + 8 + node.terms.bit_length()
    if node.kind == "weierstrass":
        pi_bits = inner_bits + node.terms * max(1, abs(b.numerator).bit_length())
        pi_e = pi_enclosure(pi_bits)
        for k in range(node.terms + 1):
            arg = (pi_e * xe).scale(b**k)
            term = _series_cos_interval(arg, inner_bits)
            total = total + term.scale(a**k)
        return total
    if node.kind == "takagi":
        for k in range(node.terms + 1):
            t = xe.scale(b**k)
            total = total + _frac_part_range(t).scale(a**k)
        return total
    if node.kind == "fourier":
        pi_e = pi_enclosure(inner_bits + 2 * node.terms.bit_length())
        for k in range(1, node.terms + 1):
            arg = (pi_e * xe).scale(k)
            term = _series_sin_interval(arg, inner_bits)
            total = total + term.scale(a**k)
        return total
    raise DomainError(f"unknown truncated sum kind {node.kind!r}")


def _series_cos_interval(arg: Enclosure, bits: int) -> Enclosure:
    return _series_point("cos", arg, DEFAULT_SERIES_TERMS, bits)


def _series_sin_interval(arg: Enclosure, bits: int) -> Enclosure:
    return _series_point("sin", arg, DEFAULT_SERIES_TERMS, bits)


def _piecewise_point(node: PiecewiseLinear, x: LayeredReal, bits: int) -> Enclosure:
    pts = node.points
    xf = x.exact_fraction()
    if xf is not None:
        if xf <= pts[0][0]:
            return Enclosure.exact(pts[0][1])
        if xf >= pts[-1][0]:
            return Enclosure.exact(pts[-1][1])
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if x0 <= xf <= x1:
                if x0 == x1:
                    return Enclosure.exact(y0)
                return Enclosure.exact(y0 + (y1 - y0) * (xf - x0) / (x1 - x0))
    e = L.enclose(x, bits + 8)
    return _piecewise_range_frac(node, e)


def _piecewise_range_frac(node: PiecewiseLinear, e: Enclosure) -> Enclosure:
    pts = node.points

    def at(v: Fraction) -> Fraction:
        if v <= pts[0][0]:
            return pts[0][1]
        if v >= pts[-1][0]:
            return pts[-1][1]
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if x0 <= v <= x1:
                if x0 == x1:
                    return y0
                return y0 + (y1 - y0) * (v - x0) / (x1 - x0)
        raise AssertionError("unreachable")

    ys = [at(e.low), at(e.high)]
    ys += [y for px, y in pts if e.low <= px <= e.high]
    return Enclosure(min(ys), max(ys))


def evaluate(f: FunctionDescriptor, x: LayeredReal, precision: int,
             layer: int | None = None) -> Enclosure:
    """Enclosure of f(x). Width meets 2^-precision when the expression's
    series budgets allow; a wider answer signals a budget-limited result."""
    _check_domain(f, x)
    return _eval_point(f.expression, x, precision, layer)


def _check_domain(f: FunctionDescriptor, x: LayeredReal) -> None:
    if f.domain_low is not None:
        c = L.compare(x, f.domain_low)
        if c < 0 or (c == 0 and not f.domain_low_closed):
            raise DomainError("input below the function's domain")
    if f.domain_high is not None:
        c = L.compare(x, f.domain_high)
        if c > 0 or (c == 0 and not f.domain_high_closed):
            raise DomainError("input above the function's domain")


# ---------------------------------------------------------------------------
# interval (range) evaluation
# ---------------------------------------------------------------------------


def _eval_range(node: Expr, xe: Enclosure, bits: int, layer: int | None) -> Enclosure:
    if isinstance(node, Const):
        return L.enclose(node.value, bits)
    if isinstance(node, Var):
        return xe
    if isinstance(node, BinOp):
        a = _eval_range(node.left, xe, bits + 8, layer)
        b = _eval_range(node.right, xe, bits + 8, layer)
        if node.op == "/" and b.contains(Fraction(0)):
            raise DomainError("divisor range contains zero")
        out = _apply_binop(node.op, a, b)
        if out is None:
            raise DomainError("divisor range contains zero")
        return out
    if isinstance(node, IntPow):
        return _eval_range(node.base, xe, bits + 8, layer).int_pow(node.power)
    if isinstance(node, RatPow):
        base = _eval_range(node.base, xe, bits + 8, layer)
        return _rat_pow_range(base, node.num, node.den, bits + 8)
    if isinstance(node, Abs):
        return _eval_range(node.arg, xe, bits + 4, layer).abs()
    if isinstance(node, Floor):
        e = _eval_range(node.arg, xe, bits + 8, layer)
        return Enclosure(Fraction(math.floor(e.low)), Fraction(math.floor(e.high)))
    if isinstance(node, Sign):
        e = _eval_range(node.arg, xe, bits + 8, layer)
        if e.low > 0:
            return Enclosure.exact(Fraction(1))
        if e.high < 0:
            return Enclosure.exact(Fraction(-1))
        if e.is_exact():
            return Enclosure.exact(Fraction(0))
        lo = Fraction(-1) if e.low < 0 else Fraction(0)
        hi = Fraction(1) if e.high > 0 else Fraction(0)
        return Enclosure(lo, hi)
    if isinstance(node, IndicatorRational):
        if xe.is_exact() or layer == 0:
            # a degenerate rational interval, or a layer where every
            # visible point is rational anyway
            return Enclosure.exact(Fraction(1))
        return Enclosure(Fraction(0), Fraction(1))
    if isinstance(node, Heaviside):
        lo_cmp = L.compare(L.from_fraction(xe.low), node.threshold)
        if lo_cmp >= 0:
            return Enclosure.exact(Fraction(1))
        hi_cmp = L.compare(L.from_fraction(xe.high), node.threshold)
        if hi_cmp < 0:
            return Enclosure.exact(Fraction(0))
        return Enclosure(Fraction(0), Fraction(1))
    if isinstance(node, SwitchAt):
        hi_cmp = L.compare(L.from_fraction(xe.high), node.threshold)
        if hi_cmp < 0:
            return _eval_range(node.left, xe, bits, layer)
        lo_cmp = L.compare(L.from_fraction(xe.low), node.threshold)
        if lo_cmp > 0:
            return _eval_range(node.right, xe, bits, layer)
        out = _eval_range(node.left, xe, bits, layer)
        out = out.hull(_eval_range(node.right, xe, bits, layer))
        return out.hull(L.enclose(node.at_value, bits))
    if isinstance(node, SeriesFun):
        arg = _eval_range(node.arg, xe, bits + 8, layer)
        return _series_point(node.kind, arg, node.terms, bits + 8)
    if isinstance(node, TruncatedSum):
        return _truncated_sum(node, xe, bits)
    if isinstance(node, PiecewiseLinear):
        return _piecewise_range_frac(node, xe)
    if isinstance(node, LayerGate):
        active = layer is None or layer >= node.min_layer
        return _eval_range(node.inner if active else node.fallback, xe, bits, layer)
    raise DomainError(f"unknown node {type(node).__name__}")


def evaluate_range(f: FunctionDescriptor, xe: Enclosure, precision: int,
                   layer: int | None = None) -> Enclosure:
    """Outer enclosure of f's range over the interval.

    When the expression cannot be enclosed over the interval (a divisor
    through zero, a root of a sign-changing base) and the descriptor
    declares an envelope, the envelope is the answer; otherwise the error
    propagates.
    """
    try:
        return _eval_range(f.expression, xe, precision, layer)
    except DomainError:
        if f.envelope_low is None:
            raise
        return Enclosure(f.envelope_low, f.envelope_high)


def descriptor_rank(f: FunctionDescriptor) -> tuple[int, int]:
    return f.domain_rank, f.codomain_rank

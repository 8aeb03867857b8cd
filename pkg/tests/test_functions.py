"""Tests for expression trees and their enclosure evaluators.

Series values are checked against independent exact-fraction partial sums
with alternating/ratio tail bounds written here, never against the
evaluator's own series code.
"""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strata import functions as F
from strata import layers as L
from strata.enclosure import Enclosure
from strata.errors import BudgetExhaustedError, DomainError

X = F.var()


def sin_oracle(r: Fraction, terms: int = 40) -> tuple[Fraction, Fraction]:
    """Alternating-series bracket for sin(r), valid for |r| <= 1 where the
    terms decrease from the start."""
    assert abs(r) <= 1
    s = Fraction(0)
    for j in range(terms):
        k = 2 * j + 1
        s += Fraction((-1) ** j) * r**k / math.factorial(k)
    tail = abs(r) ** (2 * terms + 1) / math.factorial(2 * terms + 1)
    return s - tail, s + tail


def exp_oracle(r: Fraction, terms: int = 40) -> tuple[Fraction, Fraction]:
    assert abs(r) <= 2
    s = sum(r**j / math.factorial(j) for j in range(terms))
    tail = 2 * abs(r) ** terms / math.factorial(terms)
    return s - tail, s + tail


def bisect_sqrt_oracle(n: int, bits: int) -> tuple[Fraction, Fraction]:
    lo, hi = Fraction(0), Fraction(n + 1)
    while hi - lo > Fraction(1, 2**bits):
        mid = (lo + hi) / 2
        if mid * mid <= n:
            lo = mid
        else:
            hi = mid
    return lo, hi


def descriptor(expr, dom=0, cod=0, **kw) -> F.FunctionDescriptor:
    return F.FunctionDescriptor(expr, dom, cod, **kw)


# ---------------------------------------------------------------------------
# point evaluation
# ---------------------------------------------------------------------------


def test_sin_half_matches_alternating_series_oracle():
    f = descriptor(F.SeriesFun("sin", X), 1, 2)
    e = F.evaluate(f, L.from_fraction(Fraction(1, 2)), 40)
    assert e.width <= Fraction(1, 2**40)
    olo, ohi = sin_oracle(Fraction(1, 2))
    # both brackets contain sin(1/2), so they must overlap
    assert e.low <= ohi and olo <= e.high
    assert e.low <= Fraction(4794255387, 10**10)
    assert Fraction(4794255386, 10**10) <= e.high


def test_weierstrass_at_zero_is_exact_geometric_sum():
    w = descriptor(
        F.TruncatedSum("weierstrass", L.from_fraction(Fraction(1, 2)), L.from_int(3), 10),
        0, 2)
    e = F.evaluate(w, L.from_int(0), 30)
    assert e.is_exact()
    assert e.low == sum(Fraction(1, 2**k) for k in range(11))
    assert e.low == 2 - Fraction(1, 1024)


def test_floor_seven_halves():
    f = descriptor(F.Floor(X), 1, 1)
    e = F.evaluate(f, L.from_fraction(Fraction(7, 2)), 10)
    assert e.is_exact() and e.low == 3


def test_floor_of_negative():
    f = descriptor(F.Floor(X), 1, 1)
    assert F.evaluate(f, L.from_fraction(Fraction(-7, 2)), 10).low == -4


def test_rational_polynomial_is_exact():
    # (3x - 1) * x^2 + 5 at 2/7, straight fraction arithmetic
    expr = F.add(F.mul(F.sub(F.mul(F.const(3), X), F.const(1)), F.IntPow(X, 2)),
                 F.const(5))
    f = descriptor(expr)
    x = Fraction(2, 7)
    e = F.evaluate(f, L.from_fraction(x), 20)
    assert e.is_exact()
    assert e.low == (3 * x - 1) * x**2 + 5


def test_takagi_partial_sum_exact_at_third():
    # fractional parts of 2^k/3 alternate 1/3, 2/3, so the sum telescopes
    # to 2*(1/3 + 1/12 + 1/48 + 1/192) + 1/768 = 227/256 for eight halvings
    t = descriptor(
        F.TruncatedSum("takagi", L.from_fraction(Fraction(1, 2)), L.from_int(2), 8),
        0, 1)
    e = F.evaluate(t, L.from_fraction(Fraction(1, 3)), 30)
    assert e.is_exact() and e.low == Fraction(227, 256)


def test_weierstrass_quarter_against_sqrt2_oracle():
    # 3^k mod 8 alternates 1, 3, so each cosine is +-sqrt(2)/2 and the sum
    # collapses to (sqrt(2)/2) * (1 - (-1/2)^11) / (3/2)
    w = descriptor(
        F.TruncatedSum("weierstrass", L.from_fraction(Fraction(1, 2)), L.from_int(3), 10),
        0, 2)
    e = F.evaluate(w, L.from_fraction(Fraction(1, 4)), 40)
    rlo, rhi = bisect_sqrt_oracle(2, 60)
    factor = (1 + Fraction(1, 2**11)) * Fraction(2, 3) / 2
    assert e.low <= rhi * factor and rlo * factor <= e.high
    assert e.width <= Fraction(1, 2**30)


def test_fourier_partial_sum_at_half():
    # sin(k*pi/2) cycles 1, 0, -1, 0: sum is 1/2 - 1/8 = 3/8
    f = descriptor(
        F.TruncatedSum("fourier", L.from_fraction(Fraction(1, 2)), L.from_int(2), 4),
        0, 2)
    e = F.evaluate(f, L.from_fraction(Fraction(1, 2)), 40)
    assert e.contains(Fraction(3, 8))
    assert e.width <= Fraction(1, 2**20)


def test_exp_half_matches_oracle():
    f = descriptor(F.SeriesFun("exp", X), 2, 3)
    e = F.evaluate(f, L.from_fraction(Fraction(1, 2)), 40)
    olo, ohi = exp_oracle(Fraction(1, 2))
    assert e.low <= ohi and olo <= e.high
    assert e.width <= Fraction(1, 2**40)


def test_sin_large_argument_is_range_reduced():
    f = descriptor(F.SeriesFun("sin", X), 1, 2)
    e = F.evaluate(f, L.from_int(100), 40)
    assert e.width <= Fraction(1, 2**40)
    assert abs(e.midpoint - Fraction(math.sin(100))) < Fraction(1, 10**12)


def test_sqrt_perfect_square_is_exact():
    f = descriptor(F.RatPow(X, 1, 2), 0, 1, domain_low=L.from_int(0))
    e = F.evaluate(f, L.from_fraction(Fraction(9, 16)), 20)
    assert e.is_exact() and e.low == Fraction(3, 4)


def test_sqrt_width_contract():
    f = descriptor(F.RatPow(X, 1, 2), 0, 1, domain_low=L.from_int(0))
    e = F.evaluate(f, L.from_fraction(Fraction(1, 8)), 40)
    assert e.width <= Fraction(1, 2**38)
    assert e.low ** 2 <= Fraction(1, 8) <= e.high ** 2


def test_cube_root_of_negative_is_allowed():
    f = descriptor(F.RatPow(X, 1, 3), 0, 1)
    e = F.evaluate(f, L.from_int(-8), 20)
    assert e.contains(Fraction(-2))


# ---------------------------------------------------------------------------
# jumps decided exactly
# ---------------------------------------------------------------------------


def test_heaviside_with_algebraic_threshold():
    theta = L.combine(L.sqrt_int(2), L.from_int(2), "/")
    h = descriptor(F.Heaviside(theta), 1, 1)
    assert F.evaluate(h, L.from_fraction(Fraction(7, 10)), 20).low == 0
    assert F.evaluate(h, L.from_fraction(Fraction(71, 100)), 20).low == 1
    assert F.evaluate(h, theta, 20).low == 1


def test_switch_pins_the_threshold_value():
    s = F.SwitchAt(L.from_int(0), F.const(-1), F.const(1), L.from_int(5))
    f = descriptor(s, 0, 0)
    assert F.evaluate(f, L.from_fraction(Fraction(-1, 3)), 10).low == -1
    assert F.evaluate(f, L.from_fraction(Fraction(1, 3)), 10).low == 1
    assert F.evaluate(f, L.from_int(0), 10).low == 5


def test_switch_at_never_evaluates_the_sides():
    # 1/x on both sides of zero: only the pinned value is consulted at 0
    recip = F.div(F.const(1), X)
    s = F.SwitchAt(L.from_int(0), recip, recip, L.from_int(0))
    f = descriptor(s, 0, 0)
    assert F.evaluate(f, L.from_int(0), 20).low == 0


def test_sign_of_composite_argument():
    # sign(x^2 - 2) needs refinement near the root but settles fast
    expr = F.Sign(F.sub(F.IntPow(X, 2), F.const(2)))
    f = descriptor(expr, 1, 1)
    assert F.evaluate(f, L.from_fraction(Fraction(3, 2)), 20).low == 1
    assert F.evaluate(f, L.from_fraction(Fraction(7, 5)), 20).low == -1
    assert F.evaluate(f, L.from_int(0), 20).low == -1


def test_indicator_rational_point_values():
    d = descriptor(F.IndicatorRational())
    assert F.evaluate(d, L.from_fraction(Fraction(1, 2)), 10).low == 1
    assert F.evaluate(d, L.sqrt_int(2), 10).high == 0
    assert F.evaluate(d, L.constant("e"), 10).high == 0


# ---------------------------------------------------------------------------
# errors
# ---------------------------------------------------------------------------


def test_division_by_exact_zero():
    f = descriptor(F.div(F.const(1), X))
    with pytest.raises(DomainError):
        F.evaluate(f, L.from_int(0), 20)


def test_division_by_unprovable_zero_exhausts_budget():
    # x^2 - 2 vanishes at sqrt(2) but interval refinement can never prove it
    f = descriptor(F.div(F.const(1), F.sub(F.IntPow(X, 2), F.const(2))), 1, 1)
    with pytest.raises(BudgetExhaustedError):
        F.evaluate(f, L.sqrt_int(2), 20)


def test_even_root_of_negative():
    f = descriptor(F.RatPow(X, 1, 2), 0, 1)
    with pytest.raises(DomainError):
        F.evaluate(f, L.from_int(-1), 20)


def test_domain_bounds_are_enforced():
    f = descriptor(F.RatPow(X, 1, 2), 0, 1,
                   domain_low=L.from_int(0), domain_low_closed=False)
    with pytest.raises(DomainError):
        F.evaluate(f, L.from_int(0), 20)
    with pytest.raises(DomainError):
        F.evaluate(f, L.from_int(-3), 20)


def test_series_budget_floor():
    f = descriptor(F.SeriesFun("sin", X, terms=4), 1, 2)
    with pytest.raises(BudgetExhaustedError):
        F.evaluate(f, L.from_fraction(Fraction(1, 2)), 20)


def test_exp_budget_depends_on_argument():
    f = descriptor(F.SeriesFun("exp", X, terms=8), 2, 3)
    with pytest.raises(BudgetExhaustedError):
        F.evaluate(f, L.from_int(10), 20)


def test_embedded_constant_rank_is_capped():
    with pytest.raises(ValueError):
        F.FunctionDescriptor(F.Heaviside(L.sqrt_int(2)), 0, 0)
    # fine once the declared ranks cover it
    F.FunctionDescriptor(F.Heaviside(L.sqrt_int(2)), 1, 1)


# ---------------------------------------------------------------------------
# observer layers
# ---------------------------------------------------------------------------


def oscillating_pair():
    inner = F.mul(F.IntPow(X, 2), F.SeriesFun("sin", F.div(F.const(1), X)))
    guarded = F.SwitchAt(L.from_int(0), inner, inner, L.from_int(0))
    return descriptor(F.LayerGate(2, guarded, F.const(0)), 2, 3)


def test_layer_gate_substitutes_below_threshold():
    f = oscillating_pair()
    x = L.from_fraction(Fraction(1, 5))
    assert F.evaluate(f, x, 40, layer=1).low == 0
    assert F.evaluate(f, x, 40, layer=0).low == 0
    full = F.evaluate(f, x, 40, layer=2)
    unrestricted = F.evaluate(f, x, 40)
    assert full.low < 0  # sin(5) < 0
    assert unrestricted.low <= full.high and full.low <= unrestricted.high


def test_layer_gate_pinned_origin():
    f = oscillating_pair()
    assert F.evaluate(f, L.from_int(0), 40, layer=2).low == 0


# ---------------------------------------------------------------------------
# range evaluation
# ---------------------------------------------------------------------------


def test_range_of_square_is_tight_on_positive_interval():
    f = descriptor(F.IntPow(X, 2))
    e = F.evaluate_range(f, Enclosure(Fraction(1, 4), Fraction(1, 2)), 20)
    assert e.low == Fraction(1, 16) and e.high == Fraction(1, 4)


def test_range_of_square_through_zero():
    f = descriptor(F.IntPow(X, 2))
    e = F.evaluate_range(f, Enclosure(Fraction(-1, 2), Fraction(1, 4)), 20)
    assert e.low == 0 and e.high == Fraction(1, 4)


def test_range_of_heaviside_across_the_jump():
    theta = L.combine(L.sqrt_int(2), L.from_int(2), "/")
    h = descriptor(F.Heaviside(theta), 1, 1)
    below = F.evaluate_range(h, Enclosure(Fraction(0), Fraction(7, 10)), 20)
    across = F.evaluate_range(h, Enclosure(Fraction(7, 10), Fraction(71, 100)), 20)
    above = F.evaluate_range(h, Enclosure(Fraction(71, 100), Fraction(9, 10)), 20)
    assert (below.low, below.high) == (0, 0)
    assert (across.low, across.high) == (0, 1)
    assert (above.low, above.high) == (1, 1)


def test_range_of_indicator_is_nondegenerate():
    d = descriptor(F.IndicatorRational())
    e = F.evaluate_range(d, Enclosure(Fraction(0), Fraction(1, 8)), 10)
    assert e.low == 0 and e.high == 1


def test_sin_range_stays_in_unit_band():
    f = descriptor(F.SeriesFun("sin", X), 1, 2)
    e = F.evaluate_range(f, Enclosure(Fraction(0), Fraction(7)), 20)
    assert e.low >= -1 and e.high <= 1


def test_range_of_switch_includes_pinned_value():
    s = F.SwitchAt(L.from_int(0), F.const(-1), F.const(1), L.from_int(5))
    f = descriptor(s, 0, 0)
    e = F.evaluate_range(f, Enclosure(Fraction(-1), Fraction(1)), 10)
    assert e.contains(Fraction(5))
    left = F.evaluate_range(f, Enclosure(Fraction(-2), Fraction(-1)), 10)
    assert (left.low, left.high) == (-1, -1)


def test_piecewise_linear_point_and_range():
    steps = F.PiecewiseLinear((
        (Fraction(0), Fraction(0)),
        (Fraction(1, 3), Fraction(1, 2)),
        (Fraction(2, 3), Fraction(1, 2)),
        (Fraction(1), Fraction(1)),
    ))
    f = descriptor(steps)
    assert F.evaluate(f, L.from_fraction(Fraction(1, 2)), 20).low == Fraction(1, 2)
    assert F.evaluate(f, L.from_fraction(Fraction(1, 6)), 20).low == Fraction(1, 4)
    e = F.evaluate_range(f, Enclosure(Fraction(0), Fraction(1)), 20)
    assert e.low == 0 and e.high == 1


# ---------------------------------------------------------------------------
# properties
# ---------------------------------------------------------------------------

rationals = st.fractions(min_value=Fraction(-3), max_value=Fraction(3),
                         max_denominator=64)


@given(x=rationals)
@settings(max_examples=60, deadline=None)
def test_rational_expressions_evaluate_exactly(x):
    expr = F.add(F.mul(F.sub(F.mul(F.const(3), X), F.const(1)), F.IntPow(X, 2)),
                 F.const(5))
    e = F.evaluate(descriptor(expr), L.from_fraction(x), 20)
    assert e.is_exact()
    assert e.low == (3 * x - 1) * x**2 + 5


@given(x=st.fractions(min_value=Fraction(-1), max_value=Fraction(1),
                      max_denominator=32))
@settings(max_examples=40, deadline=None)
def test_sin_always_overlaps_the_oracle_bracket(x):
    f = descriptor(F.SeriesFun("sin", X), 1, 2)
    e = F.evaluate(f, L.from_fraction(x), 40)
    olo, ohi = sin_oracle(x)
    assert e.low <= ohi and olo <= e.high


@given(lo=rationals, hi=rationals, x=st.fractions(min_value=Fraction(0),
                                                  max_value=Fraction(1),
                                                  max_denominator=16))
@settings(max_examples=40, deadline=None)
def test_point_value_lies_in_range_enclosure(lo, hi, x):
    if lo > hi:
        lo, hi = hi, lo
    expr = F.add(F.IntPow(X, 3), F.Abs(F.sub(X, F.const(1))))
    f = descriptor(expr)
    point = lo + (hi - lo) * x
    pe = F.evaluate(f, L.from_fraction(point), 30)
    re = F.evaluate_range(f, Enclosure(lo, hi), 30)
    assert re.low <= pe.low and pe.high <= re.high

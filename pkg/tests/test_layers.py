"""Tests for the layered number kernel.

Expected values for the nontrivial cases come from small independent oracles
defined at the top of this file (integer bisection for square roots, exact
partial sums for series constants), not from the code under test.
"""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strata import layers as L
from strata.enclosure import Enclosure
from strata.errors import BudgetExhaustedError, DemotionError, DomainError


def bisect_sqrt_oracle(n: int, bits: int) -> tuple[Fraction, Fraction]:
    """Integer bisection for sqrt(n): compares p^2 against n*q^2 only."""
    lo, hi = Fraction(0), Fraction(n + 1)
    target = Fraction(1, 2**bits)
    while hi - lo > target:
        mid = (lo + hi) / 2
        if mid * mid <= n:
            lo = mid
        else:
            hi = mid
    return lo, hi


def liouville_partial_oracle(terms: int) -> tuple[Fraction, Fraction]:
    """Exact truncation of sum 10^-(k!) plus a crude geometric tail bound."""
    s = sum(Fraction(1, 10 ** math.factorial(k)) for k in range(1, terms + 1))
    tail = Fraction(2, 10 ** math.factorial(terms + 1))
    return s, tail


def test_classify_rank_basic():
    assert L.classify_rank(L.from_fraction(Fraction(7, 16))) == 0
    assert L.classify_rank(L.from_fraction(Fraction(1, 3))) == 0
    assert L.classify_rank(L.sqrt_int(2)) == 1
    assert L.classify_rank(L.constant("pi")) == 2
    assert L.classify_rank(L.constant("liouville")) == 3


def test_sqrt2_is_the_expected_root():
    s2 = L.sqrt_int(2)
    assert isinstance(s2.rep, L.Algebraic)
    assert s2.rep.coeffs == (-2, 0, 1)
    olo, ohi = bisect_sqrt_oracle(2, 40)
    e = L.enclose(s2, 40)
    assert e.width <= Fraction(1, 2**40)
    # both intervals contain sqrt(2), so they must overlap
    assert e.low <= ohi and olo <= e.high


def test_perfect_square_collapses_to_rational():
    assert L.sqrt_int(9).exact_fraction() == 3


@pytest.mark.parametrize("bits", [10, 20, 53, 100])
def test_enclose_sqrt2_width_contract(bits):
    e = L.enclose(L.sqrt_int(2), bits)
    assert e.width <= Fraction(1, 2**bits)
    assert e.low * e.low <= 2 <= e.high * e.high


def test_enclose_liouville_matches_partial_sum_oracle():
    li = L.constant("liouville")
    s, tail = liouville_partial_oracle(4)
    e = L.enclose(li, 30)
    assert e.width <= Fraction(1, 2**30)
    assert e.low <= s + tail and s <= e.high


def test_enclose_rational_is_exact():
    e = L.enclose(L.from_fraction(Fraction(5, 3)), 10)
    assert e.is_exact() and e.low == Fraction(5, 3)


def test_pi_enclosure_value():
    # oracle: first digits of pi as a decimal literal
    e = L.enclose(L.constant("pi"), 60)
    lo = Fraction(31415926535897932, 10**16)
    hi = Fraction(31415926535897933, 10**16)
    assert lo <= e.high and e.low <= hi


def test_enumerate_layer0_unit_interval():
    budget = L.ComplexityBudget(max_dyadic_exponent=2)
    pts = L.enumerate_layer(0, (L.from_int(0), L.from_int(1)), budget)
    assert [p.exact_fraction() for p in pts] == [
        Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)
    ]


@pytest.mark.parametrize("k", [0, 1, 2, 3, 4, 5, 6])
def test_enumerate_layer0_count_invariant(k):
    budget = L.ComplexityBudget(max_dyadic_exponent=k)
    pts = L.enumerate_layer(0, (L.from_int(0), L.from_int(1)), budget)
    assert len(pts) == 2**k + 1


def test_enumerate_layer1_includes_roots_and_rationals():
    budget = L.ComplexityBudget(max_dyadic_exponent=3, max_poly_degree=2,
                                max_coeff_height=3)
    pts = L.enumerate_layer(1, (L.from_int(1), L.from_int(2)), budget)
    s2, s3 = L.sqrt_int(2), L.sqrt_int(3)
    assert any(L.compare(p, s2) == 0 for p in pts)
    assert any(L.compare(p, s3) == 0 for p in pts)
    # budgeted rationals: denominator and numerator magnitude at most 3
    for v in (Fraction(4, 3), Fraction(3, 2), Fraction(5, 3)):
        present = any(p.exact_fraction() == v for p in pts)
        assert present == (abs(v.numerator) <= 3 and v.denominator <= 3)
    # sorted strictly ascending
    for a, b in zip(pts, pts[1:]):
        assert L.compare(a, b) == -1


def test_enumerate_layer2_includes_catalogue_constants():
    budget = L.ComplexityBudget(max_dyadic_exponent=2, max_poly_degree=2,
                                max_coeff_height=2)
    pts = L.enumerate_layer(2, (L.from_int(0), L.from_int(4)), budget)
    e = L.constant("e")
    pi = L.constant("pi")
    assert any(L.compare(p, e) == 0 for p in pts)
    assert any(L.compare(p, pi) == 0 for p in pts)


def test_enumerate_rejects_high_rank_endpoints():
    budget = L.ComplexityBudget()
    with pytest.raises(DomainError):
        L.enumerate_layer(0, (L.sqrt_int(2), L.from_int(2)), budget)


def test_combine_exact_rational_arithmetic():
    a = L.from_fraction(Fraction(3, 4))
    b = L.from_fraction(Fraction(1, 6))
    assert L.combine(a, b, "+").exact_fraction() == Fraction(11, 12)
    assert L.combine(a, b, "*").exact_fraction() == Fraction(1, 8)
    assert L.combine(a, b, "/").exact_fraction() == Fraction(9, 2)


def test_combine_sqrt2_squared_collapses_to_two():
    s2 = L.sqrt_int(2)
    prod = L.combine(s2, s2, "*")
    assert prod.exact_fraction() == 2
    assert prod.rank == 1  # rank survives arithmetic even after collapse


def test_combine_sqrt2_rational_shift_stays_algebraic():
    s2 = L.sqrt_int(2)
    shifted = L.combine(s2, L.from_int(1), "+")
    assert isinstance(shifted.rep, L.Algebraic)
    e = L.enclose(shifted, 40)
    olo, ohi = bisect_sqrt_oracle(2, 42)
    assert e.low <= ohi + 1 and olo + 1 <= e.high


def test_combine_distinct_algebraics_refines():
    total = L.combine(L.sqrt_int(2), L.sqrt_int(3), "+")
    assert total.rank == 1
    e = L.enclose(total, 50)
    assert e.width <= Fraction(1, 2**50)
    s2lo, s2hi = bisect_sqrt_oracle(2, 52)
    s3lo, s3hi = bisect_sqrt_oracle(3, 52)
    assert e.low <= s2hi + s3hi and s2lo + s3lo <= e.high


def test_combine_sum_of_conjugate_roots_collapses():
    # golden ratio and its reflection 1 - 1/phi = 2 - phi ... use x and (3 - x)
    s2 = L.sqrt_int(2)
    other = L.combine(L.from_int(3), s2, "-")
    total = L.combine(s2, other, "+")
    assert total.exact_fraction() == 3


def test_division_by_zero_raises():
    with pytest.raises(DomainError):
        L.combine(L.from_int(1), L.from_int(0), "/")


def test_zero_test_budget_exhaustion_for_twin_series():
    a = L.combine(L.sqrt_int(2), L.sqrt_int(3), "+")
    b = L.combine(L.sqrt_int(3), L.sqrt_int(2), "+")
    with pytest.raises(BudgetExhaustedError):
        L.compare(a, b, zero_test_bits=64)


def test_promote_and_demotion_guard():
    x = L.from_fraction(Fraction(1, 2))
    up = L.promote(x, 2)
    assert up.rank == 2 and L.classify_rank(up) == 0
    with pytest.raises(DemotionError):
        L.promote(up, 1)


def test_combine_rank_uses_tags():
    x = L.promote(L.from_int(1), 2)
    y = L.from_int(1)
    assert L.combine(x, y, "+").rank == 2


def test_compare_algebraic_rational_exact():
    s2 = L.sqrt_int(2)
    assert L.compare(s2, L.from_fraction(Fraction(3, 2))) == -1
    assert L.compare(s2, L.from_fraction(Fraction(7, 5))) == 1
    assert L.compare(s2, L.sqrt_int(2)) == 0


def test_catalogue_roundtrip(tmp_path):
    path = tmp_path / "consts.txt"
    path.write_text("# demo\nroot7 sqrt 7 1\nq rational 2/7 0\n")
    cat = L.load_catalogue(str(path))
    assert set(cat) == {"root7", "q"}
    assert cat["q"].value.exact_fraction() == Fraction(2, 7)
    e = L.enclose(cat["root7"].value, 30)
    olo, ohi = bisect_sqrt_oracle(7, 32)
    assert e.low <= ohi and olo <= e.high


small_fractions = st.fractions(min_value=-8, max_value=8, max_denominator=64)


@given(small_fractions, small_fractions, st.sampled_from(["+", "-", "*"]))
def test_combine_matches_fraction_arithmetic(a, b, op):
    x, y = L.from_fraction(a), L.from_fraction(b)
    got = L.combine(x, y, op).exact_fraction()
    want = {"+": a + b, "-": a - b, "*": a * b}[op]
    assert got == want


@given(small_fractions, st.integers(min_value=0, max_value=3),
       st.integers(min_value=0, max_value=3))
def test_rank_tag_monotone_under_combine(a, r1, r2):
    x = L.promote(L.from_fraction(a), r1)
    y = L.promote(L.from_int(1), r2)
    z = L.combine(x, y, "+")
    assert z.rank == max(r1, r2)


@given(st.integers(min_value=2, max_value=30), st.integers(min_value=4, max_value=60))
@settings(max_examples=40)
def test_enclosure_soundness_nested_precision(n, bits):
    x = L.sqrt_int(n)
    if x.exact_fraction() is not None:
        return
    coarse = L.enclose(x, bits // 2)
    fine = L.enclose(x, bits)
    assert fine.width <= Fraction(1, 2**bits)
    assert coarse.overlaps(fine)


@given(st.fractions(min_value=-4, max_value=4, max_denominator=1024))
def test_dyadic_canonical_form(v):
    x = L.from_fraction(v)
    if isinstance(x.rep, L.Dyadic):
        assert x.rep.exponent == 0 or x.rep.numerator % 2 == 1
        assert x.rep.as_fraction() == v
    else:
        assert v.denominator & (v.denominator - 1) != 0


def test_enclosure_round_out_is_outward():
    e = Enclosure(Fraction(1, 3), Fraction(2, 3))
    r = e.round_out(8)
    assert r.low <= e.low and e.high <= r.high
    assert r.low.denominator <= 256 and r.high.denominator <= 256

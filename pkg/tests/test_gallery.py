"""Catalogue entries, the recomputed table, threshold scans, jump demo."""

import functools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strata import calculus, gallery
from strata import functions as F
from strata import layers as L
from strata.errors import DomainError


def staircase_oracle(x: Fraction, depth: int) -> Fraction:
    """Ternary-digit recursion, independent of the polyline construction."""
    y = Fraction(0)
    scale = Fraction(1)
    for _ in range(depth):
        if x <= Fraction(1, 3):
            x = 3 * x
            scale /= 2
        elif x >= Fraction(2, 3):
            y += scale / 2
            x = 3 * x - 2
            scale /= 2
        else:
            return y + scale / 2
    return y + scale * x


def stack_oracle(a: Fraction, b: Fraction, K: int, grid) -> float:
    """Float max of |sum a^k b^k pi sin(b^k pi x)| over the grid."""
    best = 0.0
    for x in grid:
        s = sum(float(a**k * b**k) * math.pi * math.sin(float(b**k) * math.pi * float(x))
                for k in range(K + 1))
        best = max(best, abs(s))
    return best


def sqrt2_bounds(digits: int = 24) -> tuple[Fraction, Fraction]:
    lo = math.isqrt(2 * 10 ** (2 * digits))
    return Fraction(lo, 10**digits), Fraction(lo + 1, 10**digits)


@functools.cache
def cached_scan(a_values, b_values, schedule):
    return gallery.weierstrass_threshold_scan(a_values, b_values, schedule)


@functools.cache
def cached_report():
    return gallery.gallery_report()


# ---------------------------------------------------------------------------
# catalogue shape and build validation
# ---------------------------------------------------------------------------


def test_entries_are_unique_and_complete():
    rows = gallery.entries()
    names = [r.name for r in rows]
    assert len(names) == len(set(names))
    assert "x_squared" in names and "chaitin" in names
    by_name = {r.name: r for r in rows}
    assert by_name["chaitin"].descriptor is None
    assert by_name["dirichlet"].declared_level is None
    assert by_name["exp"].declared_level == 2
    assert by_name["exp"].declared_target == 3
    assert by_name["weierstrass"].declared_target == 2
    for r in rows:
        if r.name != "chaitin":
            assert r.descriptor is not None


def test_chaitin_refuses_evaluation():
    with pytest.raises(DomainError):
        gallery.build("chaitin")


def test_unknown_entry_rejected():
    with pytest.raises(DomainError):
        gallery.build("lebesgue")


@pytest.mark.parametrize("params", [
    {"a": Fraction(3, 2)},
    {"a": Fraction(0)},
    {"b": Fraction(-1)},
    {"terms": -1},
    {"wavelength": 3},
])
def test_rough_sum_parameters_validated(params):
    with pytest.raises(DomainError):
        gallery.build("weierstrass", **params)


def test_point_indicator_carries_its_threshold_rank():
    f = gallery.build("point_indicator")
    assert F.descriptor_rank(f) == (1, 1)
    g = gallery.build("point_indicator", theta=L.constant("e"))
    assert F.descriptor_rank(g) == (2, 2)


def test_liouville_constant_entry_rank():
    f = gallery.build("liouville_constant")
    assert F.descriptor_rank(f)[1] == 3


# ---------------------------------------------------------------------------
# the staircase
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("depth", [0, 1, 2, 3, 4])
def test_staircase_breakpoint_count(depth):
    f = gallery.cantor_function(depth)
    points = f.expression.points
    assert len(points) == 2 ** (depth + 1)
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    assert xs == sorted(xs)
    assert ys == sorted(ys)
    assert points[0] == (0, 0) and points[-1] == (1, 1)


def test_staircase_depth_one_values():
    f = gallery.cantor_function(1)
    assert f.expression.points == (
        (Fraction(0), Fraction(0)), (Fraction(1, 3), Fraction(1, 2)),
        (Fraction(2, 3), Fraction(1, 2)), (Fraction(1), Fraction(1)))


@settings(max_examples=30, deadline=None)
@given(st.fractions(min_value=0, max_value=1, max_denominator=81),
       st.integers(min_value=0, max_value=4))
def test_staircase_matches_ternary_recursion(x, depth):
    f = gallery.cantor_function(depth)
    e = gallery.evaluate(f, L.from_fraction(x), 48)
    want = staircase_oracle(x, depth)
    assert e.low <= want <= e.high
    assert e.width <= Fraction(1, 2**40)


def test_staircase_flat_on_removed_middle():
    f = gallery.cantor_function(4)
    r = calculus.fractal_derivative(f, L.from_fraction(Fraction(1, 2)), 0)
    assert r.status == "converged"
    assert r.value.low <= 0 <= r.value.high
    assert r.value.width <= Fraction(1, 2**18)


def test_staircase_rejects_negative_depth():
    with pytest.raises(DomainError):
        gallery.cantor_function(-1)


# ---------------------------------------------------------------------------
# pointwise agreement with float oracles
# ---------------------------------------------------------------------------


@settings(max_examples=25, deadline=None)
@given(st.fractions(min_value=-1, max_value=1, max_denominator=64))
def test_x_squared_agrees_with_oracle(x):
    f = gallery.build("x_squared")
    e = gallery.evaluate(f, L.from_fraction(x), 48)
    assert e.low <= x * x <= e.high


@settings(max_examples=25, deadline=None)
@given(st.fractions(min_value=-3, max_value=3, max_denominator=64))
def test_floor_sign_heaviside_agree_with_oracle(x):
    probes = {
        "floor": Fraction(math.floor(x)),
        "sign": Fraction(0 if x == 0 else (1 if x > 0 else -1)),
        "heaviside": Fraction(0 if x < 0 else 1),
    }
    for name, want in probes.items():
        e = gallery.evaluate(gallery.build(name), L.from_fraction(x), 48)
        assert e.low <= want <= e.high, name
        assert e.width == 0, name


@settings(max_examples=20, deadline=None)
@given(st.fractions(min_value=0, max_value=1, max_denominator=48))
def test_dirichlet_sees_one_at_every_rational(x):
    e = gallery.evaluate(gallery.build("dirichlet"), L.from_fraction(x), 32)
    assert e.low == e.high == 1


@settings(max_examples=12, deadline=None)
@given(st.fractions(min_value=-1, max_value=1, max_denominator=32),
       st.integers(min_value=0, max_value=8))
def test_rough_cosine_stack_agrees_with_oracle(x, terms):
    f = gallery.build("weierstrass", terms=terms)
    e = gallery.evaluate(f, L.from_fraction(x), 64)
    want = sum(0.5**k * math.cos(3**k * math.pi * float(x))
               for k in range(terms + 1))
    assert float(e.low) - 1e-7 <= want <= float(e.high) + 1e-7
    assert e.width < Fraction(1, 2**20)


@pytest.mark.parametrize("terms", [0, 1, 4, 9])
def test_rough_cosine_stack_exact_at_zero(terms):
    f = gallery.build("weierstrass", terms=terms)
    e = gallery.evaluate(f, L.from_int(0), 64)
    want = (1 - Fraction(1, 2) ** (terms + 1)) / (1 - Fraction(1, 2))
    assert e.low <= want <= e.high
    assert e.width < Fraction(1, 2**30)


# ---------------------------------------------------------------------------
# threshold scan
# ---------------------------------------------------------------------------


def test_scan_matches_float_oracle():
    rows = cached_scan((Fraction(1, 2),), (Fraction(3),), (3, 4, 5, 6, 7))
    row = rows[0]
    for K, m in zip((3, 4, 5, 6, 7), row.maxima):
        want = stack_oracle(Fraction(1, 2), Fraction(3), K, gallery._SCAN_GRID)
        assert abs(float(m) - want) <= 1e-6 * max(1.0, want)


def test_scan_supercritical_ratio_tracks_ab():
    rows = cached_scan((Fraction(1, 2),), (Fraction(3),), (3, 4, 5, 6, 7))
    row = rows[0]
    assert row.classification == "growing"
    assert row.classical_prediction == "growing"
    assert not row.discrepancy
    assert abs(row.ratio - 1.5) <= 0.075
    assert row.geometric_bound is None
    assert all(x < y for x, y in zip(row.maxima, row.maxima[1:]))


def test_scan_subcritical_is_bounded_below_both_thresholds():
    rows = cached_scan((Fraction(3, 8),), (Fraction(1),), (3, 4, 5, 6, 7))
    row = rows[0]
    assert row.classification == "bounded"
    assert row.paper_prediction == "bounded"
    assert not row.discrepancy
    assert max(row.maxima) <= row.geometric_bound


def test_scan_critical_point_is_the_recorded_disagreement():
    rows = cached_scan((Fraction(1, 2),), (Fraction(1),), (3, 4, 5, 6, 7))
    row = rows[0]
    assert row.ab == Fraction(1, 2)
    assert row.classification == "bounded"
    assert row.paper_prediction == "growing"
    assert row.discrepancy
    assert max(row.maxima) <= row.geometric_bound


def test_scan_schedule_validated():
    with pytest.raises(DomainError):
        gallery.weierstrass_threshold_scan((Fraction(1, 2),), (Fraction(3),), (3, 4))
    with pytest.raises(DomainError):
        gallery.weierstrass_threshold_scan((Fraction(1, 2),), (Fraction(3),), (3, 5, 5))


# ---------------------------------------------------------------------------
# table reproduction
# ---------------------------------------------------------------------------


def test_report_rows_cover_the_catalogue_in_order():
    rows = cached_report()
    assert [r.name for r in rows] == [e.name for e in gallery.entries()]


def test_report_agrees_with_every_declared_row():
    for row in cached_report():
        if row.name == "chaitin":
            assert row.verdict == "recorded"
            assert row.error == "refuses evaluation"
        else:
            assert row.verdict == "agrees", (row.name, row.computed, row.error)
            assert row.error is None


def test_report_weierstrass_row_measures_growth():
    row = next(r for r in cached_report() if r.name == "weierstrass")
    assert "growing" in row.computed


# ---------------------------------------------------------------------------
# layer-jump demonstration
# ---------------------------------------------------------------------------


def test_jump_invisible_below_threshold_rank():
    theta = L.constant("sqrt2_over_2")
    rows = gallery.definability_jump_demo(theta, range(0, 3))
    assert [r.layer for r in rows] == [0, 1, 2]
    assert not rows[0].representable and not rows[0].jump_visible
    assert rows[0].witness is None
    assert "no point this layer names" in rows[0].note
    for r in rows[1:]:
        assert r.representable and r.jump_visible
        assert r.witness is not None
    lo, hi = sqrt2_bounds()
    want_lo, want_hi = 1 - hi / 2, 1 - lo / 2
    for r in rows:
        assert r.integral is not None
        assert r.integral.low <= want_lo and want_hi <= r.integral.high


def test_jump_at_rational_threshold_visible_everywhere():
    rows = gallery.definability_jump_demo(L.from_fraction(Fraction(1, 2)),
                                          range(0, 2))
    for r in rows:
        assert r.representable and r.jump_visible
        assert r.integral.low <= Fraction(1, 2) <= r.integral.high


def test_point_indicator_invisible_at_ground_layer():
    f = gallery.build("point_indicator")
    for p in (Fraction(45, 64), Fraction(3, 4)):
        delta, witness = calculus.continuity_check(f, L.from_fraction(p), 0,
                                                   Fraction(1, 64))
        assert delta is not None and witness is None
    delta, witness = calculus.continuity_check(f, L.constant("sqrt2_over_2"),
                                               1, Fraction(1, 64))
    assert delta is None and witness is not None

"""Balls, local point types, syntactic covers, and compactness checks.

Everything is budget-relative: a "ball" is the finite list of budgeted
layer points near a center, and a cover is a finite list of intervals
whose endpoints are admissible at the cover's layer. Admissible means
rank at most the layer; a set's own defining endpoints are always
admissible, while foreign points of higher rank must be bracketed by
the budget's dyadic grid.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from math import ceil

from . import layers as L
from . import sets as S
from .errors import CoverFailureError, DomainError
from .layers import ComplexityBudget, LayeredReal


@dataclass(frozen=True)
class Ball:
    center: LayeredReal
    radius: Fraction
    layer: int

    def __post_init__(self):
        if self.radius <= 0:
            raise DomainError("ball radius must be positive")
        if self.center.rank > self.layer:
            raise DomainError("ball center outranks its layer")


@dataclass(frozen=True)
class LocalType:
    tag: str  # isolated | dense | one_sided_gap_left | one_sided_gap_right


@dataclass(frozen=True)
class SyntacticCover:
    layer: int
    intervals: tuple[tuple[LayeredReal, LayeredReal], ...]
    budget: ComplexityBudget

    def __post_init__(self):
        for lo, hi in self.intervals:
            if lo.rank > self.layer or hi.rank > self.layer:
                raise DomainError("cover endpoint outranks the cover layer")
            if L.compare(lo, hi) >= 0:
                raise DomainError("cover interval is empty")

    def total_length(self) -> LayeredReal:
        total = L.from_int(0)
        for lo, hi in self.intervals:
            total = L.combine(total, L.combine(hi, lo, "-"), "+")
        return total


@dataclass(frozen=True)
class CompactnessReport:
    covered: bool
    subcover_indices: tuple[int, ...]
    uncovered_witness: LayeredReal | None


def snap_down(x: LayeredReal, exponent: int) -> LayeredReal:
    """Largest dyadic multiple of 2^-exponent that is <= x."""
    scale = 1 << exponent
    f = x.exact_fraction()
    if f is not None:
        return L.from_fraction(Fraction((f.numerator * scale) // f.denominator, scale))
    e = L.enclose(x, exponent + 8)
    g = Fraction((e.low.numerator * scale) // e.low.denominator, scale)
    step = Fraction(1, scale)
    while L.compare(L.from_fraction(g + step), x) <= 0:
        g += step
    return L.from_fraction(g)


def snap_up(x: LayeredReal, exponent: int) -> LayeredReal:
    scale = 1 << exponent
    f = x.exact_fraction()
    if f is not None:
        return L.from_fraction(Fraction(-((-f.numerator * scale) // f.denominator), scale))
    e = L.enclose(x, exponent + 8)
    g = Fraction(-((-e.high.numerator * scale) // e.high.denominator), scale)
    step = Fraction(1, scale)
    while L.compare(L.from_fraction(g - step), x) >= 0:
        g -= step
    return L.from_fraction(g)


def ball_points(b: Ball, budget: ComplexityBudget) -> list[LayeredReal]:
    """All budgeted layer points strictly within radius of the center,
    the center included whether or not the budget would enumerate it."""
    lo = L.combine(b.center, L.from_fraction(b.radius), "-")
    hi = L.combine(b.center, L.from_fraction(b.radius), "+")
    inside = [p for p in L.enumerate_layer(b.layer, (lo, hi), budget)
              if L.compare(p, lo) > 0 and L.compare(p, hi) < 0]
    if not any(L.compare(p, b.center) == 0 for p in inside):
        inside.append(b.center)
        inside.sort(key=cmp_to_key(L.compare))
    return inside


def local_type(x: LayeredReal, layer: int, delta: Fraction,
               budget: ComplexityBudget, *,
               domain: tuple[LayeredReal, LayeredReal] | None = None) -> LocalType:
    """Classify x by which sides of it carry budgeted layer points
    within delta (clipped to the ambient domain when one is given)."""
    if delta <= 0:
        raise DomainError("delta must be positive")
    lo = L.combine(x, L.from_fraction(delta), "-")
    hi = L.combine(x, L.from_fraction(delta), "+")
    if domain is not None:
        dlo, dhi = domain
        if L.compare(lo, dlo) < 0:
            lo = dlo
        if L.compare(hi, dhi) > 0:
            hi = dhi
    # enumerate over a rational bracket so endpoint ranks never block us
    rlo = snap_down(lo, budget.max_dyadic_exponent + 4)
    rhi = snap_up(hi, budget.max_dyadic_exponent + 4)
    nearby = L.enumerate_layer(layer, (rlo, rhi), budget)
    left = [p for p in nearby if L.compare(p, lo) > 0 and L.compare(p, x) < 0]
    right = [p for p in nearby if L.compare(p, x) > 0 and L.compare(p, hi) < 0]
    if not left and not right:
        return LocalType("isolated")
    if left and right:
        return LocalType("dense")
    return LocalType("one_sided_gap_left" if not left else "one_sided_gap_right")


def _chop(lo: LayeredReal, hi: LayeredReal, eps: Fraction):
    """Partition [lo, hi] into equal chunks of length <= eps by exact
    arithmetic on the endpoints."""
    length = L.combine(hi, lo, "-")
    width = L.enclose(length, 24)
    pieces = max(1, ceil(width.high / eps))
    while True:
        step = L.combine(length, L.from_int(pieces), "/")
        over = L.enclose(step, 24).low > eps
        if not over:
            break
        pieces += 1
    cuts = [lo]
    for i in range(1, pieces):
        frac = Fraction(i, pieces)
        cuts.append(L.combine(lo, L.combine(length, L.from_fraction(frac), "*"), "+"))
    cuts.append(hi)
    return list(zip(cuts, cuts[1:]))


def build_cover(k_set: S.SetDescriptor, layer: int, eps: Fraction,
                budget: ComplexityBudget) -> SyntacticCover:
    """Greedy left-to-right cover of the set by intervals of length <= eps
    with admissible endpoints. Chunks partition each component exactly, so
    for interval unions the total length equals the set's own length, which
    is minimal."""
    if eps <= 0:
        raise DomainError("eps must be positive")
    intervals, points = S.components(k_set)
    intervals, points = S.merge_components(intervals, points)
    grid = budget.max_dyadic_exponent
    spacing = Fraction(1, 1 << grid)
    out: list[tuple[LayeredReal, LayeredReal]] = []
    for lo, hi in intervals:
        if lo.rank > layer:
            lo = snap_down(lo, grid)
        if hi.rank > layer:
            hi = snap_up(hi, grid)
        out.extend(_chop(lo, hi, eps))
    half = Fraction(eps, 2)
    for p in points:
        if p.rank <= layer:
            lo = L.combine(p, L.from_fraction(half), "-")
            hi = L.combine(p, L.from_fraction(half), "+")
        else:
            if spacing > eps:
                raise CoverFailureError(
                    "point outranks the layer and the budget grid is coarser "
                    "than eps", witness=p)
            lo, hi = snap_down(p, grid), snap_up(p, grid)
            if L.compare(lo, hi) == 0:
                hi = L.combine(hi, L.from_fraction(spacing), "+")
        out.append((lo, hi))
    out.sort(key=cmp_to_key(lambda a, b: L.compare(a[0], b[0])))
    return SyntacticCover(layer, tuple(out), budget)


def _distance_to(p: LayeredReal, lo: LayeredReal, hi: LayeredReal) -> LayeredReal:
    if L.compare(p, lo) < 0:
        return L.combine(lo, p, "-")
    if L.compare(p, hi) > 0:
        return L.combine(p, hi, "-")
    return L.from_int(0)


def finite_subcover(cover: SyntacticCover, k_set: S.SetDescriptor,
                    budget: ComplexityBudget) -> CompactnessReport:
    """Check the budgeted enumeration of the set against the cover and,
    when covered, extract a minimum-cardinality subcover by the classic
    interval-stabbing sweep (ties broken toward the lowest index)."""
    pts = S.enumerate_points(k_set, budget)
    membership: list[list[int]] = []
    uncovered: list[LayeredReal] = []
    for p in pts:
        holders = [i for i, (lo, hi) in enumerate(cover.intervals)
                   if L.compare(lo, p) <= 0 and L.compare(p, hi) <= 0]
        membership.append(holders)
        if not holders:
            uncovered.append(p)
    if uncovered:
        if not cover.intervals:
            return CompactnessReport(False, (), uncovered[0])

        def nearest(p):
            return min((_distance_to(p, lo, hi) for lo, hi in cover.intervals),
                       key=cmp_to_key(L.compare))

        witness = max(uncovered,
                      key=cmp_to_key(lambda a, b: L.compare(nearest(a), nearest(b))))
        return CompactnessReport(False, (), witness)
    chosen: list[int] = []
    i = 0
    while i < len(pts):
        best = None
        for idx in membership[i]:
            hi = cover.intervals[idx][1]
            if best is None or L.compare(hi, cover.intervals[best][1]) > 0:
                best = idx
        chosen.append(best)
        limit = cover.intervals[best][1]
        while i < len(pts) and L.compare(pts[i], limit) <= 0:
            i += 1
    return CompactnessReport(True, tuple(sorted(set(chosen))), None)

"""Covering entropy and log-log dimension estimates for definable sets.

Cover counts are computed by a greedy left-to-right sweep in exact
rational arithmetic, which is minimal for closed 1-D sets, so profiles
over power-law schedules come out exactly collinear where the geometry
says they should. Dimension is the least-squares slope of ln(count)
against ln(1/eps), and because a finite profile cannot exhibit a liminf,
the estimate also carries the min and max slope over trailing windows as
an honest spread.

Graphs are box-counted on an origin-anchored square grid, one column at
a time, counting every box the column's range enclosure touches. That is
an outer count: enclosure slack can only add boxes, never hide one.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from . import functions as F
from . import layers as L
from . import sets
from .enclosure import Enclosure
from .errors import BudgetExhaustedError, DomainError
from .functions import FunctionDescriptor
from .layers import ComplexityBudget, LayeredReal
from .sets import GraphSet, SetDescriptor

__all__ = [
    "EntropyProfile",
    "DimensionEstimate",
    "covering_entropy",
    "dimension_estimate",
    "graph_dimension",
]

_DEFAULT_BUDGET = ComplexityBudget()


@dataclass(frozen=True)
class EntropyProfile:
    points: tuple[tuple[Fraction, int, float], ...]  # (eps, count, ln count)
    layer: int
    skipped_columns: int = 0

    def __post_init__(self):
        epss = [eps for eps, _, _ in self.points]
        counts = [c for _, c, _ in self.points]
        if any(a <= b for a, b in zip(epss, epss[1:])):
            raise ValueError("entropy schedule must strictly decrease")
        if any(a > b for a, b in zip(counts, counts[1:])):
            raise ValueError("cover counts cannot drop as eps shrinks")


@dataclass(frozen=True)
class DimensionEstimate:
    slope: float
    slope_ci: tuple[float, float]  # min/max slope over trailing windows
    profile: EntropyProfile


def _ceil_div(amount: Fraction, eps: Fraction) -> int:
    q = amount / eps
    return max(1, -((-q.numerator) // q.denominator))


def _rational_spans(K: SetDescriptor, n: int, bits: int):
    """Merged components as rational spans, snapping outward when an
    endpoint has no exact value at any rank the sweep could use."""
    intervals, points = sets.components(K)
    intervals, points = sets.merge_components(intervals, points)
    spans: list[tuple[Fraction, Fraction]] = []
    for lo, hi in intervals:
        flo, fhi = lo.exact_fraction(), hi.exact_fraction()
        if flo is None:
            flo = L.enclose(lo, bits).low
        if fhi is None:
            fhi = L.enclose(hi, bits).high
        spans.append((flo, fhi))
    for p in points:
        fp = p.exact_fraction()
        if fp is None:
            e = L.enclose(p, bits)
            spans.append((e.low, e.high))
        else:
            spans.append((fp, fp))
    return sorted(spans)


def covering_entropy(K: SetDescriptor, n: int, eps: Fraction,
                     budget: ComplexityBudget | None = None) -> tuple[int, float]:
    """Minimal count of diameter-eps intervals covering K, with ln(count).

    The greedy sweep anchors each new interval at the leftmost uncovered
    coordinate, which is optimal on the line. Graph descriptors are
    box-counted on the plane instead; there the count is an outer bound.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise DomainError("covering scale must be positive")
    if budget is None:
        budget = _DEFAULT_BUDGET
    bits = max(32, budget.max_dyadic_exponent + 8)
    if isinstance(K, GraphSet):
        f = FunctionDescriptor(K.func, K.layer, K.layer, K.low, K.high)
        count, _ = _graph_box_count(f, (K.low, K.high), n, eps, bits)
        return count, math.log(count)

    count = 0
    covered_to: Fraction | None = None
    for lo, hi in _rational_spans(K, n, bits):
        if covered_to is None or lo > covered_to:
            k = _ceil_div(hi - lo, eps) if hi > lo else 1
            covered_to = lo + k * eps
            count += k
        elif hi > covered_to:
            k = _ceil_div(hi - covered_to, eps)
            covered_to += k * eps
            count += k
    return count, math.log(count) if count else 0.0


def _slope(points) -> float:
    ts = [-math.log(eps) for eps, _, _ in points]
    hs = [h for _, _, h in points]
    t_bar = sum(ts) / len(ts)
    h_bar = sum(hs) / len(hs)
    denom = sum((t - t_bar) ** 2 for t in ts)
    if denom == 0:
        raise DomainError("entropy schedule collapsed to a single scale")
    return sum((t - t_bar) * (h - h_bar) for t, h in zip(ts, hs)) / denom


def _estimate_from_profile(profile: EntropyProfile) -> DimensionEstimate:
    if len(profile.points) < 4:
        raise DomainError(
            f"only {len(profile.points)} entropy points resolved; "
            "a dimension estimate needs at least 4")
    slopes = [_slope(profile.points[j:])
              for j in range(len(profile.points) - 2)]
    return DimensionEstimate(_slope(profile.points),
                             (min(slopes), max(slopes)), profile)


def dimension_estimate(K: SetDescriptor, n: int, eps_schedule,
                       budget: ComplexityBudget | None = None) -> DimensionEstimate:
    """Least-squares slope of the entropy profile over eps_schedule.

    slope_ci is the min/max slope over trailing windows of length >= 3,
    standing in for the limit-infimum a finite profile cannot reach.
    """
    schedule = [Fraction(e) for e in eps_schedule]
    if any(a <= b for a, b in zip(schedule, schedule[1:])):
        raise DomainError("eps schedule must strictly decrease")
    pts = []
    for eps in schedule:
        try:
            count, entropy = covering_entropy(K, n, eps, budget)
        except BudgetExhaustedError:
            continue
        pts.append((eps, count, entropy))
    return _estimate_from_profile(EntropyProfile(tuple(pts), n))


# ---------------------------------------------------------------------------
# graphs
# ---------------------------------------------------------------------------


def _graph_box_count(f: FunctionDescriptor, interval, n: int, eps: Fraction,
                     bits: int) -> tuple[int, int]:
    """Boxes of side eps touched by the graph, column by column.

    Returns (count, skipped_columns); a column whose range cannot be
    enclosed at all is skipped rather than guessed.
    """
    a, b = interval
    af, bf = a.exact_fraction(), b.exact_fraction()
    if af is None or bf is None or af >= bf:
        raise DomainError("graph box counting needs exact ordered endpoints")
    first = af.numerator * eps.denominator // (af.denominator * eps.numerator)
    count = 0
    skipped = 0
    i = first
    while i * eps < bf:
        lo = max(af, i * eps)
        hi = min(bf, (i + 1) * eps)
        try:
            ye = F.evaluate_range(f, Enclosure(lo, hi), bits, layer=n)
        except (DomainError, BudgetExhaustedError):
            skipped += 1
            i += 1
            continue
        j_lo = ye.low.numerator * eps.denominator // (ye.low.denominator * eps.numerator)
        j_hi = ye.high.numerator * eps.denominator // (ye.high.denominator * eps.numerator)
        count += j_hi - j_lo + 1
        i += 1
    if count == 0:
        raise BudgetExhaustedError("every graph column failed to enclose")
    return count, skipped


def graph_dimension(f: FunctionDescriptor, interval, n: int, eps_schedule,
                    budget: ComplexityBudget | None = None) -> DimensionEstimate:
    """Box-counting dimension estimate for the graph of f over interval."""
    if budget is None:
        budget = _DEFAULT_BUDGET
    bits = max(32, budget.max_dyadic_exponent + 8)
    schedule = [Fraction(e) for e in eps_schedule]
    if any(a <= b for a, b in zip(schedule, schedule[1:])):
        raise DomainError("eps schedule must strictly decrease")
    pts = []
    skipped_total = 0
    for eps in schedule:
        try:
            count, skipped = _graph_box_count(f, interval, n, eps, bits)
        except BudgetExhaustedError:
            continue
        skipped_total += skipped
        pts.append((eps, count, math.log(count)))
    return _estimate_from_profile(
        EntropyProfile(tuple(pts), n, skipped_columns=skipped_total))

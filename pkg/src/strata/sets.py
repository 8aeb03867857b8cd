"""Describable subsets of the line: intervals, Cantor approximants, finite
point lists, function graphs, and finite unions of these.

A descriptor records exact defining data plus the layer it is pitched at.
Nothing here is a "set of reals" in the naive sense; every query about a
descriptor goes through either its exact components or a budgeted point
enumeration.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key

from . import layers as L
from .errors import DomainError
from .layers import ComplexityBudget, LayeredReal


@dataclass(frozen=True)
class IntervalSet:
    low: LayeredReal
    high: LayeredReal
    closed_low: bool = True
    closed_high: bool = True
    layer: int = 0


@dataclass(frozen=True)
class CantorSet:
    """Middle-thirds approximant: 2^depth closed intervals of length 3^-depth."""

    depth: int
    layer: int = 0


@dataclass(frozen=True)
class FiniteSet:
    points: tuple[LayeredReal, ...]
    layer: int = 0


@dataclass(frozen=True)
class GraphSet:
    """Graph of a function over [low, high]; func is an expression tree."""

    func: object
    low: LayeredReal
    high: LayeredReal
    layer: int = 0


@dataclass(frozen=True)
class UnionSet:
    parts: tuple["SetDescriptor", ...]
    layer: int = 0


SetDescriptor = IntervalSet | CantorSet | FiniteSet | GraphSet | UnionSet


def interval_set(low: LayeredReal, high: LayeredReal, *, closed_low: bool = True,
                 closed_high: bool = True, layer: int | None = None) -> IntervalSet:
    if L.compare(low, high) > 0:
        raise DomainError("interval endpoints out of order")
    if layer is None:
        layer = max(low.rank, high.rank)
    return IntervalSet(low, high, closed_low, closed_high, layer)


def cantor_approximant(depth: int, layer: int = 0) -> CantorSet:
    if depth < 0:
        raise DomainError("cantor depth must be nonnegative")
    return CantorSet(depth, layer)


def finite_set(points, layer: int | None = None) -> FiniteSet:
    pts = tuple(points)
    if layer is None:
        layer = max((p.rank for p in pts), default=0)
    return FiniteSet(pts, layer)


def union_set(parts, layer: int | None = None) -> UnionSet:
    parts = tuple(parts)
    if layer is None:
        layer = max((set_layer(p) for p in parts), default=0)
    return UnionSet(parts, layer)


def set_layer(s: SetDescriptor) -> int:
    return s.layer


def cantor_components(depth: int) -> list[tuple[Fraction, Fraction]]:
    comps = [(Fraction(0), Fraction(1))]
    for _ in range(depth):
        nxt = []
        for lo, hi in comps:
            third = (hi - lo) / 3
            nxt.append((lo, lo + third))
            nxt.append((hi - third, hi))
        comps = nxt
    return comps


def components(s: SetDescriptor) -> tuple[list[tuple[LayeredReal, LayeredReal]], list[LayeredReal]]:
    """Exact structural view: closed intervals plus isolated points.

    Openness flags are dropped here on purpose; covering and measure are
    insensitive to individual endpoints. Graph descriptors have no 1-D
    component view and are rejected.
    """
    if isinstance(s, IntervalSet):
        if L.compare(s.low, s.high) == 0:
            return [], [s.low]
        return [(s.low, s.high)], []
    if isinstance(s, CantorSet):
        comps = [(L.from_fraction(lo), L.from_fraction(hi))
                 for lo, hi in cantor_components(s.depth)]
        return comps, []
    if isinstance(s, FiniteSet):
        return [], sorted(s.points, key=cmp_to_key(L.compare))
    if isinstance(s, UnionSet):
        intervals, points = [], []
        for part in s.parts:
            sub_i, sub_p = components(part)
            intervals.extend(sub_i)
            points.extend(sub_p)
        return merge_components(intervals, points)
    raise DomainError(f"no interval decomposition for {type(s).__name__}")


def merge_components(intervals, points):
    """Sort, merge overlapping intervals, and absorb interior points."""
    intervals = sorted(intervals, key=cmp_to_key(lambda a, b: L.compare(a[0], b[0])))
    merged: list[tuple[LayeredReal, LayeredReal]] = []
    for lo, hi in intervals:
        if merged and L.compare(lo, merged[-1][1]) <= 0:
            prev_lo, prev_hi = merged[-1]
            if L.compare(hi, prev_hi) > 0:
                merged[-1] = (prev_lo, hi)
        else:
            merged.append((lo, hi))
    outside = []
    for p in points:
        inside = any(L.compare(lo, p) <= 0 and L.compare(p, hi) <= 0
                     for lo, hi in merged)
        if not inside and not any(L.compare(p, q) == 0 for q in outside):
            outside.append(p)
    outside.sort(key=cmp_to_key(L.compare))
    return merged, outside


def bounds(s: SetDescriptor) -> tuple[LayeredReal, LayeredReal]:
    if isinstance(s, GraphSet):
        return s.low, s.high
    intervals, points = components(s)
    candidates_lo = [iv[0] for iv in intervals] + points
    candidates_hi = [iv[1] for iv in intervals] + points
    if not candidates_lo:
        raise DomainError("empty set has no bounds")
    lo = min(candidates_lo, key=cmp_to_key(L.compare))
    hi = max(candidates_hi, key=cmp_to_key(L.compare))
    return lo, hi


def is_empty(s: SetDescriptor) -> bool:
    if isinstance(s, FiniteSet):
        return not s.points
    if isinstance(s, UnionSet):
        return all(is_empty(p) for p in s.parts)
    return False


def enumerate_points(s: SetDescriptor, budget: ComplexityBudget) -> list[LayeredReal]:
    """Budgeted stand-in for the set: layer points inside it plus its own
    defining endpoints (which are admissible data whatever the budget says)."""
    if isinstance(s, GraphSet):
        raise DomainError("graph sets have no 1-D point enumeration")
    layer = set_layer(s)
    intervals, points = components(s)
    out = list(points)
    for lo, hi in intervals:
        out.append(lo)
        out.append(hi)
        if lo.rank <= layer and hi.rank <= layer:
            out.extend(L.enumerate_layer(layer, (lo, hi), budget))
    if isinstance(s, IntervalSet):
        if not s.closed_low:
            out = [p for p in out if L.compare(p, s.low) != 0]
        if not s.closed_high:
            out = [p for p in out if L.compare(p, s.high) != 0]
    dedup: list[LayeredReal] = []
    for p in sorted(out, key=cmp_to_key(L.compare)):
        if not dedup or L.compare(dedup[-1], p) != 0:
            dedup.append(p)
    return dedup


def descriptor_payload(s: SetDescriptor, bits: int = 48) -> dict:
    if isinstance(s, IntervalSet):
        return {"kind": "interval", "layer": s.layer,
                "low": L.value_payload(s.low, bits),
                "high": L.value_payload(s.high, bits),
                "closed_low": s.closed_low, "closed_high": s.closed_high}
    if isinstance(s, CantorSet):
        return {"kind": "cantor", "layer": s.layer, "depth": s.depth}
    if isinstance(s, FiniteSet):
        return {"kind": "finite", "layer": s.layer,
                "points": [L.value_payload(p, bits) for p in s.points]}
    if isinstance(s, UnionSet):
        return {"kind": "union", "layer": s.layer,
                "parts": [descriptor_payload(p, bits) for p in s.parts]}
    return {"kind": "graph", "layer": s.layer,
            "low": L.value_payload(s.low, bits),
            "high": L.value_payload(s.high, bits)}

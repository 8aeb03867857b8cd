"""Catalogue of worked functions, table reproduction, and threshold scans.

Every entry names a function the layer framework treats distinctively,
with the level it is declared at and where its outputs land. The report
recomputes continuity and differentiability verdicts from scratch and
compares them to the declared rows; a truncated rough sum is judged by
the growth of its derivative stack rather than by pointwise smoothness,
since any finite truncation is smooth and only the growth rate reveals
what the family is heading toward.

The catalogue is a text block in the same spirit as the constant
catalogue: one row per line, pipe-separated, parsed at import.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from . import calculus
from . import functions as F
from . import layers as L
from .enclosure import Enclosure
from .errors import BudgetExhaustedError, DomainError
from .functions import FunctionDescriptor
from .layers import LayeredReal

__all__ = [
    "GalleryEntry",
    "GalleryRow",
    "ScanRow",
    "JumpRow",
    "build",
    "entries",
    "evaluate",
    "gallery_report",
    "weierstrass_threshold_scan",
    "definability_jump_demo",
    "cantor_function",
]

evaluate = F.evaluate

_X = F.var()
_ZERO = L.from_int(0)
_ONE = L.from_int(1)

GALLERY_TEXT = """
x_squared        | 0 | 0 | squaring; fully definable at the ground layer
algebraic_poly   | 1 | 1 | quadratic with a root-two coefficient; smooth
sin              | 1 | 2 | truncated sine series with certified tail
cos              | 1 | 2 | truncated cosine series with certified tail
exp              | 2 | 3 | exponential series; outputs land a layer up
floor            | 1 | 1 | piecewise constant; breaks at integers
sign             | 1 | 1 | breaks at zero, continuous elsewhere
dirichlet        | - | - | indicator of the rationals; no layer sees it continuous
point_indicator  | 0 | 1 | spike at a root-two threshold, invisible a layer below
heaviside        | 1 | 1 | unit step; breaks at its threshold
weierstrass      | 0 | 2 | rough cosine stack; derivative budget grows with depth
takagi           | 0 | 0 | fractional-part stack; piecewise linear at any truncation
fourier          | 1 | 2 | damped sine stack
cantor_staircase | 0 | 0 | depth-limited staircase, flat on removed thirds
masked_oscillation      | 2 | 2 | x^2 sin(1/x) behind a layer gate; zero below
masked_oscillation_rate | 2 | 2 | its pointwise rate, pinned to -1 at the origin
liouville_constant      | 3 | 3 | fast-series constant as a function; rank checked only
chaitin          | - | - | refuses evaluation; no finite layer carries it
"""


@dataclass(frozen=True)
class GalleryEntry:
    name: str
    descriptor: FunctionDescriptor | None
    declared_level: int | None
    declared_target: int | None
    declared_notes: str


def _sqrt2() -> LayeredReal:
    return L.constant("sqrt2")


def _sqrt2_over_2() -> LayeredReal:
    return L.constant("sqrt2_over_2")


def _geometric_envelope(a: Fraction, terms: int) -> Fraction:
    return sum(a**k for k in range(terms + 1))


def cantor_function(depth: int) -> FunctionDescriptor:
    """Depth-limited staircase on [0,1], exact rational breakpoints.

    Constant at odd multiples of 2^-level on each removed middle third;
    linear with slope (3/2)^depth on what is left of the dust.
    """
    if depth < 0:
        raise DomainError("staircase depth must be nonnegative")
    points = [(Fraction(0), Fraction(0)), (Fraction(1), Fraction(1))]
    for _ in range(depth):
        rescaled = []
        for x, y in points:
            rescaled.append((x / 3, y / 2))
        rescaled.append((Fraction(1, 3), Fraction(1, 2)))
        rescaled.append((Fraction(2, 3), Fraction(1, 2)))
        for x, y in points:
            rescaled.append(((x + 2) / 3, (y + 1) / 2))
        points = sorted(set(rescaled))
    return FunctionDescriptor(F.PiecewiseLinear(tuple(points)), 0, 0,
                              _ZERO, _ONE)


def _masked_oscillation() -> FunctionDescriptor:
    inner = F.mul(F.IntPow(_X, 2), F.SeriesFun("sin", F.div(F.const(_ONE), _X)))
    gated = F.LayerGate(2, F.SwitchAt(_ZERO, inner, inner, _ZERO),
                        F.const(_ZERO))
    return FunctionDescriptor(gated, 2, 2, L.from_int(-1), _ONE,
                              envelope_low=Fraction(-1), envelope_high=Fraction(1))


def _masked_oscillation_rate() -> FunctionDescriptor:
    two_x = F.mul(F.const(L.from_int(2)), _X)
    inv = F.div(F.const(_ONE), _X)
    inner = F.sub(F.mul(two_x, F.SeriesFun("sin", inv)), F.SeriesFun("cos", inv))
    gated = F.LayerGate(2, F.SwitchAt(_ZERO, inner, inner, L.from_int(-1)),
                        F.const(_ZERO))
    return FunctionDescriptor(gated, 2, 2, L.from_int(-1), _ONE,
                              envelope_low=Fraction(-3), envelope_high=Fraction(3))


def build(name: str, **params) -> FunctionDescriptor:
    """Construct a catalogue function, with row-specific parameters.

    weierstrass/takagi/fourier take (a, b, terms); heaviside and
    point_indicator take a threshold; cantor_staircase takes depth.
    Leftover or unknown parameters are rejected.
    """
    descriptor = _build(name, params)
    if params:
        raise DomainError(
            f"unknown parameters for {name!r}: {sorted(params)}")
    return descriptor


def _build(name: str, params: dict) -> FunctionDescriptor:
    if name == "x_squared":
        return FunctionDescriptor(F.IntPow(_X, 2), 0, 0)
    if name == "algebraic_poly":
        expr = F.add(F.IntPow(_X, 2),
                     F.sub(F.mul(F.const(_sqrt2()), _X), F.const(_ONE)))
        return FunctionDescriptor(expr, 1, 1)
    if name in ("sin", "cos"):
        terms = params.pop("terms", F.DEFAULT_SERIES_TERMS)
        return FunctionDescriptor(F.SeriesFun(name, _X, terms), 1, 2)
    if name == "exp":
        terms = params.pop("terms", F.DEFAULT_SERIES_TERMS)
        return FunctionDescriptor(F.SeriesFun("exp", _X, terms), 2, 3)
    if name == "floor":
        return FunctionDescriptor(F.Floor(_X), 1, 1)
    if name == "sign":
        return FunctionDescriptor(F.Sign(_X), 1, 1)
    if name == "dirichlet":
        return FunctionDescriptor(F.IndicatorRational(), 1, 1)
    if name == "point_indicator":
        theta = params.pop("theta", None)
        if theta is None:
            theta = _sqrt2_over_2()
        rank = max(theta.rank, 1)
        expr = F.SwitchAt(theta, F.const(_ZERO), F.const(_ZERO), _ONE)
        return FunctionDescriptor(expr, rank, rank)
    if name == "heaviside":
        theta = params.pop("theta", None)
        if theta is None:
            theta = _ZERO
        rank = max(theta.rank, 1)
        return FunctionDescriptor(F.Heaviside(theta), rank, rank)
    if name in ("weierstrass", "takagi", "fourier"):
        a = Fraction(params.pop("a", Fraction(1, 2)))
        defaults = {"weierstrass": 3, "takagi": 2, "fourier": 1}
        b = Fraction(params.pop("b", defaults[name]))
        terms = params.pop("terms", 10)
        if not 0 < a < 1:
            raise DomainError("the damping coefficient must sit in (0, 1)")
        if b <= 0:
            raise DomainError("the frequency base must be positive")
        if terms < 0:
            raise DomainError("term count must be nonnegative")
        expr = F.TruncatedSum(name, L.from_fraction(a), L.from_fraction(b),
                              terms)
        env = _geometric_envelope(a, terms)
        ranks = {"weierstrass": (0, 2), "takagi": (0, 0), "fourier": (1, 2)}
        n, k = ranks[name]
        return FunctionDescriptor(expr, n, k,
                                  envelope_low=Fraction(0) if name == "takagi" else -env,
                                  envelope_high=env)
    if name == "cantor_staircase":
        return cantor_function(params.pop("depth", 4))
    if name == "masked_oscillation":
        return _masked_oscillation()
    if name == "masked_oscillation_rate":
        return _masked_oscillation_rate()
    if name == "liouville_constant":
        return FunctionDescriptor(F.const(L.constant("liouville")), 0, 3)
    if name == "chaitin":
        raise DomainError(
            "chaitin refuses evaluation: its digits outrun every layer")
    raise DomainError(f"unknown gallery entry {name!r}")


def entries() -> tuple[GalleryEntry, ...]:
    """The catalogue with default parameters, one entry per text row."""
    rows = []
    for line in GALLERY_TEXT.strip().splitlines():
        name, level, target, notes = (part.strip() for part in line.split("|"))
        try:
            descriptor = build(name)
        except DomainError:
            descriptor = None
        rows.append(GalleryEntry(
            name, descriptor,
            None if level == "-" else int(level),
            None if target == "-" else int(target),
            notes))
    names = [r.name for r in rows]
    if len(set(names)) != len(names):
        raise DomainError("gallery names must be unique")
    return tuple(rows)


# ---------------------------------------------------------------------------
# table reproduction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GalleryRow:
    name: str
    declared_level: int | None
    declared_target: int | None
    computed: str
    verdict: str  # agrees | differs | recorded
    error: str | None = None


_DEFAULT_PROBES = (Fraction(-1, 2), Fraction(1, 3), Fraction(3, 4))

# probe overrides and expected break points, both at the check layer
_ROW_PLANS: dict[str, dict] = {
    "x_squared": {"smooth": True},
    "algebraic_poly": {"smooth": True},
    "sin": {},
    "cos": {},
    "exp": {},
    "floor": {"probes": (Fraction(0), Fraction(1, 2), Fraction(1)),
              "breaks": (Fraction(0), Fraction(1))},
    "sign": {"probes": (Fraction(-1, 2), Fraction(0), Fraction(1, 2)),
             "breaks": (Fraction(0),)},
    "dirichlet": {"layer": 1, "breaks": "all"},
    "heaviside": {"probes": (Fraction(-1, 2), Fraction(0), Fraction(1, 2)),
                  "breaks": (Fraction(0),)},
    "point_indicator": {"layer": 1, "theta_probe": True},
    "weierstrass": {"growth": True},
    "takagi": {"probes": (Fraction(1, 3), Fraction(2, 5))},
    "fourier": {},
    "cantor_staircase": {"probes": (Fraction(1, 2), Fraction(1, 4))},
    "masked_oscillation": {"probes": (Fraction(-1, 2), Fraction(1, 4))},
    "masked_oscillation_rate": {"probes": (Fraction(-1, 2), Fraction(1, 4))},
    "liouville_constant": {"rank_only": True},
}


def _continuity_summary(f: FunctionDescriptor, probes, layer: int,
                        eps: Fraction) -> tuple[list[Fraction], list[Fraction], list[str]]:
    held, broke, errors = [], [], []
    for p in probes:
        x = L.from_fraction(p) if isinstance(p, Fraction) else p
        try:
            delta, witness = calculus.continuity_check(f, x, layer, eps)
        except (DomainError, BudgetExhaustedError) as err:
            errors.append(f"{p}: {err}")
            continue
        key = p if isinstance(p, Fraction) else None
        if delta is not None:
            held.append(key)
        else:
            broke.append(key)
    return held, broke, errors


def gallery_report(layers: range = range(0, 4),
                   grid: tuple[Fraction, ...] = _DEFAULT_PROBES,
                   tolerances: tuple[Fraction, Fraction] = (Fraction(1, 64),
                                                            Fraction(1, 2**10)),
                   ) -> tuple[GalleryRow, ...]:
    """One verdict row per catalogue entry, recomputed from scratch.

    Continuity is checked at each probe at the entry's declared level
    (clamped into `layers`); expected break points come from the row
    plan. Rows whose behavior is about growth or rank are judged by the
    matching computation instead. Errors annotate the row, never abort
    the report.
    """
    eps = tolerances[0]
    rows = []
    for entry in entries():
        plan = _ROW_PLANS.get(entry.name, {})
        if entry.descriptor is None:
            rows.append(GalleryRow(entry.name, entry.declared_level,
                                   entry.declared_target,
                                   "not evaluated", "recorded",
                                   error="refuses evaluation"))
            continue
        layer = plan.get("layer", entry.declared_level)
        if layer is None:
            layer = max(layers)
        layer = min(max(layer, layers.start), layers[-1])

        if plan.get("rank_only"):
            _, out_rank = F.descriptor_rank(entry.descriptor)
            agrees = out_rank == entry.declared_target
            rows.append(GalleryRow(entry.name, entry.declared_level,
                                   entry.declared_target,
                                   f"output rank {out_rank}",
                                   "agrees" if agrees else "differs"))
            continue

        if plan.get("growth"):
            scan = weierstrass_threshold_scan((Fraction(1, 2),), (Fraction(3),),
                                              range(4, 9))
            held, broke, errors = _continuity_summary(
                entry.descriptor, plan.get("probes", grid), layer, eps)
            growing = scan[0].classification == "growing"
            agrees = growing and not broke and not errors
            computed = (f"continuous at {len(held)} probes; derivative stack "
                        f"{scan[0].classification} (ratio {scan[0].ratio:.2f})")
            rows.append(GalleryRow(entry.name, entry.declared_level,
                                   entry.declared_target, computed,
                                   "agrees" if agrees else "differs",
                                   error="; ".join(errors) or None))
            continue

        probes = list(plan.get("probes", grid))
        if plan.get("theta_probe"):
            probes = [_sqrt2_over_2()]
        held, broke, errors = _continuity_summary(entry.descriptor, probes,
                                                  layer, eps)
        expected = plan.get("breaks", ())
        if plan.get("theta_probe"):
            agrees = len(broke) + len(held) == 1 and len(broke) == 1
            computed = "jump at the threshold once the layer names it"
        elif expected == "all":
            agrees = not held and broke and not errors
            computed = f"breaks at every probe ({len(broke)})"
        else:
            agrees = sorted(broke) == sorted(expected) and not errors
            broke_str = ", ".join(str(b) for b in sorted(broke))
            computed = (f"continuous at {len(held)} probes"
                        + (f"; breaks at {broke_str}" if broke else ""))
        if plan.get("smooth") and agrees:
            report = calculus.smoothness_class(
                entry.descriptor, layer, 2,
                tuple(L.from_fraction(p) for p in probes
                      if isinstance(p, Fraction)),
                tol=tolerances[1])
            agrees = report.capped
            computed += f"; smooth to order {report.highest_k}"
        rows.append(GalleryRow(entry.name, entry.declared_level,
                               entry.declared_target, computed,
                               "agrees" if agrees else "differs",
                               error="; ".join(errors) or None))
    return tuple(rows)


# ---------------------------------------------------------------------------
# threshold scan
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScanRow:
    a: Fraction
    b: Fraction
    ab: Fraction
    maxima: tuple[Fraction, ...]  # certified upper bounds, one per K
    ratio: float  # geometric mean growth per added term
    classification: str  # growing | bounded
    paper_prediction: str  # growing unless ab < 1/2
    classical_prediction: str  # growing iff ab > 1
    geometric_bound: Fraction | None  # pi/(1-ab) when ab < 1
    discrepancy: bool  # measurement disagrees with the paper's threshold


_SCAN_GRID = tuple(Fraction(j, 16) for j in range(17))


def _derivative_stack(a: Fraction, b: Fraction, terms: int) -> FunctionDescriptor:
    """Sum over k <= terms of a^k b^k pi sin(b^k pi x), as an expression."""
    pi = L.constant("pi")
    expr = None
    for k in range(terms + 1):
        coeff = L.combine(L.from_fraction(a**k * b**k), pi, "*")
        freq = L.combine(L.from_fraction(b**k), pi, "*")
        term = F.mul(F.const(coeff), F.SeriesFun("sin", F.mul(F.const(freq), _X)))
        expr = term if expr is None else F.add(expr, term)
    return FunctionDescriptor(expr, 2, 2)


def weierstrass_threshold_scan(a_values, b_values, K_schedule,
                               grid: tuple[Fraction, ...] = _SCAN_GRID,
                               precision: int = 48) -> tuple[ScanRow, ...]:
    """Growth of max |derivative partial sums| against truncation depth.

    The measured ratio is the geometric mean of max growth per added
    term. Classification looks at the increments between consecutive
    maxima: a divergent stack accelerates, a convergent one tails off,
    and raw ratios cannot tell the two apart at small depths. The row
    carries both the threshold the source table predicts (growth unless
    ab < 1/2) and the classical one (growth iff ab > 1), plus a
    discrepancy flag whenever measurement and the table disagree; the
    scan itself takes no side.
    """
    schedule = list(K_schedule)
    if len(schedule) < 3 or any(x >= y for x, y in zip(schedule, schedule[1:])):
        raise DomainError(
            "the truncation schedule must strictly increase, length >= 3")
    rows = []
    for a in a_values:
        a = Fraction(a)
        for b in b_values:
            b = Fraction(b)
            maxima = []
            for K in schedule:
                f = _derivative_stack(a, b, K)
                peak = Fraction(0)
                for x in grid:
                    e = F.evaluate(f, L.from_fraction(x), precision)
                    peak = max(peak, abs(e.low), abs(e.high))
                maxima.append(peak)
            span = schedule[-1] - schedule[0]
            ratio = float(maxima[-1] / maxima[0]) ** (1.0 / span)
            ab = a * b
            steps = [(maxima[i + 1] - maxima[i]) / (schedule[i + 1] - schedule[i])
                     for i in range(len(maxima) - 1)]
            mid = len(steps) // 2
            head = sum(steps[:mid]) / mid
            tail = sum(steps[mid:]) / (len(steps) - mid)
            if maxima[-1] <= maxima[0] * Fraction(51, 50):
                classification = "bounded"  # flat within noise
            else:
                classification = "growing" if tail > head else "bounded"
            paper_prediction = "bounded" if ab < Fraction(1, 2) else "growing"
            classical_prediction = "growing" if ab > 1 else "bounded"
            rows.append(ScanRow(
                a, b, ab, tuple(maxima), ratio, classification,
                paper_prediction, classical_prediction,
                None if ab >= 1 else _pi_upper(precision) / (1 - ab),
                classification != paper_prediction))
    return tuple(rows)


def _pi_upper(bits: int) -> Fraction:
    return F.pi_enclosure(bits).high


# ---------------------------------------------------------------------------
# layer-jump demonstration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JumpRow:
    layer: int
    representable: bool
    jump_visible: bool
    witness: LayeredReal | None
    integral: Enclosure | None
    note: str


def definability_jump_demo(theta: LayeredReal, observer_layers: range,
                           interval=(_ZERO, _ONE),
                           tol: Fraction = Fraction(1, 2**10)) -> tuple[JumpRow, ...]:
    """How a step at theta looks from each observer layer.

    Below theta's rank the step sits between any two points the layer
    can name, so every continuity probe passes and the certified
    integral is all the layer ever learns. At and above the rank the
    probe at theta itself produces a witness.
    """
    a, b = interval
    step = FunctionDescriptor(F.Heaviside(theta), max(theta.rank, 1),
                              max(theta.rank, 1))
    rows = []
    for m in observer_layers:
        representable = theta.rank <= m
        witness = None
        if representable:
            try:
                _, witness = calculus.continuity_check(step, theta, m,
                                                       Fraction(1, 2))
            except (DomainError, BudgetExhaustedError):
                witness = None
            note = ("threshold named; the probe at it certifies a jump"
                    if witness is not None else
                    "threshold named but the jump did not certify")
        else:
            nearby_ok = True
            for exponent in (6, 10):
                for snap in (False, True):
                    x = (_snap(theta, exponent, up=snap))
                    delta, w = calculus.continuity_check(step, x, m,
                                                         Fraction(1, 2))
                    nearby_ok = nearby_ok and delta is not None and w is None
            note = ("no point this layer names can witness the step"
                    if nearby_ok else
                    "a budgeted neighbor unexpectedly certified a jump")
        integral = None
        try:
            r = calculus.riemann_integral(step, a, b, m, tol=tol)
            integral = Enclosure(r.lower_sum.low, r.upper_sum.high)
        except (DomainError, BudgetExhaustedError):
            note += "; integral did not resolve"
        rows.append(JumpRow(m, representable,
                            representable and witness is not None,
                            witness, integral, note))
    return tuple(rows)


def _snap(x: LayeredReal, exponent: int, up: bool) -> LayeredReal:
    from . import topology
    return topology.snap_up(x, exponent) if up else topology.snap_down(x, exponent)

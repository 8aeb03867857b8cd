"""Budgeted outer measure, Lp norms, and Liouville-type membership.

The outer measure covers a set descriptor with finitely many intervals
whose endpoints the observer layer can name. Rational or otherwise
in-layer endpoints are used verbatim, so Cantor approximants come out
with exact rational measure; endpoints the layer cannot express are
snapped outward to the budget's dyadic grid and the result widens into
an honest enclosure. The paper-style "measure is infinite when no cover
exists" convention is mapped to an explicit cover-failure marker rather
than a float infinity.

Liouville witnesses are hunted in three rounds: the value's own series
truncations (when it carries a series representation), continued-fraction
convergents and semiconvergents of a high-precision enclosure, then a
direct small-denominator sweep. Witness denominators must escalate
strictly across orders, mirroring how genuine members need approximations
of unbounded denominator. Every candidate inequality is certified on
exact rational bounds before it is reported, and a standalone
re-verification helper is exported so callers can audit a witness without
trusting the report that produced it.
"""

from dataclasses import dataclass
from fractions import Fraction

from . import calculus
from . import functions as F
from . import layers as L
from . import sets
from . import topology
from .enclosure import Enclosure
from .errors import BudgetExhaustedError, DomainError
from .functions import FunctionDescriptor
from .layers import ComplexityBudget, LayeredReal
from .sets import SetDescriptor, cantor_approximant
from .topology import SyntacticCover

__all__ = [
    "CoverFailure",
    "MeasureResult",
    "LpResult",
    "LiouvilleWitness",
    "LiouvilleReport",
    "ConvergenceReport",
    "outer_measure",
    "cantor_approximant",
    "lp_norm",
    "liouville_test",
    "verify_liouville_witness",
    "dominated_convergence_check",
]

_DEFAULT_BUDGET = ComplexityBudget()

# Direct denominator sweep ceiling for enclosure-certified candidates.
# Beyond this, any remaining witness for k >= 2 must be a convergent or
# semiconvergent (a fraction with |x - p/q| < q^-2 is one of those), so
# the sweep only needs to be exhaustive for rational inputs, where it
# runs in plain integer arithmetic instead.
_SMALL_Q_SWEEP = 256


# ---------------------------------------------------------------------------
# outer measure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoverFailure:
    """No budgeted interval could bracket this point of the set."""

    witness: LayeredReal


@dataclass(frozen=True)
class MeasureResult:
    value: Enclosure | CoverFailure
    cover: SyntacticCover
    layer: int


def _enclosed_bounds(x: LayeredReal, bits: int) -> tuple[Fraction, Fraction]:
    e = L.enclose(x, bits)
    return e.low, e.high


def outer_measure(A: SetDescriptor, n: int,
                  budget: ComplexityBudget | None = None) -> MeasureResult:
    """Greedy interval cover of A with rank-n endpoints, plus its length.

    Components are merged left to right first, so the cover is minimal
    for the interval part of the descriptor. Isolated points get one
    grid-width interval each; they contribute to the cover's length but
    not to the measure's lower bound, which is how a finite set reports
    measure zero at every finite budget.
    """
    if budget is None:
        budget = _DEFAULT_BUDGET
    exponent = budget.max_dyadic_exponent
    bits = exponent + 8
    intervals, points = sets.components(A)
    intervals, points = sets.merge_components(intervals, points)

    cover: list[tuple[LayeredReal, LayeredReal]] = []
    lower = Fraction(0)
    upper = Fraction(0)
    try:
        for lo, hi in intervals:
            clo = lo if lo.rank <= n else topology.snap_down(lo, exponent)
            chi = hi if hi.rank <= n else topology.snap_up(hi, exponent)
            cover.append((clo, chi))
            flo, fhi = clo.exact_fraction(), chi.exact_fraction()
            if flo is not None and fhi is not None:
                upper += fhi - flo
            else:
                upper += _enclosed_bounds(chi, bits)[1] - _enclosed_bounds(clo, bits)[0]
            tlo, thi = lo.exact_fraction(), hi.exact_fraction()
            if tlo is not None and thi is not None:
                lower += thi - tlo
            else:
                lower += max(Fraction(0),
                             _enclosed_bounds(hi, bits)[0] - _enclosed_bounds(lo, bits)[1])
        for p in points:
            plo = topology.snap_down(p, exponent)
            phi = topology.snap_up(p, exponent)
            if L.compare(plo, phi) == 0:
                # p sits on the grid itself; pad one grid step to the right
                # so the cover interval is nondegenerate yet still contains p.
                phi = L.from_fraction(phi.exact_fraction() + Fraction(1, 1 << exponent))
            cover.append((plo, phi))
            upper += phi.exact_fraction() - plo.exact_fraction()
    except BudgetExhaustedError:
        witness = points[0] if points else intervals[0][0]
        return MeasureResult(CoverFailure(witness),
                             SyntacticCover(n, (), budget), n)

    return MeasureResult(Enclosure(min(lower, upper), upper),
                         SyntacticCover(n, tuple(cover), budget), n)


# ---------------------------------------------------------------------------
# Lp norms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LpResult:
    p: Fraction
    norm: Enclosure
    layer: int
    member: bool = True

    def __post_init__(self):
        if self.norm.low < 0:
            raise ValueError("a norm cannot be negative")


def lp_norm(f: FunctionDescriptor, p, interval, n: int,
            tol: Fraction = calculus.DEFAULT_TOLERANCE,
            max_partition: int = 2**14,
            max_bracket_cells: int = 2**15) -> LpResult:
    """(integral of |f|^p)^(1/p) over the interval, at observer layer n.

    When the integral fails to certify, the norm is still reported from
    the widest Darboux bracket seen, with member=False: the function is
    not shown to live in the space, and the enclosure says only what the
    budget could pin down. The result's layer is the integral's output
    rank, since the norm inherits the integral's provenance.
    """
    p = Fraction(p)
    if p < 1:
        raise DomainError("lp norms need p >= 1")
    a, b = interval
    power = F.RatPow(F.Abs(f.expression), p.numerator, p.denominator)
    env_low = env_high = None
    if f.envelope_low is not None and p.denominator == 1:
        m = max(abs(f.envelope_low), abs(f.envelope_high))
        env_low, env_high = Fraction(0), m ** p.numerator
    g = FunctionDescriptor(
        power,
        domain_rank=f.domain_rank,
        codomain_rank=f.codomain_rank if p.denominator == 1 else max(f.codomain_rank, 1),
        domain_low=f.domain_low,
        domain_high=f.domain_high,
        domain_low_closed=f.domain_low_closed,
        domain_high_closed=f.domain_high_closed,
        envelope_low=env_low,
        envelope_high=env_high,
    )
    r = calculus.riemann_integral(g, a, b, n, tol=tol,
                                  max_partition=max_partition,
                                  max_bracket_cells=max_bracket_cells)
    # The certified Darboux bracket contains the true integral whether or
    # not the computation converged; the tagged Riemann value does not.
    bracket = Enclosure(r.lower_sum.low, r.upper_sum.high)
    member = r.integrable
    clamped = Enclosure(max(Fraction(0), bracket.low),
                        max(Fraction(0), bracket.high))
    bits = max(32, _bits_for(tol) + 8)
    norm = F._rat_pow_range(clamped, p.denominator, p.numerator, bits)
    norm = Enclosure(max(Fraction(0), norm.low), max(Fraction(0), norm.high))
    return LpResult(p=p, norm=norm, layer=r.output_rank, member=member)


def _bits_for(tol: Fraction) -> int:
    bits = 1
    while Fraction(1, 1 << bits) > tol:
        bits += 1
    return bits


# ---------------------------------------------------------------------------
# Liouville membership
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LiouvilleWitness:
    p: int
    q: int
    gap: Fraction  # certified upper bound on |x - p/q|, exact for rational x

    def __post_init__(self):
        if self.q < 2:
            raise ValueError("witness denominators start at 2")


@dataclass(frozen=True)
class LiouvilleReport:
    k_verified: int
    witnesses: tuple[LiouvilleWitness, ...]
    member_up_to_k: bool


def _continued_fraction_candidates(approx: Fraction, q_cap: int) -> list[Fraction]:
    """Convergents and semiconvergents of approx with denominator <= q_cap.

    approx is a high-precision stand-in for the tested value; its
    convergents agree with the value's own while q**2 stays far below
    the approximation error's reciprocal, and every candidate is later
    re-certified against the value itself, so a stray tail convergent
    can never become a false witness.
    """
    out: list[Fraction] = []
    a = approx
    h_prev, h = 1, a.numerator // a.denominator
    k_prev, k = 0, 1
    frac = a - (a.numerator // a.denominator)
    out.append(Fraction(h, k))
    while frac != 0 and k <= q_cap:
        a = 1 / frac
        digit = a.numerator // a.denominator
        frac = a - digit
        for t in range(1, digit + 1):
            num, den = h_prev + t * h, k_prev + t * k
            if den > q_cap:
                return out
            out.append(Fraction(num, den))
        h_prev, h = h, h_prev + digit * h
        k_prev, k = k, k_prev + digit * k
    return out


def _rational_witness(xf: Fraction, k: int, q_cap: int,
                      min_q: int) -> LiouvilleWitness | None:
    """Exhaustive integer-arithmetic sweep for exact rational x.

    |a/b - p/q| = |aq - pb|/(bq), minimized over p by the nearest
    integer to aq/b; the strict bound < q^-k becomes |aq - pb| * q^(k-1) < b.
    A nonzero miss is at least 1, so once q^(k-1) reaches b no later q can
    succeed and the sweep stops early.
    """
    a, b = xf.numerator, xf.denominator
    for q in range(max(2, min_q), q_cap + 1):
        if k >= 2 and q ** (k - 1) >= b:
            break
        p = (2 * a * q + b) // (2 * b)
        miss = abs(a * q - p * b)
        if miss == 0:
            continue
        if miss * q ** (k - 1) < b:
            c = Fraction(p, q)
            if c.denominator < max(2, min_q):
                continue  # reduction slipped under the escalation floor
            gap = Fraction(miss, b * q)
            return LiouvilleWitness(c.numerator, c.denominator, gap)
    return None


def _certify(enc: Enclosure, c: Fraction, k: int) -> Fraction | None:
    """Certified upper bound on |x - c| when 0 < |x - c| < q^-k holds."""
    q = c.denominator
    if q < 2:
        return None
    if enc.high < c:
        gap = c - enc.low
    elif enc.low > c:
        gap = enc.high - c
    else:
        return None  # enclosure straddles the candidate; cannot separate
    return gap if gap < Fraction(1, q ** k) else None


def liouville_test(x: LayeredReal, n: int, k_max: int,
                   budget: ComplexityBudget | None = None,
                   q_cap: int = 10**6) -> LiouvilleReport:
    """Per-order rational-approximation witnesses for x, up to order k_max.

    A witness for order k is a reduced p/q with q >= 2 and
    0 < |x - p/q| < q^-k, certified on exact rational bounds. Denominators
    must escalate strictly from one order to the next: a genuine member
    has approximations of unbounded denominator (for any fixed q the
    bound q^-k eventually drops below the best gap at that q), and
    without escalation one lucky small-denominator fraction can
    masquerade as deep approximability. Searching smallest-denominator
    first keeps the escalation greedy-optimal: swapping any later
    witness in for an earlier one only shrinks the room above it.

    A series-represented value is probed with its own partial sums
    before anything generic, so catalogued fast-series constants report
    their canonical truncation witnesses.
    """
    if k_max < 1:
        raise DomainError("liouville order must be at least 1")
    if x.rank > n:
        raise DomainError("the tested point outranks the observer layer")
    if budget is None:
        budget = _DEFAULT_BUDGET
    bits = (k_max + 1) * max(q_cap.bit_length(), 2) + 32
    enc = L.enclose(x, bits)
    xf = x.exact_fraction()

    truncations: list[Fraction] = []
    if isinstance(x.rep, L.SeriesValue):
        for j in range(budget.max_series_terms):
            t = x.rep.partial_sum(j)
            if t.denominator > q_cap:
                break
            truncations.append(t)
    generic = _continued_fraction_candidates(enc.midpoint, q_cap)
    for q in range(2, min(q_cap, _SMALL_Q_SWEEP) + 1):
        num = enc.midpoint * q
        generic.append(Fraction(round(num), q))
    generic = sorted(set(generic), key=lambda c: (c.denominator, c))

    witnesses: list[LiouvilleWitness] = []
    k_verified = 0
    floor = 2
    for k in range(1, k_max + 1):
        found = None
        for c in truncations:
            if c.denominator < floor:
                continue
            gap = _certify(enc, c, k)
            if gap is not None:
                found = LiouvilleWitness(c.numerator, c.denominator, gap)
                break
        if found is None and xf is not None:
            found = _rational_witness(xf, k, q_cap, floor)
        elif found is None:
            for c in generic:
                if c.denominator < floor:
                    continue
                gap = _certify(enc, c, k)
                if gap is not None:
                    found = LiouvilleWitness(c.numerator, c.denominator, gap)
                    break
        if found is None:
            break
        witnesses.append(found)
        k_verified = k
        floor = found.q + 1
    return LiouvilleReport(k_verified, tuple(witnesses), k_verified >= k_max)


def verify_liouville_witness(x: LayeredReal, p: int, q: int, k: int,
                             precision_bits: int = 256) -> bool:
    """Independently re-check 0 < |x - p/q| < q^-k.

    Exact rational arithmetic end to end: for rational x the gap itself
    is exact, otherwise both inequalities are decided on the rational
    bounds of a freshly computed enclosure, which is sound because the
    enclosure certifiably contains x.
    """
    if q < 2 or k < 1:
        return False
    c = Fraction(p, q)
    bound = Fraction(1, q ** k)
    xf = x.exact_fraction()
    if xf is not None:
        gap = abs(xf - c)
        return 0 < gap < bound
    enc = L.enclose(x, precision_bits)
    if enc.high < c:
        return c - enc.low < bound
    if enc.low > c:
        return enc.high - c < bound
    return False


# ---------------------------------------------------------------------------
# dominated convergence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceReport:
    dominated: bool
    violation: tuple[int, LayeredReal] | None  # (index into f_seq, grid point)
    pointwise_gap: Fraction  # worst |f_last - f_limit| bound over the grid
    integral_gaps: tuple[Fraction, ...]
    converged: bool
    layer: int


_GRID_CELLS = 16
_POINT_BITS = 48


def dominated_convergence_check(f_seq, f_limit: FunctionDescriptor,
                                g: FunctionDescriptor, interval, n: int,
                                tol: Fraction = Fraction(1, 2**8),
                                integral_tol: Fraction = Fraction(1, 2**12),
                                max_bracket_cells: int = 2**15) -> ConvergenceReport:
    """Domination, grid convergence, and integral convergence, all budgeted.

    |f_k| <= g is checked at every grid point for every supplied element;
    the first certified violation short-circuits with its witness. The
    integral gaps are certified upper bounds on |integral(f_k) -
    integral(f_limit)|, and convergence asks the last of them to sit
    under tol without exceeding the first (a finite prefix cannot show
    more than a downward trend).
    """
    f_seq = tuple(f_seq)
    if not f_seq:
        raise DomainError("convergence needs at least one sequence element")
    a, b = interval
    af, bf = a.exact_fraction(), b.exact_fraction()
    if af is None or bf is None or af >= bf:
        raise DomainError("convergence grid needs exact ordered endpoints")

    grid = [L.from_fraction(af + (bf - af) * Fraction(i, _GRID_CELLS))
            for i in range(_GRID_CELLS + 1)]
    for idx, fk in enumerate(f_seq):
        for xp in grid:
            fe = F.evaluate(fk, xp, _POINT_BITS, layer=n)
            ge = F.evaluate(g, xp, _POINT_BITS, layer=n)
            abs_low = max(Fraction(0), fe.low, -fe.high)
            if abs_low > ge.high:
                return ConvergenceReport(False, (idx, xp), Fraction(0), (),
                                         False, n)

    worst = Fraction(0)
    for xp in grid:
        fe = F.evaluate(f_seq[-1], xp, _POINT_BITS, layer=n)
        le = F.evaluate(f_limit, xp, _POINT_BITS, layer=n)
        worst = max(worst, abs(fe.low - le.high), abs(fe.high - le.low))

    def integral_hull(fd: FunctionDescriptor) -> Enclosure:
        r = calculus.riemann_integral(fd, a, b, n, tol=integral_tol,
                                      max_bracket_cells=max_bracket_cells)
        if r.integrable:
            return r.riemann_value
        return Enclosure(r.lower_sum.low, r.upper_sum.high)

    limit_hull = integral_hull(f_limit)
    gaps = []
    for fk in f_seq:
        hull = integral_hull(fk)
        gaps.append(max(abs(hull.low - limit_hull.high),
                        abs(hull.high - limit_hull.low)))
    converged = gaps[-1] <= tol and gaps[-1] <= gaps[0]
    return ConvergenceReport(True, None, worst, tuple(gaps), converged, n)

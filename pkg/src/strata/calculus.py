"""Limits, integrals, continuity certificates, and smoothness detection.

Derivatives are difference quotients over halving dyadic steps, accelerated
by Neville extrapolation toward step zero. On polynomial data the
extrapolation table reaches an exact plateau, so derivatives of rational
polynomials come out as zero-width enclosures; everything else converges by
consecutive agreement of the extrapolants.

Integrals pair a tagged Riemann sum with per-cell range enclosures. The
range sums are a certified Darboux bracket, so a converged result is a
proof that the reported value is within the requested gap of the true
integral, never just a stopping heuristic.

Continuity certificates come from range enclosures over shrinking windows,
evaluated at the observer layer, so a function can honestly pass at one
layer and fail at the next.
"""

import heapq
import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import functions as F
from . import layers as L
from . import sets
from . import topology
from .enclosure import Enclosure
from .errors import BudgetExhaustedError, DomainError
from .functions import FunctionDescriptor
from .layers import ComplexityBudget, LayeredReal

DEFAULT_TOLERANCE = Fraction(1, 2**20)

_DEFAULT_BUDGET = ComplexityBudget()
_DIVERGENCE_RATIO = Fraction(4, 3)
_DIVERGENCE_RUN = 3


# ---------------------------------------------------------------------------
# result types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DerivativeResult:
    status: str  # converged | one_sided_mismatch | diverged | budget_exhausted
    value: Enclosure | None
    left_value: Enclosure | None
    right_value: Enclosure | None
    output_rank: int
    samples_used: int

    def __post_init__(self):
        if self.status == "converged" and self.value is None:
            raise ValueError("a converged derivative must carry a value")
        if self.status == "one_sided_mismatch" and (
                self.left_value is None or self.right_value is None):
            raise ValueError("a one-sided mismatch must carry both sides")


@dataclass(frozen=True)
class IntegralResult:
    lower_sum: Enclosure
    upper_sum: Enclosure
    riemann_value: Enclosure | None
    integrable: bool
    output_rank: int
    partition_size: int

    def __post_init__(self):
        if self.lower_sum.low > self.upper_sum.high:
            raise ValueError("lower sum exceeds upper sum")
        if self.integrable and self.riemann_value is None:
            raise ValueError("an integrable result must carry a value")


@dataclass(frozen=True)
class TaylorResult:
    polynomial_value: Enclosure
    remainder: Enclosure
    remainder_rank: int
    finite_differences: tuple[Enclosure, ...]


@dataclass(frozen=True)
class SmoothnessReport:
    highest_k: int  # -1 when even plain continuity fails on the grid
    capped: bool  # the walk reached k_max without failing
    per_k_status: dict[int, str]


@dataclass(frozen=True)
class FtcRow:
    layer: int
    derivative_at_probe: Enclosure | None
    derivative_status: str
    f_at_probe: Enclosure | None
    verdict: str  # valid | breaks | fails


@dataclass(frozen=True)
class FtcReport:
    integral_of_derivative: Enclosure | None
    endpoint_difference: Enclosure
    agrees: bool
    per_layer_rows: tuple[FtcRow, ...]


# ---------------------------------------------------------------------------
# extrapolated limits
# ---------------------------------------------------------------------------


def _mutually_close(tail: list[Enclosure], tol: Fraction) -> bool:
    if any(d.width > tol for d in tail):
        return False
    return all(a.gap(b) <= tol for a, b in itertools.combinations(tail, 2))


def _extrapolated_limit(sample, tol: Fraction, max_steps: int):
    """Neville extrapolation of sample(j) toward step zero over the nodes
    h0 * 2^-j.

    Returns (status, value, steps_used). Convergence asks the last three
    extrapolants to agree within tol at two consecutive steps; the doubled
    check stops a lucky early agreement from freezing a wrong plateau. When
    the trailing extrapolants are identical exact values the plateau itself
    is returned, which is what keeps polynomial results zero-width.
    Divergence asks for certified geometric growth of the raw samples over
    three consecutive steps: the new magnitude's lower bound must beat the
    previous magnitude's upper bound by a fixed ratio, so a sample sequence
    climbing toward a finite limit never qualifies for long.
    """
    prev_row: list[Enclosure] = []
    diagonal: list[Enclosure] = []
    prev_mag_high = None
    divergence_run = 0
    agreed_once = False
    for j in range(max_steps + 1):
        try:
            q = sample(j)
        except BudgetExhaustedError:
            return "budget_exhausted", None, j
        row = [q]
        for m in range(1, j + 1):
            num = row[m - 1].scale(2**m) - prev_row[m - 1]
            row.append(num.scale(Fraction(1, 2**m - 1)))
        prev_row = row
        diagonal.append(row[-1])

        mag_low = max(Fraction(0), q.low, -q.high)  # certified |q| lower bound
        mag_high = max(abs(q.low), abs(q.high))
        if prev_mag_high is not None and mag_low > prev_mag_high * _DIVERGENCE_RATIO:
            divergence_run += 1
            if divergence_run >= _DIVERGENCE_RUN:
                return "diverged", None, j + 1
        else:
            divergence_run = 0
        prev_mag_high = mag_high

        if len(diagonal) >= 3 and _mutually_close(diagonal[-3:], tol):
            if agreed_once:
                last, mid, old = diagonal[-1], diagonal[-2], diagonal[-3]
                if last.is_exact() and mid == last:
                    return "converged", last, j + 1
                return "converged", old.hull(mid).hull(last), j + 1
            agreed_once = True
        else:
            agreed_once = False
    return "budget_exhausted", None, max_steps + 1


def _tol_bits(tol: Fraction) -> int:
    bits = 1
    while Fraction(1, 2**bits) > tol:
        bits += 1
    return bits


def _shrink_step(x: LayeredReal, bound: LayeredReal | None, sign: int) -> Fraction | None:
    """Largest step 2^-i (i <= 48) keeping x + sign*h inside the bound,
    None when even the smallest step leaves the domain."""
    if bound is None:
        return Fraction(1)
    h = Fraction(1)
    for _ in range(49):
        probe = L.combine(x, L.from_fraction(sign * h), "+")
        c = L.compare(probe, bound)
        if (c <= 0 and sign > 0) or (c >= 0 and sign < 0):
            return h
        h /= 2
    return None


def fractal_derivative(f: FunctionDescriptor, x: LayeredReal, n: int,
                       tol: Fraction = DEFAULT_TOLERANCE,
                       max_steps: int | None = None) -> DerivativeResult:
    """Two-sided difference-quotient limit of f at x, observed at layer n.

    One-sided when the domain cuts off a side; mismatching one-sided limits
    are reported with both values rather than averaged away.
    """
    if x.rank > n:
        raise DomainError(f"probe of rank {x.rank} is not visible at layer {n}")
    F._check_domain(f, x)
    bits = _tol_bits(tol)
    if max_steps is None:
        max_steps = bits + 10

    samples = 0

    def quotient_at(sign: int, h0: Fraction):
        def sample(j: int) -> Enclosure:
            nonlocal samples
            h = sign * h0 / 2**j
            p = bits + j + 16
            try:
                fx = F.evaluate(f, x, p, layer=n)
                fxh = F.evaluate(f, L.combine(x, L.from_fraction(h), "+"), p, layer=n)
            except DomainError as err:
                raise DomainError(f"{err} (derivative step h = {h})") from err
            samples += 2
            return (fxh - fx).scale(Fraction(1, h))
        return sample

    sides: dict[int, tuple[str, Enclosure | None]] = {}
    for sign, bound in ((1, f.domain_high), (-1, f.domain_low)):
        if bound is not None and L.compare(x, bound) == 0:
            continue  # x sits on this edge of the domain
        h0 = _shrink_step(x, bound, sign)
        if h0 is None:
            continue
        status, value, _ = _extrapolated_limit(quotient_at(sign, h0), tol, max_steps)
        sides[sign] = (status, value)

    if not sides:
        raise DomainError("no admissible perturbation on either side")

    right = sides.get(1)
    left = sides.get(-1)
    right_value = right[1] if right else None
    left_value = left[1] if left else None
    out_rank = n + 1

    def result(status, value):
        return DerivativeResult(status, value, left_value, right_value,
                                out_rank, samples)

    if any(s == "diverged" for s, _ in sides.values()):
        return result("diverged", None)
    if any(s == "budget_exhausted" for s, _ in sides.values()):
        return result("budget_exhausted", None)
    if left and right:
        if left_value.gap(right_value) > tol:
            return result("one_sided_mismatch", None)
        return result("converged", left_value.hull(right_value))
    only = right_value if right else left_value
    return result("converged", only)


# ---------------------------------------------------------------------------
# integrals
# ---------------------------------------------------------------------------


def _exact_endpoints(a: LayeredReal, b: LayeredReal, n: int) -> tuple[Fraction, Fraction]:
    if a.rank > n or b.rank > n:
        raise DomainError("integration endpoints outrank the observer layer")
    af, bf = a.exact_fraction(), b.exact_fraction()
    if af is None or bf is None:
        raise DomainError("step sums need exact rational interval endpoints")
    if af >= bf:
        raise DomainError("empty or reversed integration interval")
    return af, bf


def _integral_rank(f: FunctionDescriptor, n: int) -> int:
    # the measure in play is always plain interval length, rank 0
    return max(n, f.codomain_rank, 0) + 3


def _range_sums(f: FunctionDescriptor, af: Fraction, bf: Fraction, cells: int,
                bits: int, n: int) -> tuple[Fraction, Fraction]:
    """Darboux-style bracket from per-cell outer range enclosures."""
    w = (bf - af) / cells
    lower = Fraction(0)
    upper = Fraction(0)
    for i in range(cells):
        cell = Enclosure(af + i * w, af + (i + 1) * w)
        try:
            e = F.evaluate_range(f, cell, bits, layer=n)
        except DomainError as err:
            raise DomainError(f"{err} (cell {i} of {cells})") from err
        lower += e.low
        upper += e.high
    return lower * w, upper * w


def darboux_integral(f: FunctionDescriptor, a: LayeredReal, b: LayeredReal,
                     n: int, max_partition: int = 1024,
                     tol: Fraction = DEFAULT_TOLERANCE) -> IntegralResult:
    """Lower and upper step sums over doubling uniform partitions.

    The reported sums are the finest partition's; they bracket the true
    integral because every cell uses an outer range enclosure.
    """
    af, bf = _exact_endpoints(a, b, n)
    bits = _tol_bits(tol) + 8
    cells = 2
    while True:
        lower, upper = _range_sums(f, af, bf, cells, bits, n)
        if upper - lower < tol or cells * 2 > max_partition:
            break
        cells *= 2
    integrable = upper - lower < tol
    return IntegralResult(
        lower_sum=Enclosure.exact(lower),
        upper_sum=Enclosure.exact(upper),
        riemann_value=Enclosure(lower, upper) if integrable else None,
        integrable=integrable,
        output_rank=_integral_rank(f, n),
        partition_size=cells,
    )


def _tagged_sum(f: FunctionDescriptor, af: Fraction, bf: Fraction, cells: int,
                bits: int, n: int, tags: str) -> Enclosure:
    w = (bf - af) / cells
    lo_total = Fraction(0)
    hi_total = Fraction(0)
    for i in range(cells):
        if tags == "left":
            tag = af + (i + 1) * w  # grid points a + i*w, i = 1..N
        else:
            tag = af + (2 * i + 1) * w / 2
        e = F.evaluate(f, L.from_fraction(tag), bits, layer=n)
        lo_total += e.low
        hi_total += e.high
    return Enclosure(lo_total * w, hi_total * w)


def _adaptive_bracket(f: FunctionDescriptor, af: Fraction, bf: Fraction,
                      tol: Fraction, bits: int, n: int, max_cells: int):
    """Lower/upper step sums over a worst-cell-first refined partition.

    Splitting always attacks the cell contributing most to the bracket gap,
    so a single jump costs a logarithmic chain of cells rather than a
    uniform grid fine enough to isolate it. Returns (lower, upper, leaves)
    with leaves sorted; the gap upper - lower is below tol unless max_cells
    ran out first.
    """
    def weigh(lo: Fraction, hi: Fraction):
        try:
            e = F.evaluate_range(f, Enclosure(lo, hi), bits, layer=n)
        except DomainError as err:
            raise DomainError(f"{err} (cell [{lo}, {hi}])") from err
        return e, e.width * (hi - lo)

    order = itertools.count()
    e, c = weigh(af, bf)
    heap = [(-c, next(order), af, bf, e)]
    total_gap = c
    cells = 1
    while total_gap >= tol and cells < max_cells:
        neg_c, tie, lo, hi, e = heapq.heappop(heap)
        if neg_c == 0:
            heapq.heappush(heap, (neg_c, tie, lo, hi, e))
            break  # every remaining cell is already flat
        mid = (lo + hi) / 2
        total_gap += neg_c
        for part_lo, part_hi in ((lo, mid), (mid, hi)):
            e2, c2 = weigh(part_lo, part_hi)
            heapq.heappush(heap, (-c2, next(order), part_lo, part_hi, e2))
            total_gap += c2
        cells += 1
    leaves = sorted((lo, hi, e) for _, _, lo, hi, e in heap)
    lower = sum((e.low * (hi - lo) for lo, hi, e in leaves), Fraction(0))
    upper = sum((e.high * (hi - lo) for lo, hi, e in leaves), Fraction(0))
    return lower, upper, leaves


def _midpoint_sum_over(f: FunctionDescriptor, leaves, bits: int, n: int) -> Enclosure:
    lo_total = Fraction(0)
    hi_total = Fraction(0)
    for lo, hi, _ in leaves:
        e = F.evaluate(f, L.from_fraction((lo + hi) / 2), bits, layer=n)
        w = hi - lo
        lo_total += e.low * w
        hi_total += e.high * w
    return Enclosure(lo_total, hi_total)


def riemann_integral(f: FunctionDescriptor, a: LayeredReal, b: LayeredReal,
                     n: int, tol: Fraction = DEFAULT_TOLERANCE,
                     tags: str = "midpoint", cells: int | None = None,
                     max_partition: int = 2**22,
                     max_bracket_cells: int = 2**15) -> IntegralResult:
    """Tagged Riemann sums with a certified stopping rule.

    With explicit cells the sum is computed once and returned exactly (the
    historical grid-point tags are available as tags="left"). Otherwise
    uniform partitions double until successive midpoint sums agree within
    tol, and the agreement is then checked against an adaptively refined
    range bracket; the reported value is the midpoint sum over the
    certified partition, clamped into the bracket. A spell of identical
    sums on a step function can therefore trigger certification early but
    can never fake convergence.
    """
    if tags not in ("midpoint", "left"):
        raise DomainError(f"unknown tag scheme {tags!r}")
    af, bf = _exact_endpoints(a, b, n)
    bits = _tol_bits(tol) + 8
    out_rank = _integral_rank(f, n)

    if cells is not None:
        value = _tagged_sum(f, af, bf, cells, bits, n, tags)
        return IntegralResult(value, value, value, True, out_rank, cells)

    previous = None
    size = 2
    failed_bracket = None
    while size <= max_partition:
        value = _tagged_sum(f, af, bf, size, bits, n, tags)
        settled = previous is not None and value.gap(previous) <= tol \
            and value.width <= tol
        previous = value
        if settled and failed_bracket is None:
            lower, upper, leaves = _adaptive_bracket(f, af, bf, tol, bits, n,
                                                     max_bracket_cells)
            if upper - lower < tol:
                tagged = _midpoint_sum_over(f, leaves, bits, n)
                return IntegralResult(
                    lower_sum=Enclosure.exact(lower),
                    upper_sum=Enclosure.exact(upper),
                    riemann_value=tagged.intersect(Enclosure(lower, upper)),
                    integrable=True,
                    output_rank=out_rank,
                    partition_size=len(leaves),
                )
            # the budget will not grow, so remember the verdict and stop
            failed_bracket = (lower, upper, len(leaves))
            break
        size *= 2

    if failed_bracket is not None:
        lower, upper, size = failed_bracket
        return IntegralResult(Enclosure.exact(lower), Enclosure.exact(upper),
                              None, False, out_rank, size)
    fallback = previous if previous is not None else Enclosure.exact(Fraction(0))
    return IntegralResult(fallback, fallback, None, False, out_rank,
                          max_partition // 2)


# ---------------------------------------------------------------------------
# continuity
# ---------------------------------------------------------------------------


def _domain_clip(f: FunctionDescriptor, bits: int):
    lo = hi = None
    if f.domain_low is not None:
        lo = L.enclose(f.domain_low, bits).low
    if f.domain_high is not None:
        hi = L.enclose(f.domain_high, bits).high
    return lo, hi


def _window(xe: Enclosure, delta: Fraction, lo, hi) -> Enclosure | None:
    wlo, whi = xe.low - delta, xe.high + delta
    if lo is not None:
        wlo = max(wlo, lo)
    if hi is not None:
        whi = min(whi, hi)
    if wlo > whi:
        return None
    return Enclosure(wlo, whi)


def continuity_check(f: FunctionDescriptor, x: LayeredReal, n: int,
                     eps: Fraction, budget: ComplexityBudget = _DEFAULT_BUDGET,
                     precision: int = 48):
    """Hunt for a certified continuity window at x, observed at layer n.

    Returns (delta, None) when the range of f over [x-delta, x+delta],
    clipped to the domain, provably varies by less than eps; candidate
    deltas are 2^-j with the exponent budget quadrupled before giving up.
    Returns (None, witness) when no window certifies and a nearby layer-n
    point with a certified jump of at least eps keeps showing up as the
    enumeration budget grows. Anything in between is an honest
    budget-exhausted error.
    """
    if x.rank > n:
        raise DomainError(f"probe of rank {x.rank} is not visible at layer {n}")
    F._check_domain(f, x)
    fx = F.evaluate(f, x, precision, layer=n)
    xe = L.enclose(x, precision)
    lo, hi = _domain_clip(f, precision)

    max_exponent = budget.max_dyadic_exponent << 2
    for j in range(max_exponent + 1):
        window = _window(xe, Fraction(1, 2**j), lo, hi)
        if window is None:
            continue
        try:
            ye = F.evaluate_range(f, window, precision, layer=n)
        except (DomainError, BudgetExhaustedError):
            continue
        if ye.width < eps:
            return Fraction(1, 2**j), None

    witness = None
    for round_no in range(3):
        scan = ComplexityBudget(
            max_dyadic_exponent=budget.max_dyadic_exponent + 2 * round_no,
            max_poly_degree=budget.max_poly_degree,
            max_coeff_height=budget.max_coeff_height + round_no,
            max_series_terms=budget.max_series_terms,
        )
        found = _certified_violator(f, x, fx, n, eps, scan, precision)
        if found is None:
            witness = None
            break
        witness = found

    if witness is not None:
        return None, witness
    raise BudgetExhaustedError(
        "no continuity window certifies and no violator is certified")


def _certified_violator(f, x, fx, n, eps, budget, precision):
    """Nearest budgeted layer-n point whose value provably jumps by eps."""
    ball = topology.Ball(center=x, radius=Fraction(1), layer=n)
    xm = L.enclose(x, precision).midpoint
    best = None
    best_dist = None
    for y in topology.ball_points(ball, budget):
        if L.compare(y, x) == 0:
            continue
        try:
            fy = F.evaluate(f, y, precision, layer=n)
        except (DomainError, BudgetExhaustedError):
            continue
        if fx.gap(fy) >= eps:
            d = abs(L.enclose(y, precision).midpoint - xm)
            if best is None or d < best_dist:
                best, best_dist = y, d
    return best


def uniform_modulus(f: FunctionDescriptor, K, n: int, eps: Fraction,
                    budget: ComplexityBudget = _DEFAULT_BUDGET,
                    precision: int = 48):
    """One delta good for every enumerated pair in K, or a violating pair.

    Candidate deltas run from 1 down to one notch above the enumeration
    grid (at the grid spacing itself every pair check is vacuous). A delta
    is accepted when every enumerated pair closer than delta has a
    certified value spread below eps; it is rejected by a pair whose values
    provably differ by at least eps. A rejection that rests only on
    undecided enclosures is reported as budget exhaustion, not failure.
    """
    if sets.set_layer(K) > n:
        raise DomainError("the set is pitched above the observer layer")
    points = [p for p in sets.enumerate_points(K, budget) if p.rank <= n]
    if not points:
        raise DomainError("the set enumerates to nothing at this budget")
    values = []
    for p in points:
        try:
            values.append(F.evaluate(f, p, precision, layer=n))
        except (DomainError, BudgetExhaustedError):
            values.append(None)
    mids = [L.enclose(p, precision).midpoint for p in points]

    bad_pair = None
    for j in range(budget.max_dyadic_exponent):
        delta = Fraction(1, 2**j)
        bad_pair = None
        undecided = False
        for i in range(len(points)):
            if values[i] is None:
                continue
            for k in range(i + 1, len(points)):
                if mids[k] - mids[i] >= delta:
                    break  # points are sorted; the rest are farther
                if values[k] is None:
                    continue
                if values[i].hull(values[k]).width < eps:
                    continue
                if values[i].gap(values[k]) >= eps:
                    bad_pair = (points[i], points[k])
                    break
                undecided = True
            if bad_pair:
                break
        if bad_pair is None and not undecided:
            return delta, None
    if bad_pair is not None:
        return None, bad_pair
    raise BudgetExhaustedError("no delta certifies and no pair is refuted")


# ---------------------------------------------------------------------------
# Taylor expansion
# ---------------------------------------------------------------------------


def _forward_differences(f: FunctionDescriptor, x: LayeredReal, h: Fraction,
                         order: int, bits: int, n: int) -> list[Enclosure]:
    values = []
    for m in range(order + 1):
        point = L.combine(x, L.from_fraction(m * h), "+")
        values.append(F.evaluate(f, point, bits, layer=n))
    table = [values]
    for _ in range(order):
        prev = table[-1]
        table.append([b - a for a, b in zip(prev, prev[1:])])
    return [row[0] for row in table]


def _derivative_estimate(f: FunctionDescriptor, x: LayeredReal, h0: Fraction,
                         m: int, tol: Fraction, n: int):
    """m-th derivative from extrapolated difference ladders Delta^m / h^m."""
    bits = _tol_bits(tol)
    if m == 0:
        return "converged", F.evaluate(f, x, bits + 16, layer=n)

    def sample(j: int) -> Enclosure:
        h = h0 / 2**j
        diffs = _forward_differences(f, x, h, m, bits + j + 16, n)
        return diffs[m].scale(Fraction(1, h**m))

    status, value, _ = _extrapolated_limit(sample, tol, bits + 8)
    return status, value


def taylor_expand(f: FunctionDescriptor, x: LayeredReal, h: LayeredReal,
                  k: int, n: int,
                  tol: Fraction = DEFAULT_TOLERANCE) -> TaylorResult:
    """Degree-k expansion of f around x, evaluated at x + h.

    Coefficients are extrapolated derivative estimates, so they are exact
    for polynomial data, and the remainder f(x+h) - P(x+h) contains the
    truncation error by construction. finite_differences carries the raw
    forward-difference ladder Delta_h^m f(x) for m = 0..k+1 at the given h.
    """
    hf = h.exact_fraction()
    if hf is None or hf == 0:
        raise DomainError("the expansion step must be a nonzero exact rational")
    bits = _tol_bits(tol) + 16
    F._check_domain(f, x)
    F._check_domain(f, L.combine(x, h, "+"))

    raw = _forward_differences(f, x, hf, k + 1, bits, n)

    total = None
    fact = 1
    power = Fraction(1)
    for m in range(k + 1):
        status, d_m = _derivative_estimate(f, x, hf, m, tol, n)
        if status != "converged":
            raise BudgetExhaustedError(
                f"order-{m} coefficient did not converge ({status})")
        term = d_m.scale(power / fact)
        total = term if total is None else total + term
        fact *= m + 1
        power *= hf

    fxh = F.evaluate(f, L.combine(x, h, "+"), bits, layer=n)
    remainder = fxh - total
    return TaylorResult(
        polynomial_value=total,
        remainder=remainder,
        remainder_rank=n + k,
        finite_differences=tuple(raw),
    )


# ---------------------------------------------------------------------------
# smoothness
# ---------------------------------------------------------------------------


def _estimate_with_shrink(f, x, m, tol, n):
    """Derivative-ladder estimate that backs its initial step off the
    domain edge instead of failing outright."""
    h0 = Fraction(1)
    for _ in range(24):
        try:
            return _derivative_estimate(f, x, h0, m, tol, n)
        except DomainError:
            h0 /= 2
    return "budget_exhausted", None


def smoothness_class(f: FunctionDescriptor, n: int, k_max: int,
                     grid: tuple[LayeredReal, ...],
                     tol: Fraction = DEFAULT_TOLERANCE,
                     eps: Fraction = Fraction(1, 64),
                     budget: ComplexityBudget = _DEFAULT_BUDGET) -> SmoothnessReport:
    """Largest derivative order that exists and stays continuous on the grid.

    Order zero is a continuity check of f itself; order one gets the full
    two-sided derivative treatment so kinks are caught; higher orders ask
    the extrapolated difference ladder to converge at every grid point.
    Once an order fails, every higher order is marked failed without
    further work.
    """
    statuses: list[tuple[int, str]] = []
    highest = -1
    failed = None
    for k in range(k_max + 1):
        if failed is not None:
            statuses.append((k, failed))
            continue
        problem = None
        for p in grid:
            if k == 0:
                try:
                    delta, _witness = continuity_check(f, p, n, eps, budget)
                except BudgetExhaustedError:
                    problem = f"fails: continuity undecided at {_describe(p)}"
                    break
                except DomainError:
                    problem = f"fails: {_describe(p)} outside the domain"
                    break
                if delta is None:
                    problem = f"fails: jump near {_describe(p)}"
                    break
            elif k == 1:
                try:
                    r = fractal_derivative(f, p, n, tol)
                    status = r.status
                except DomainError:
                    status = "domain_error"
                if status != "converged":
                    problem = f"fails: order 1 {status} at {_describe(p)}"
                    break
            else:
                status, _ = _estimate_with_shrink(f, p, k, tol, n)
                if status != "converged":
                    problem = f"fails: order {k} {status} at {_describe(p)}"
                    break
        if problem is None:
            statuses.append((k, "continuous"))
            highest = k
        else:
            statuses.append((k, problem))
            failed = problem
    return SmoothnessReport(
        highest_k=highest,
        capped=highest == k_max,
        per_k_status=dict(statuses),
    )


def _describe(p: LayeredReal) -> str:
    pf = p.exact_fraction()
    return str(pf) if pf is not None else f"~{float(L.enclose(p, 20).midpoint):.4g}"


# ---------------------------------------------------------------------------
# fundamental theorem
# ---------------------------------------------------------------------------


def ftc_check(f: FunctionDescriptor, big_f: FunctionDescriptor,
              a: LayeredReal, x_end: LayeredReal, n: int,
              probe: LayeredReal, tol: Fraction = DEFAULT_TOLERANCE,
              layers=None, integral_tol: Fraction = Fraction(1, 2**10),
              max_partition: int = 2**14,
              max_bracket_cells: int = 2**13) -> FtcReport:
    """Does integrating f recover the endpoint difference of big_f, and does
    differentiating big_f recover f at the probe, layer by layer?

    tol governs the per-layer derivative verdicts; the integral side gets
    its own coarser integral_tol because certifying a bracket to derivative
    precision would cost millions of cells for no verdict gain. Rows never
    abort the report: evaluation trouble at a layer shows up as that row's
    status and a "fails" verdict.
    """
    if layers is None:
        layers = range(1, max(n, 1) + 1)
    bits = _tol_bits(tol) + 16
    try:
        integral = riemann_integral(f, a, x_end, n, integral_tol,
                                    max_partition=max_partition,
                                    max_bracket_cells=max_bracket_cells)
        integral_value = integral.riemann_value
    except (DomainError, BudgetExhaustedError):
        integral_value = None
    end_diff = F.evaluate(big_f, x_end, bits, layer=n) \
        - F.evaluate(big_f, a, bits, layer=n)
    agrees = integral_value is not None \
        and integral_value.gap(end_diff) <= integral_tol

    rows = []
    for layer in layers:
        try:
            fp = F.evaluate(f, probe, bits, layer=layer)
        except (DomainError, BudgetExhaustedError):
            fp = None
        try:
            d = fractal_derivative(big_f, probe, layer, tol)
            d_status, d_value = d.status, d.value
        except (DomainError, BudgetExhaustedError) as err:
            d_status, d_value = f"error: {err}", None

        if d_value is not None and fp is not None:
            verdict = "valid" if d_value.gap(fp) <= tol else "breaks"
        else:
            verdict = "fails"
        rows.append(FtcRow(layer, d_value, d_status, fp, verdict))

    return FtcReport(
        integral_of_derivative=integral_value,
        endpoint_difference=end_diff,
        agrees=agrees,
        per_layer_rows=tuple(rows),
    )

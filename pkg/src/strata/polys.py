"""Exact univariate polynomial helpers over the integers and rationals.

Coefficients are stored low-degree first.  Everything here is exact Fraction
or int arithmetic: Sturm sequences for root counting, bisection-based root
isolation, gcd over the rationals, and square-free reduction.  Degrees stay
small (single digits) so the quadratic-time algorithms are fine.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

IntPoly = tuple[int, ...]
RatPoly = tuple[Fraction, ...]


def normalize(coeffs: Sequence) -> tuple:
    cs = list(coeffs)
    while cs and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


def degree(p: Sequence) -> int:
    return len(normalize(p)) - 1


def evaluate(p: Sequence, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(normalize(p)):
        acc = acc * x + c
    return acc


def derivative(p: Sequence) -> tuple:
    q = normalize(p)
    return normalize(tuple(i * q[i] for i in range(1, len(q))))


def content(p: IntPoly) -> int:
    g = 0
    for c in p:
        g = gcd(g, abs(c))
    return g or 1


def primitive(p: IntPoly) -> IntPoly:
    q = normalize(p)
    if not q:
        return q
    g = content(q)
    q = tuple(c // g for c in q)
    if q[-1] < 0:
        q = tuple(-c for c in q)
    return q


def to_int_poly(p: RatPoly) -> IntPoly:
    """Clear denominators and reduce to a primitive integer polynomial."""
    q = normalize(p)
    if not q:
        return ()
    lcm = 1
    for c in q:
        d = Fraction(c).denominator
        lcm = lcm * d // gcd(lcm, d)
    return primitive(tuple(int(Fraction(c) * lcm) for c in q))


def add(p: Sequence, q: Sequence) -> tuple:
    n = max(len(p), len(q))
    return normalize(tuple(
        (p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)
    ))


def mul(p: Sequence, q: Sequence) -> tuple:
    p, q = normalize(p), normalize(q)
    if not p or not q:
        return ()
    out = [p[0] * q[0] * 0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return normalize(tuple(out))


def divmod_rat(p: RatPoly, q: RatPoly) -> tuple[RatPoly, RatPoly]:
    p = [Fraction(c) for c in normalize(p)]
    q = [Fraction(c) for c in normalize(q)]
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    quo = [Fraction(0)] * max(0, len(p) - len(q) + 1)
    while len(p) >= len(q) and p:
        shift = len(p) - len(q)
        factor = p[-1] / q[-1]
        quo[shift] = factor
        for i, c in enumerate(q):
            p[shift + i] -= factor * c
        while p and p[-1] == 0:
            p.pop()
    return normalize(tuple(quo)), normalize(tuple(p))


def gcd_rat(p: Sequence, q: Sequence) -> RatPoly:
    """Monic gcd over the rationals."""
    a = tuple(Fraction(c) for c in normalize(p))
    b = tuple(Fraction(c) for c in normalize(q))
    while b:
        _, r = divmod_rat(a, b)
        a, b = b, r
    if not a:
        return ()
    lead = a[-1]
    return tuple(c / lead for c in a)


def square_free(p: IntPoly) -> IntPoly:
    """Square-free part of an integer polynomial, primitive with positive lead."""
    q = primitive(normalize(p))
    if degree(q) <= 1:
        return q
    g = gcd_rat(q, derivative(q))
    if degree(g) == 0:
        return q
    quo, _ = divmod_rat(tuple(Fraction(c) for c in q), g)
    return to_int_poly(quo)


def sturm_chain(p: Sequence) -> list[RatPoly]:
    p0 = tuple(Fraction(c) for c in normalize(p))
    p1 = tuple(Fraction(c) for c in derivative(p0))
    chain = [p0, p1]
    while chain[-1]:
        _, r = divmod_rat(chain[-2], chain[-1])
        if not r:
            break
        chain.append(tuple(-c for c in r))
    return [c for c in chain if c]


def _sign_variations(chain: list[RatPoly], x: Fraction) -> int:
    signs = []
    for p in chain:
        v = evaluate(p, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(p: Sequence, lo: Fraction, hi: Fraction,
                chain: list[RatPoly] | None = None) -> int:
    """Number of distinct real roots in (lo, hi], assuming p is square-free."""
    if chain is None:
        chain = sturm_chain(p)
    return _sign_variations(chain, lo) - _sign_variations(chain, hi)


def root_bound(p: IntPoly) -> Fraction:
    """Cauchy bound: all real roots lie in [-B, B]."""
    q = normalize(p)
    lead = abs(q[-1])
    m = max((abs(c) for c in q[:-1]), default=0)
    return Fraction(1) + Fraction(m, lead)


def isolate_roots(p: IntPoly, lo: Fraction, hi: Fraction) -> list[tuple[Fraction, Fraction]]:
    """Isolating intervals (each containing exactly one root) for the distinct
    real roots of a square-free integer polynomial inside [lo, hi].

    Returned intervals have nonzero polynomial sign at both endpoints; roots
    that hit a probe endpoint are nudged into an enclosing open interval.
    """
    q = normalize(p)
    if degree(q) < 1:
        return []
    chain = sturm_chain(q)

    def adjust(x: Fraction, step: Fraction, direction: int) -> Fraction:
        # move an endpoint off a root of p
        while evaluate(q, x) == 0:
            x += direction * step
            step /= 2
        return x

    eps = Fraction(1, 1 << 8)
    left = adjust(lo, eps, -1)
    right = adjust(hi, eps, 1)
    out: list[tuple[Fraction, Fraction]] = []

    stack = [(left, right)]
    while stack:
        a, b = stack.pop()
        n = count_roots(q, a, b, chain)
        if n == 0:
            continue
        if n == 1:
            out.append((a, b))
            continue
        mid = (a + b) / 2
        mid = adjust(mid, (b - a) / 8, 1)
        stack.append((a, mid))
        stack.append((mid, b))

    # Trim isolating intervals back toward [lo, hi] so reported roots are
    # genuinely inside the requested range.
    trimmed = []
    for a, b in sorted(out):
        n = count_roots(q, max(a, left), min(b, right), chain)
        if n == 1:
            trimmed.append((max(a, left), min(b, right)))
    return trimmed


def refine_root(p: Sequence, lo: Fraction, hi: Fraction, width: Fraction) -> tuple[Fraction, Fraction]:
    """Bisect an isolating interval until it is narrower than width."""
    f_lo = evaluate(p, lo)
    if f_lo == 0:
        raise ValueError("isolating interval endpoint is a root")
    sign_lo = 1 if f_lo > 0 else -1
    while hi - lo >= width:
        mid = (lo + hi) / 2
        v = evaluate(p, mid)
        if v == 0:
            # exact hit: shrink symmetrically around it
            quarter = (hi - lo) / 4
            lo, hi = mid - quarter, mid + quarter
            if evaluate(p, lo) == 0 or evaluate(p, hi) == 0:
                lo, hi = mid - quarter / 3, mid + quarter / 3
            continue
        if (1 if v > 0 else -1) == sign_lo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def rational_roots(p: IntPoly) -> list[Fraction]:
    """All rational roots, by the rational root test (exact)."""
    q = primitive(normalize(p))
    if not q:
        return []
    if q[0] == 0:
        roots = [Fraction(0)]
        reduced = normalize(q[1:])
        return roots + rational_roots(reduced) if reduced else roots

    def divisors(n: int) -> list[int]:
        n = abs(n)
        out = []
        i = 1
        while i * i <= n:
            if n % i == 0:
                out.append(i)
                out.append(n // i)
            i += 1
        return sorted(set(out))

    found = []
    for num in divisors(q[0]):
        for den in divisors(q[-1]):
            for s in (1, -1):
                cand = Fraction(s * num, den)
                if evaluate(q, cand) == 0 and cand not in found:
                    found.append(cand)
    return sorted(found)


def rational_root_between(p: IntPoly, lo: Fraction, hi: Fraction) -> Fraction | None:
    """The rational root of p inside [lo, hi], or None.

    Assumes [lo, hi] isolates a single root. Any rational root in lowest
    terms has denominator dividing the lead coefficient, so once bisection
    narrows past that grid's spacing only a couple of candidates remain;
    this avoids the divisor enumeration of the full rational root test,
    which is hopeless for the large coefficients affine substitution makes.
    """
    if evaluate(p, lo) == 0:
        return lo
    if evaluate(p, hi) == 0:
        return hi
    m = abs(p[-1])
    flo, fhi = evaluate(p, lo), evaluate(p, hi)
    if (flo > 0) == (fhi > 0):
        return None
    target = Fraction(1, 2 * m)
    while hi - lo >= target:
        mid = (lo + hi) / 2
        fm = evaluate(p, mid)
        if fm == 0:
            return mid
        if (fm > 0) == (fhi > 0):
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    first = -((-lo.numerator * m) // lo.denominator)
    last = (hi.numerator * m) // hi.denominator
    for k in range(first, last + 1):
        if evaluate(p, Fraction(k, m)) == 0:
            return Fraction(k, m)
    return None


def deflate_rational_root(p: IntPoly, root: Fraction) -> IntPoly:
    """Divide out (x - root); root must be an exact rational root."""
    quo, rem = divmod_rat(tuple(Fraction(c) for c in p), (-root, Fraction(1)))
    if rem:
        raise ValueError("not a root")
    return to_int_poly(quo)

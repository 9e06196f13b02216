"""Strip regions of the triangle and their pair-correlation combinatorics.

The strip S_{m,n} collects the (s, t) whose (m, n) lattice point has
x-coordinate in the window (1-b, 1]:

    S_{m,n} = {(s, t) : 1/n - b/n + (m/n) s < t <= 1/n + (m/n) s}
            = {(s, t) : 1 - b < n t - m s <= 1}.

A_{m,n} is the strip clipped to the right half of the shrunken section,
{(s, t) in Omega_b : s >= 1/2}.  Two strips with distinct slopes intersect
in a parallelogram of raw area b^2 / |m n' - m' n|; for the clipped regions
to meet, the top edges must cross near the unit square, which forces the
integer band condition

    4 (n' - n) / 5  <=  m' n - m n'  <=  4 (n' - n)      (n < n').

All geometry here is exact rational; Monte Carlo enters only in the
statistics module as a cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import OrderError, SlopeCoincidence
from .polygon import EMPTY_REGION, RegionPolygon
from .triangle import Number, OmegaPoint


@dataclass(frozen=True)
class StripSpec:
    """Indices (m, n) and shrink parameter b of one strip."""

    m: int
    n: int
    b: Number

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.m < 0:
            raise ValueError("m must be >= 0")
        if not 0 < self.b < 1:
            raise ValueError("b must lie in (0, 1)")


def strip_contains(spec: StripSpec, p: OmegaPoint) -> bool:
    """Membership test, evaluated in the window form 1-b < n t - m s <= 1.

    Algebraically identical to the two t-inequalities; the window form stays
    exact for exact inputs and matches the lattice x-coordinate directly.
    """
    x = spec.n * p.t - spec.m * p.s
    return 1 - spec.b < x <= 1


def omega_b_polygon(b) -> RegionPolygon:
    """The shrunken section {(s,t) in Omega : s <= 1-b} as an exact triangle."""
    b = Fraction(b)
    if not 0 <= b < 1:
        raise ValueError("b must lie in [0, 1)")
    one = Fraction(1)
    return RegionPolygon(((0, one), (one - b, one), (one - b, b)))


def half_section_polygon(b) -> RegionPolygon:
    """The right half {(s,t) in Omega_b : s >= 1/2} of the shrunken section."""
    b = Fraction(b)
    half = Fraction(1, 2)
    if 1 - b <= half:
        return EMPTY_REGION
    return omega_b_polygon(b).clipped(-1, 0, -half)


def a_mn_region(spec: StripSpec) -> RegionPolygon:
    """The clipped strip A_{m,n} = S_{m,n} cap Omega_b cap {s >= 1/2}.

    Returns the empty region when the intersection is empty; `measure` on
    the result is the normalized triangle measure (twice the raw area).
    """
    b = Fraction(spec.b)
    base = half_section_polygon(b)
    if base.is_empty():
        return base
    # n t - m s <= 1
    upper = base.clipped(-spec.m, spec.n, 1)
    if upper.is_empty():
        return upper
    # n t - m s >= 1 - b  (closed boundary; a null set relative to measure)
    return upper.clipped(spec.m, -spec.n, -(1 - b))


def strip_intersection_measure(spec1: StripSpec, spec2: StripSpec):
    """Pair intersection: analytic full-strip area and exact clipped measure.

    Returns (unbounded_area, clipped_measure) where unbounded_area is the
    parallelogram area b^2/|m n' - m' n| of the two full strips and
    clipped_measure is the normalized measure of A_{m,n} cap A_{m',n'}
    obtained by exact polygon clipping.  The clipped measure never exceeds
    twice the unbounded area.
    """
    if spec1.b != spec2.b:
        raise ValueError("strips must share the shrink parameter b")
    cross = spec1.m * spec2.n - spec2.m * spec1.n
    if cross == 0:
        raise SlopeCoincidence(
            f"strips ({spec1.m},{spec1.n}) and ({spec2.m},{spec2.n}) share a slope"
        )
    b = Fraction(spec1.b)
    unbounded = b * b / abs(cross)
    region = a_mn_region(spec1)
    if not region.is_empty():
        region = region.clipped(-spec2.m, spec2.n, 1)
    if not region.is_empty():
        region = region.clipped(spec2.m, -spec2.n, -(1 - b))
    clipped = region.measure
    assert clipped <= 2 * unbounded
    return unbounded, clipped


def neccond_holds(m: int, n: int, m2: int, n2: int) -> bool:
    """Integer band test 4(n'-n)/5 <= m'n - mn' <= 4(n'-n) for n < n'."""
    if n >= n2:
        raise OrderError(f"requires n < n', got n={n}, n'={n2}")
    v = m2 * n - m * n2
    d = n2 - n
    return 4 * d <= 5 * v and v <= 4 * d


def admissible_pair_count(n: int, n2: int) -> int:
    """Exact number of (m, m') in [0, 2n] x [0, 2n'] inside the band.

    Counted by scanning m and resolving the m' interval with exact integer
    division; a literal double loop gives the same totals but is too slow
    for the exhaustive sweeps, so it lives in the test oracle instead.
    """
    if n >= n2:
        raise OrderError(f"requires n < n', got n={n}, n'={n2}")
    d = n2 - n
    lo = -(-4 * d // 5)  # smallest integer v with 5 v >= 4 d
    hi = 4 * d
    total = 0
    for m in range(0, 2 * n + 1):
        # v = m2 * n - m * n2 in [lo, hi]
        m2_lo = -(-(lo + m * n2) // n)
        m2_hi = (hi + m * n2) // n
        m2_lo = max(m2_lo, 0)
        m2_hi = min(m2_hi, 2 * n2)
        if m2_hi >= m2_lo:
            total += m2_hi - m2_lo + 1
    return total


def q_set_size(N: int) -> int:
    """Coprime pairs (m, n) in (N/6, N/3] x [N/2, N], counted exactly."""
    if N < 12:
        raise ValueError("N must be >= 12")
    m_lo = N // 6 + 1
    m_hi = N // 3
    n_lo = -(-N // 2)
    count = 0
    for m in range(m_lo, m_hi + 1):
        for n in range(n_lo, N + 1):
            if math.gcd(m, n) == 1:
                count += 1
    return count


def claim1_strip_bound(a, b) -> Fraction:
    """Exact lower bound for the half-section box-count integral.

    Sums the exact measures m(A_{m,n}) over the coprime index set
    (N/6, N/3] x [N/2, N] with N = floor(a/b).  Every such index pins a
    distinct primitive point inside the height-2a/b box whenever (s, t)
    lies in A_{m,n} (n <= N and s >= 1/2 keep the height below 2N <= 2a/b),
    so the sum bounds the integral of the box count from below.
    """
    a, b = Fraction(a), Fraction(b)
    N = int(a / b)
    if N < 1:
        raise ValueError("need a >= b")
    total = Fraction(0)
    for m in range(N // 6 + 1, N // 3 + 1):
        for n in range(-(-N // 2), N + 1):
            if math.gcd(m, n) == 1:
                total += a_mn_region(StripSpec(m, n, b)).measure
    return total


def strips_may_overlap(spec1: StripSpec, spec2: StripSpec) -> bool:
    """Cheap exact necessary test for the full strips to meet over s in [1/2, 1].

    The strips are bands of height b/n and b/n' below the lines
    t = (1 + m s)/n; they meet at some s in [1/2, 1] iff the line gap
    g(s) = (1 + m s)/n - (1 + m' s)/n' satisfies |g| <= b/n + b/n'
    somewhere on the interval, which for a linear g happens iff it does at
    an endpoint or g changes sign inside.  Used to prune exhaustive sweeps;
    every surviving pair is then decided by exact clipping.
    """
    if spec1.b != spec2.b:
        raise ValueError("strips must share the shrink parameter b")
    b = Fraction(spec1.b)
    m, n, m2, n2 = spec1.m, spec1.n, spec2.m, spec2.n
    width = b / n + b / n2

    def gap(s):
        return Fraction(1 + m * s, n) - Fraction(1 + m2 * s, n2)

    g_lo, g_hi = gap(Fraction(1, 2)), gap(1)
    if abs(g_lo) <= width or abs(g_hi) <= width:
        return True
    return (g_lo < 0) != (g_hi < 0)


def candidate_overlaps(n: int, n2: int, b) -> list[tuple[int, int]]:
    """All (m, m') in [0, 2n] x [0, 2n'] passing the band-overlap prefilter.

    Vectorized integer form of strips_may_overlap: with c = m n' - m' n and
    D = 2(n' - n), the scaled line gap at the interval endpoints is D + c
    and D + 2c, and bands can only meet when an endpoint gap is within the
    combined height 2b(n + n') (scaled) or the gap changes sign.  The
    filter is necessary for a nonempty clipped intersection, so exhaustive
    sweeps only pay for exact clipping on the survivors.
    """
    b = Fraction(b)
    m = np.arange(0, 2 * n + 1, dtype=np.int64)[:, None]
    m2 = np.arange(0, 2 * n2 + 1, dtype=np.int64)[None, :]
    c = m * n2 - m2 * n
    d = 2 * (n2 - n)
    g_lo = d + c
    g_hi = d + 2 * c
    tol_num = 2 * b.numerator * (n + n2)
    near = (np.abs(g_lo) * b.denominator <= tol_num) | (
        np.abs(g_hi) * b.denominator <= tol_num
    )
    crosses = np.sign(g_lo) * np.sign(g_hi) < 0
    rows, cols = np.nonzero(near | crosses)
    return list(zip(rows.tolist(), cols.tolist()))


__all__ = [
    "StripSpec",
    "a_mn_region",
    "admissible_pair_count",
    "candidate_overlaps",
    "half_section_polygon",
    "neccond_holds",
    "omega_b_polygon",
    "q_set_size",
    "strip_contains",
    "strip_intersection_measure",
    "strips_may_overlap",
]

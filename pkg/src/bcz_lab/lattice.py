"""Unimodular lattices attached to Farey-triangle points.

A point (s, t) corresponds to the lattice spanned by (s, 0) and (t, 1/s).
Its primitive points with positive height are exactly

    (x, y) = (n t - m s, n / s),   gcd(m, n) = 1,  n >= 1,  m >= 0,

once attention is restricted to 0 < x <= 1 (negative m forces x >= s + t > 1).
Ordering these points by slope y/x recovers the return times of the section
flow: the flow time to the n-th section return equals the slope of the n-th
primitive point in the window.

Two distinct primitive points never share a slope: equal slopes would make
them collinear with the origin, hence integer multiples of one another.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import CoprimalityError, SearchCeilingExceeded
from .triangle import Number, OmegaPoint

DEFAULT_SLOPE_CEILING = 2**31


@dataclass(frozen=True)
class LatticeBasis:
    """Basis ((s, 0), (t, 1/s)) of the lattice attached to a triangle point."""

    v1: tuple[Number, Number]
    v2: tuple[Number, Number]

    @classmethod
    def from_point(cls, p: OmegaPoint) -> "LatticeBasis":
        one = Fraction(1) if p.exact else 1.0
        return cls((p.s, 0 * one), (p.t, one / p.s))

    def determinant(self) -> Number:
        return self.v1[0] * self.v2[1] - self.v1[1] * self.v2[0]


@dataclass(frozen=True)
class PrimitivePoint:
    """A primitive lattice point indexed by a coprime pair (m, n)."""

    m: int
    n: int
    x: Number
    y: Number
    slope: Number


@dataclass(frozen=True)
class BoxSpec:
    """A half-open x-window crossed with a height bound: (x_lo, x_hi] x [0, y_max]."""

    x_lo: Number
    x_hi: Number
    y_max: Number

    def __post_init__(self):
        if not (0 <= self.x_lo < self.x_hi <= 1):
            raise ValueError("box needs 0 <= x_lo < x_hi <= 1")
        if not self.y_max > 0:
            raise ValueError("box needs y_max > 0")


def primitive_point(p: OmegaPoint, m: int, n: int) -> PrimitivePoint:
    """The (m, n) primitive point of the lattice of p.

    Coordinates are (n t - m s, n / s); the slope field is y/x and requires
    x != 0.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if math.gcd(m, n) != 1:
        raise CoprimalityError(f"({m}, {n}) is not coprime")
    x = n * p.t - m * p.s
    y = n / p.s if not p.exact else Fraction(n) / p.s
    slope = y / x if x != 0 else None
    return PrimitivePoint(m, n, x, y, slope)


def _ceil_div(num, den):
    """Exact ceiling of num/den for Fractions; math.ceil for floats."""
    return math.ceil(num / den)


def enumerate_primitive(p: OmegaPoint, x_lo, x_hi, slope_max) -> list[PrimitivePoint]:
    """All primitive points with x in (x_lo, x_hi], y > 0, slope <= slope_max.

    Sorted by increasing slope.  The scan is exhaustive: x <= x_hi <= 1 and
    slope <= S force y <= S x_hi, i.e. n <= s S x_hi, and for each n the
    x-window pins m to a finite range.
    """
    if not (0 <= x_lo < x_hi <= 1):
        raise ValueError("window needs 0 <= x_lo < x_hi <= 1")
    if not slope_max > 0:
        raise ValueError("slope_max must be positive")
    s, t = p.s, p.t
    found = []
    n_max = math.floor(s * slope_max * x_hi)
    for n in range(1, n_max + 1):
        y = Fraction(n, 1) / s if p.exact else n / s
        # x = n t - m s in (x_lo, x_hi]  <=>  m in [(n t - x_hi)/s, (n t - x_lo)/s)
        m_lo = max(0, _ceil_div(n * t - x_hi, s))
        m_hi = _ceil_div(n * t - x_lo, s) - 1
        for m in range(m_lo, m_hi + 1):
            if math.gcd(m, n) != 1:
                continue
            x = n * t - m * s
            slope = y / x
            if slope <= slope_max:
                found.append(PrimitivePoint(m, n, x, y, slope))
    found.sort(key=lambda q: q.slope)
    for a, b in zip(found, found[1:]):
        assert a.slope != b.slope, "distinct primitive points cannot share a slope"
    return found


def nth_slope(p: OmegaPoint, n: int, x_max, *, slope_ceiling: int = DEFAULT_SLOPE_CEILING):
    """Slope of the n-th smallest-slope primitive point with x in (0, x_max].

    Doubles a slope ceiling until at least n points are enumerated.  For
    degenerate lattices whose window is permanently empty (e.g. the integer
    lattice with x_max < 1) the doubling search bails out with
    SearchCeilingExceeded instead of spinning forever.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 < x_max <= 1:
        raise ValueError("x_max must be in (0, 1]")
    ceiling = max(1, math.ceil(4 * (n + 1) / float(x_max) ** 2))
    while True:
        points = enumerate_primitive(p, 0, x_max, ceiling)
        if len(points) >= n:
            return points[n - 1].slope
        if ceiling > slope_ceiling:
            raise SearchCeilingExceeded(
                f"fewer than {n} primitive points below slope {ceiling}"
            )
        ceiling *= 2


def box_count(p: OmegaPoint, box: BoxSpec) -> int:
    """Number of primitive points with x in (x_lo, x_hi] and 0 < y <= y_max.

    Only the rows above the x-axis are counted; on the sections of interest
    the horizontal vector has x <= 1 - b, outside the windows used here.
    """
    s, t = p.s, p.t
    n_max = math.floor(s * box.y_max)
    count = 0
    for n in range(1, n_max + 1):
        m_lo = max(0, _ceil_div(n * t - box.x_hi, s))
        m_hi = _ceil_div(n * t - box.x_lo, s) - 1
        for m in range(m_lo, m_hi + 1):
            if math.gcd(m, n) == 1:
                count += 1
    return count


def normalize_section(s, t_raw) -> OmegaPoint:
    """Canonical triangle representative (s, t) with t = t_raw (mod s).

    Slides t_raw by integer multiples of s into (1 - s, 1], the unique
    window of width s compatible with the triangle inequalities.
    """
    if not 0 < s <= 1:
        raise ValueError("s must be in (0, 1]")
    k = _ceil_div(t_raw - 1, s)
    return OmegaPoint(s, t_raw - k * s)


__all__ = [
    "BoxSpec",
    "DEFAULT_SLOPE_CEILING",
    "LatticeBasis",
    "PrimitivePoint",
    "box_count",
    "enumerate_primitive",
    "normalize_section",
    "nth_slope",
    "primitive_point",
]

"""The Farey triangle and the BCZ map.

The state space is the triangle

    Omega = {(s, t) : 0 < s, t <= 1, s + t > 1}

and the map acting on it is

    Phi(s, t) = (t, u),   u = -s + floor((1 + s)/t) * t.

Points carry either exact rational coordinates (`fractions.Fraction`) or
float64 coordinates.  Exact mode is used for identities, conjugacies and
period detection; float mode only for statistics.  The two kinds are never
mixed inside one point.

Orbits of points with a common denominator Q never leave the grid
{(p/Q, q/Q) : 0 < p, q <= Q}, so exact iteration stays in machine-sized
integers along Farey orbits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import DomainError

# Exact coordinates are reduced arbitrary-precision rationals; the stdlib
# Fraction already maintains both invariants (reduced form, positive
# denominator), so it is the exact-ratio carrier throughout the package.
ExactRatio = Fraction

Number = Union[Fraction, float]


def _coerce_pair(s, t):
    """Normalize a coordinate pair to a single numeric kind.

    ints and Fractions become Fractions (exact mode); floats stay floats.
    Mixing a float with a Fraction is refused rather than silently rounding.
    """
    s_float = isinstance(s, float)
    t_float = isinstance(t, float)
    if s_float != t_float and (isinstance(s, Fraction) or isinstance(t, Fraction)):
        raise TypeError("cannot mix exact and float coordinates in one point")
    if s_float or t_float:
        return float(s), float(t)
    return Fraction(s), Fraction(t)


def contains_omega(s, t) -> bool:
    """True iff (s, t) lies in the Farey triangle: 0 < s,t <= 1 and s + t > 1.

    Comparisons are exact for exact inputs; for floats they are plain float
    comparisons.
    """
    return 0 < s <= 1 and 0 < t <= 1 and s + t > 1


@dataclass(frozen=True)
class OmegaPoint:
    """A point of the Farey triangle, exact-rational or float64.

    Membership is validated on construction, so every OmegaPoint in
    circulation satisfies the triangle inequalities.
    """

    s: Number
    t: Number

    def __post_init__(self):
        s, t = _coerce_pair(self.s, self.t)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "t", t)
        if not contains_omega(s, t):
            raise DomainError(f"({s}, {t}) is not in the Farey triangle")

    @property
    def exact(self) -> bool:
        return isinstance(self.s, Fraction)

    def as_floats(self) -> tuple[float, float]:
        return float(self.s), float(self.t)

    def common_denominator(self) -> Optional[int]:
        """Least common denominator of (s, t) in exact mode, else None."""
        if not self.exact:
            return None
        return self.s.denominator * self.t.denominator // math.gcd(
            self.s.denominator, self.t.denominator
        )


def kappa(p: OmegaPoint) -> int:
    """Branch index floor((1 + s)/t); always >= 1 on the triangle."""
    if p.exact:
        return (1 + p.s) // p.t
    return math.floor((1.0 + p.s) / p.t)


def branch_matrix(j: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """The integer matrix ((0,1),(-1,j)) that the map applies on branch j."""
    if j < 1:
        raise ValueError("branch index must be >= 1")
    return ((0, 1), (-1, j))


def bcz_step(p: OmegaPoint) -> OmegaPoint:
    """One application of the map: (s, t) -> (t, -s + floor((1+s)/t) t).

    Exact mode is exact.  In float mode the branch index is adjusted by +-1
    when rounding pushes u outside (0, 1], so the image always satisfies the
    triangle invariants.
    """
    s, t = p.s, p.t
    j = kappa(p)
    u = j * t - s
    if not p.exact:
        # rounding can misplace the floor by one near branch boundaries
        while u > 1.0:
            j -= 1
            u = j * t - s
        while u <= 0.0:
            j += 1
            u = j * t - s
    return OmegaPoint(t, u)


@dataclass(frozen=True)
class OrbitRecord:
    """A finite orbit segment with optional exact period.

    `points` holds p, Phi(p), ..., Phi^n(p).  `period` is the first i >= 1
    with points[i] == points[0], reported in exact mode only.
    """

    points: tuple[OmegaPoint, ...]
    period: Optional[int]
    exact: bool

    def __post_init__(self):
        if self.period is not None:
            assert self.exact and self.points[self.period] == self.points[0]


def bcz_orbit(p: OmegaPoint, n: int) -> OrbitRecord:
    """Iterate the map n times from p, detecting exact returns to p.

    Period detection compares against the starting point only, which is
    enough for Farey orbits and keeps the scan linear.
    """
    if n < 1:
        raise ValueError("orbit length must be >= 1")
    points = [p]
    period = None
    q = p
    for i in range(1, n + 1):
        q = bcz_step(q)
        points.append(q)
        if period is None and p.exact and q == p:
            period = i
    return OrbitRecord(tuple(points), period, p.exact)


def farey_section_orbit(Q: int) -> list[OmegaPoint]:
    """Orbit of (1/Q, 1) until its first return, as exact points.

    The i-th point is (q_i/Q, q_{i+1}/Q) where q_i runs over the
    denominators of the Farey fractions of order Q in increasing order, so
    the orbit length is |F_Q| - 1.  Iteration is pure integer arithmetic on
    the numerators: (a, b) -> (b, floor((Q + a)/b) b - a).
    """
    if Q < 1:
        raise ValueError("Q must be >= 1")
    a, b = 1, Q
    numerators = [(a, b)]
    while True:
        a, b = b, ((Q + a) // b) * b - a
        if (a, b) == (1, Q):
            break
        numerators.append((a, b))
    return [OmegaPoint(Fraction(a, Q), Fraction(b, Q)) for a, b in numerators]


def reflect(p: OmegaPoint) -> OmegaPoint:
    """The coordinate swap sigma(s, t) = (t, s); conjugates Phi to its inverse."""
    return OmegaPoint(p.t, p.s)


def orbit_ints(a: int, b: int, Q: int, steps: int) -> list[tuple[int, int]]:
    """Iterate the map on numerators over the common denominator Q.

    Returns [(a_0, b_0), ..., (a_steps, b_steps)] with (a, b) representing
    the point (a/Q, b/Q).  Raises DomainError if the seed is off the grid.
    """
    if not (0 < a <= Q and 0 < b <= Q and a + b > Q):
        raise DomainError(f"({a}/{Q}, {b}/{Q}) is not in the Farey triangle")
    out = [(a, b)]
    for _ in range(steps):
        a, b = b, ((Q + a) // b) * b - a
        out.append((a, b))
    return out


def point_from_ints(a: int, b: int, Q: int) -> OmegaPoint:
    return OmegaPoint(Fraction(a, Q), Fraction(b, Q))


__all__ = [
    "ExactRatio",
    "Number",
    "OmegaPoint",
    "OrbitRecord",
    "bcz_orbit",
    "bcz_step",
    "branch_matrix",
    "contains_omega",
    "farey_section_orbit",
    "kappa",
    "orbit_ints",
    "point_from_ints",
    "reflect",
]

"""Shrunken sections and the renormalization conjugacy.

For a shrink parameter b in [0, 1) the section

    Omega_b = {(s, t) in Omega : s <= 1 - b}

corresponds to lattices whose horizontal vector has length at most 1 - b.
Scaling a lattice by diag(1-b, 1/(1-b)) conjugates the section return maps;
in triangle coordinates the conjugacy reads

    phi_b(s, t) = ((1-b) s, (1-b)(j s + t)),
    j = min{n >= 0 : (1-b)((n+1) s + t) > 1},

a near-identity map (it moves points by at most sqrt(2) b off a set of
measure O(b)).  The n-th return index R_b^(n) counts raw map steps at the
n-th landing in Omega_b; the event R_b^(n) = n + 1 has an equivalent
description inside the lattice: exactly one primitive point with x in
(1 - b, 1] sits below the n-th slope of the window (0, 1 - b].  Both routes
are computed and compared whenever the event is queried.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import CriterionMismatch, DomainError, IterationCeiling
from .lattice import enumerate_primitive, normalize_section, nth_slope
from .triangle import Number, OmegaPoint, bcz_step

DEFAULT_STEP_CEILING = 10**7


@dataclass(frozen=True)
class SectionConfig:
    """Shrink parameter b of the section Omega_b, plus an iteration guard.

    The step ceiling only protects against degenerate inputs; the expected
    return time is 1/(1-b)^2 map steps, so real orbits return almost
    immediately.
    """

    b: Number
    step_ceiling: int = DEFAULT_STEP_CEILING

    def __post_init__(self):
        if not 0 <= self.b < 1:
            raise ValueError("b must lie in [0, 1)")

    @property
    def exact(self) -> bool:
        return isinstance(self.b, Fraction)


@dataclass(frozen=True)
class ReturnRecord:
    """Outcome of following an orbit to its n-th landing in Omega_b."""

    start: OmegaPoint
    n: int
    total_steps: int
    landing: OmegaPoint

    def __post_init__(self):
        assert self.total_steps >= self.n


def omega_b_contains(p: OmegaPoint, cfg: SectionConfig) -> bool:
    """True iff p lies in the shrunken section, i.e. s <= 1 - b."""
    return p.s <= 1 - cfg.b


def _branch_count(s, t, b) -> int:
    """Minimal j >= 0 with (1-b)((j+1) s + t) > 1.

    The minimal integer strictly above theta = (1/(1-b) - t)/s is
    floor(theta) + 1, so j = max(0, floor(theta)); float inputs get a +-1
    fixup against the defining inequalities.
    """
    theta = (1 / (1 - b) - t) / s
    j = max(0, math.floor(theta))
    if isinstance(theta, float):
        while j > 0 and (1 - b) * (j * s + t) > 1:
            j -= 1
        while (1 - b) * ((j + 1) * s + t) <= 1:
            j += 1
    return j


def phi(p: OmegaPoint, cfg: SectionConfig) -> OmegaPoint:
    """The conjugacy into Omega_b: (s, t) -> ((1-b) s, (1-b)(j s + t)).

    The branch count j re-selects the rightmost lattice point of the first
    row after the diagonal scaling, which is what lands the image in the
    canonical t-window (1 - (1-b) s, 1].
    """
    if not cfg.b > 0:
        raise ValueError("phi requires b > 0")
    b = cfg.b
    j = _branch_count(p.s, p.t, b)
    return OmegaPoint((1 - b) * p.s, (1 - b) * (j * p.s + p.t))


def phi_inverse(q: OmegaPoint, cfg: SectionConfig) -> OmegaPoint:
    """Inverse of phi: rescale and slide t back into the canonical window."""
    if not cfg.b > 0:
        raise ValueError("phi_inverse requires b > 0")
    if not omega_b_contains(q, cfg):
        raise DomainError(f"({q.s}, {q.t}) is not in the shrunken section")
    b = cfg.b
    return normalize_section(q.s / (1 - b), q.t / (1 - b))


def return_map_b(p: OmegaPoint, cfg: SectionConfig) -> tuple[OmegaPoint, int]:
    """First landing of the orbit of p in Omega_b, with the step count."""
    if not omega_b_contains(p, cfg):
        raise DomainError(f"({p.s}, {p.t}) is not in the shrunken section")
    q = p
    for step in range(1, cfg.step_ceiling + 1):
        q = bcz_step(q)
        if omega_b_contains(q, cfg):
            return q, step
    raise IterationCeiling(f"no return to the section within {cfg.step_ceiling} steps")


def return_index(p: OmegaPoint, cfg: SectionConfig, n: int) -> ReturnRecord:
    """Raw step count R_b^(n) at the n-th landing of the orbit in Omega_b."""
    if n < 1:
        raise ValueError("n must be >= 1")
    q = p
    total = 0
    for _ in range(n):
        q, steps = return_map_b(q, cfg)
        total += steps
    return ReturnRecord(p, n, total, q)


def _count_window_below(p: OmegaPoint, b, threshold_slope) -> int:
    """Primitive points with x in (1-b, 1] and slope strictly below a bound."""
    points = enumerate_primitive(p, 1 - b, 1, threshold_slope)
    return sum(1 for q in points if q.slope < threshold_slope)


def plus_one_event(p: OmegaPoint, cfg: SectionConfig, n: int) -> bool:
    """Whether the n-th section return is the (n+1)-st raw return.

    Computed twice: by direct orbit iteration (R_b^(n) == n + 1) and by the
    lattice criterion (exactly one primitive point with x in (1 - b, 1]
    below the n-th slope of the window (0, 1 - b]).  Disagreement raises
    CriterionMismatch, which always indicates an implementation bug.
    """
    if not omega_b_contains(p, cfg):
        raise DomainError(f"({p.s}, {p.t}) is not in the shrunken section")
    b = cfg.b
    direct = return_index(p, cfg, n).total_steps == n + 1
    if b == 0:
        lattice_route = False
    else:
        sigma = nth_slope(p, n, 1 - b)
        lattice_route = _count_window_below(p, b, sigma) == 1
    if direct != lattice_route:
        raise CriterionMismatch(
            f"iteration says {direct}, lattice criterion says {lattice_route} "
            f"at ({p.s}, {p.t}), b={b}, n={n}"
        )
    return direct


def displacement(p: OmegaPoint, cfg: SectionConfig) -> float:
    """Euclidean distance between p and phi(p), as a float."""
    q = phi(p, cfg)
    ds = float(q.s) - float(p.s)
    dt = float(q.t) - float(p.t)
    return math.hypot(ds, dt)


__all__ = [
    "DEFAULT_STEP_CEILING",
    "ReturnRecord",
    "SectionConfig",
    "displacement",
    "omega_b_contains",
    "phi",
    "phi_inverse",
    "plus_one_event",
    "return_index",
    "return_map_b",
]

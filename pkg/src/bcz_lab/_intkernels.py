"""Vectorized exact-integer kernels over a common-denominator grid.

Monte Carlo samples are drawn on the grid {(p/Q, q/Q)} with Q = 2**40, so
every orbit step, window test and slope comparison below is exact integer
arithmetic (the map preserves the common denominator and keeps numerators
in (0, Q]).  int64 suffices throughout because

    numerators             <= 2**40,
    lattice row indices n  <= 2**13   (guarded),
    cross products n * x   <= 2**53,

and window bounds are pre-floored to the integer grid: an integer x lies in
(lo, hi] iff floor(lo Q) < x <= floor(hi Q).  The few comparisons that would
overflow int64 (slope-band membership, candidate-set sufficiency) are done
per sample in Python big integers.

Slope keys use float64 only to PRE-rank candidates; the selected order
statistic is verified (and if needed corrected) by exact cross
multiplication, so results never depend on float rounding.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import ConfigError, SearchCeilingExceeded

QBITS = 40
Q_GRID = 1 << QBITS
_N_CAP_LIMIT = 1 << 22  # keeps n * pt and cross products n * x inside int64


def philox_uniform(seed: int, start: int, count: int) -> np.ndarray:
    """Doubles of shape (count, 2); sample i consumes exactly counter block start+i.

    One Philox counter block yields four 64-bit words; each sample owns one
    block and uses the first two words, so sample i is a pure function of
    (seed, i) no matter how batches are partitioned.
    """
    bg = np.random.Philox(key=seed)
    if start:
        bg.advance(start)
    gen = np.random.Generator(bg)
    return gen.random(4 * count).reshape(count, 4)[:, :2]


def floor_times_q(value: Fraction) -> int:
    """floor(value * Q) for a rational value, exactly."""
    value = Fraction(value)
    return (value.numerator * Q_GRID) // value.denominator


def sample_ints(seed: int, start: int, count: int, s_lo: Fraction, s_hi: Fraction):
    """Exact grid samples of the triangle with s in [s_lo, s_hi].

    The s marginal has density proportional to s (the width of the
    t-window), realized by inverse CDF on the integer grid; t is then
    uniform on its window (1 - s, 1].  Returns int64 numerator arrays
    (ps, pt) over the common denominator Q_GRID.
    """
    lo = floor_times_q(s_lo)
    hi = floor_times_q(s_hi)
    if not 0 <= lo < hi <= Q_GRID:
        raise ConfigError(f"empty sampling window [{s_lo}, {s_hi}]")
    u = philox_uniform(seed, start, count)
    ps = np.ceil(np.sqrt(lo * lo + u[:, 0] * (hi * hi - lo * lo))).astype(np.int64)
    np.clip(ps, max(lo, 1), hi, out=ps)
    pt = Q_GRID - np.floor(u[:, 1] * ps).astype(np.int64)
    return ps, pt


def map_step_ints(ps, pt):
    """One exact map step on numerator arrays: (a, b) -> (b, floor((Q+a)/b) b - a)."""
    kappa = (Q_GRID + ps) // pt
    return pt, kappa * pt - ps


def section_mask(ps, b: Fraction):
    """Boolean mask for s <= 1 - b, evaluated exactly."""
    num, den = b.numerator, b.denominator
    if den * Q_GRID >= 1 << 62:
        raise ConfigError("b denominator too large for the integer engine")
    return ps * den <= (den - num) * Q_GRID


def return_steps(ps, pt, b: Fraction, n_returns: int, step_ceiling: int = 10**6):
    """Raw step counts at the n-th landing in the section s <= 1 - b.

    Vectorized across samples; every sample must start inside the section.
    """
    num, den = b.numerator, b.denominator
    rhs = (den - num) * Q_GRID
    if not section_mask(ps, b).all():
        raise ConfigError("a start point lies outside the section")
    k = len(ps)
    total = np.zeros(k, dtype=np.int64)
    remaining = np.full(k, n_returns, dtype=np.int64)
    idx = np.arange(k)
    a, c = ps.copy(), pt.copy()
    for _ in range(step_ceiling):
        if idx.size == 0:
            return total
        a, c = map_step_ints(a, c)
        total[idx] += 1
        landed = a * den <= rhs
        remaining[idx[landed]] -= 1
        alive = remaining[idx] > 0
        if not alive.all():
            idx = idx[alive]
            a = a[alive]
            c = c[alive]
    raise ConfigError(f"orbit did not return {n_returns} times in {step_ceiling} steps")


def window_candidates(ps: int, pt: int, n_cap: int, x_lo: int, x_hi: int):
    """Primitive points of one sample with row n <= n_cap and x in [x_lo+1, x_hi].

    Returns gcd-filtered int64 arrays (n, x); the physical coordinates are
    (x / Q, n Q / ps) and the slope is n Q^2 / (ps x).
    """
    if n_cap <= 0:
        z = np.zeros(0, dtype=np.int64)
        return z, z
    if n_cap > _N_CAP_LIMIT:
        raise ConfigError(f"row cap {n_cap} exceeds the int64 envelope")
    n = np.arange(1, n_cap + 1, dtype=np.int64)
    a = n * pt
    m_min = -((x_hi - a) // ps)
    np.maximum(m_min, 0, out=m_min)
    m_top = (a - x_lo - 1) // ps
    cnt = m_top - m_min + 1
    np.maximum(cnt, 0, out=cnt)
    total = int(cnt.sum())
    if total == 0:
        z = np.zeros(0, dtype=np.int64)
        return z, z
    idx = np.repeat(np.arange(n_cap), cnt)
    offsets = np.repeat(np.cumsum(cnt) - cnt, cnt)
    m = m_min[idx] + (np.arange(total) - offsets)
    nn = n[idx]
    keep = np.gcd(m, nn) == 1
    nn = nn[keep]
    xx = a[idx][keep] - m[keep] * ps
    return nn, xx


def _exact_rank_select(nn, xx, k: int) -> int:
    """Index of the k-th smallest slope n/x, exact despite float pre-ranking.

    Pre-ranks by float64 keys, then verifies the candidate's exact rank by
    integer cross multiplication, walking outward through the float order
    until the rank matches (exact slope ties are impossible for primitive
    points).
    """
    order = np.argsort(nn / xx, kind="stable")
    pos = k - 1
    for probe in _probe_order(pos, len(order)):
        cand = order[probe]
        below = int(np.count_nonzero(nn * xx[cand] < nn[cand] * xx))
        if below == k - 1:
            return cand
    raise AssertionError("exact rank selection failed")


def _probe_order(pos: int, size: int):
    yield pos
    for d in range(1, size):
        if pos - d >= 0:
            yield pos - d
        if pos + d < size:
            yield pos + d


def _row_cap(y_cap: int, ps: int) -> int:
    """Row index bound for physical height y <= y_cap: n Q / ps <= y_cap."""
    n_cap = (y_cap * ps) >> QBITS
    if n_cap > _N_CAP_LIMIT:
        raise ConfigError(f"height cap {y_cap} exceeds the int64 envelope")
    return int(n_cap)


def nth_slope_ints(ps: int, pt: int, n: int, x_hi: int, height_ceiling: int = 1 << 21):
    """n-th smallest slope in the window (0, x_hi/Q] as an exact pair (n_sel, x_sel).

    Candidates are capped by physical height; the cap is doubled until it
    provably contains the first n slopes: every skipped point has slope
    above y_cap Q / x_hi, so sigma_n <= y_cap Q / x_hi certifies the
    selection.  Heavy-tail samples (tiny s pushes all slopes above 1/s) are
    covered by the generous default ceiling; past it the search raises
    SearchCeilingExceeded (degenerate windows).
    """
    y_cap = max(8, (8 * (n + 1) * Q_GRID) // max(x_hi, 1))
    while True:
        nn, xx = window_candidates(ps, pt, _row_cap(y_cap, ps), 0, x_hi)
        if len(nn) >= n:
            sel = _exact_rank_select(nn, xx, n)
            n_sel, x_sel = int(nn[sel]), int(xx[sel])
            if n_sel * Q_GRID * x_hi <= y_cap * ps * x_sel:
                return n_sel, x_sel
        if y_cap > height_ceiling:
            raise SearchCeilingExceeded(
                f"fewer than {n} primitive points below height {y_cap}"
            )
        y_cap *= 2


def box_counts_ints(ps, pt, x_lo: Fraction, x_hi: Fraction, y_max: Fraction):
    """Primitive-point box counts for many samples at once.

    Counts points with x in (x_lo, x_hi] and 0 < y <= y_max per sample, via
    one flat candidate expansion across the whole batch.  Callers chunk the
    batch so the flat arrays stay small.
    """
    k = len(ps)
    counts = np.zeros(k, dtype=np.int64)
    if k == 0:
        return counts
    xlo = floor_times_q(Fraction(x_lo))
    xhi = floor_times_q(Fraction(x_hi))
    ym = Fraction(y_max)
    if ym.numerator * (1 << QBITS) >= 1 << 62 or ym.denominator >= 1 << 20:
        raise ConfigError("y_max outside the integer-engine envelope")
    n_cap = (ym.numerator * ps) // (ym.denominator * Q_GRID)
    if int(n_cap.max()) > _N_CAP_LIMIT:
        raise ConfigError("height cap exceeds the int64 envelope")
    total = int(n_cap.sum())
    if total == 0:
        return counts
    sample_of = np.repeat(np.arange(k), n_cap)
    offsets = np.repeat(np.cumsum(n_cap) - n_cap, n_cap)
    n = np.arange(total) - offsets + 1
    p_here = ps[sample_of]
    a = n * pt[sample_of]
    m_min = -((xhi - a) // p_here)
    np.maximum(m_min, 0, out=m_min)
    cnt = (a - xlo - 1) // p_here - m_min + 1
    np.maximum(cnt, 0, out=cnt)
    tot2 = int(cnt.sum())
    if tot2 == 0:
        return counts
    idx2 = np.repeat(np.arange(total), cnt)
    offs2 = np.repeat(np.cumsum(cnt) - cnt, cnt)
    m = m_min[idx2] + (np.arange(tot2) - offs2)
    nn = n[idx2]
    prim = np.gcd(m, nn) == 1
    hits = np.bincount(sample_of[idx2][prim], minlength=k)
    counts += hits.astype(np.int64)
    return counts


def count_below_slope(ps: int, pt: int, n_sel: int, x_sel: int, x_lo: int, x_hi: int):
    """Primitive points with x in [x_lo+1, x_hi] and slope strictly below n_sel/x_sel.

    Slopes exceed physical heights whenever x <= Q, so capping the height at
    ceil(sigma) keeps every point that could count; comparisons are exact
    int64 cross products.
    """
    y_cap = -((-n_sel * Q_GRID * Q_GRID) // (ps * x_sel))
    nn, xx = window_candidates(ps, pt, _row_cap(y_cap, ps) + 1, x_lo, x_hi)
    if len(nn) == 0:
        return 0
    return int(np.count_nonzero(nn * x_sel < n_sel * xx))

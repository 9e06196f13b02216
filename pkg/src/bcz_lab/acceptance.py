"""The acceptance suite: one callable check per quantitative criterion.

Each criterion function runs its sub-checks at the pinned parameters and
tolerances, and reports one PASS/FAIL line per sub-check.  The suite is the
exit gate of the package: `bcz-lab verify-all` aggregates the verdicts, and
the pytest wrapper asserts each one.

Oracles used here are independent of the code paths they certify: Farey
orbits are checked against mediant (Stern-Brocot) generation plus a totient
sieve, slope identities against closed forms, and Monte Carlo statistics
against exact strip geometry.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import CriterionMismatch
from .lattice import nth_slope
from .renorm import SectionConfig, phi, phi_inverse, plus_one_event, return_map_b
from .sampling import ExperimentSpec, Region, sample_exact, sample_floats
from .statistics import (
    ClaimKind,
    ObservableId,
    birkhoff_slope_rate,
    claim_integral,
    coprime_density,
    correlation_cesaro,
    g0_fraction,
    invariance_histogram_test,
    observable_mean,
    observable_values,
    plus_one_fraction,
    uniform_theta_grid,
    weyl_scan,
)
from .strips import (
    StripSpec,
    a_mn_region,
    admissible_pair_count,
    candidate_overlaps,
    neccond_holds,
    omega_b_polygon,
    q_set_size,
    strip_intersection_measure,
)
from .triangle import OmegaPoint, bcz_orbit, bcz_step, branch_matrix, farey_section_orbit

MASTER_SEED = 20260810


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    details: list[str] = field(default_factory=list)
    seconds: float = 0.0


class _Checker:
    def __init__(self):
        self.lines: list[str] = []
        self.ok = True

    def check(self, condition: bool, text: str):
        tag = "PASS" if condition else "FAIL"
        self.lines.append(f"{tag}  {text}")
        self.ok = self.ok and bool(condition)

    def result(self, number: int, name: str, seconds: float) -> CriterionResult:
        return CriterionResult(number, name, self.ok, self.lines, seconds)


# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------

def stern_brocot_denominators(Q: int) -> list[int]:
    """Denominators of the Farey fractions of order Q, by mediant generation.

    In-order walk of the mediant tree between 0/1 and 1/1, tracking
    denominators only (the mediant of p/q and p'/q' has denominator q + q').
    Independent of the map recurrence it certifies.
    """
    out = [1]
    frames = [(1, 1, 0)]
    while frames:
        a, b, state = frames.pop()
        qm = a + b
        if qm > Q:
            continue
        if state == 0:
            frames.append((a, b, 1))
            frames.append((a, qm, 0))
        else:
            out.append(qm)
            frames.append((qm, b, 0))
    out.append(1)
    return out


def totient_farey_size(Q: int) -> int:
    """|F_Q| = 1 + sum of Euler phi up to Q, by sieve."""
    phi_table = np.arange(Q + 1)
    for p in range(2, Q + 1):
        if phi_table[p] == p:  # p prime
            phi_table[p::p] -= phi_table[p::p] // p
    return 1 + int(phi_table[1:].sum())


def _phi_displacement_fraction(b: float, samples: int, seed: int) -> float:
    """Fraction of triangle samples moved farther than sqrt(2) b by phi."""
    spec = ExperimentSpec(Fraction(1, 4), Fraction(1, 100), samples, seed, Region.OMEGA)
    s, t = sample_floats(spec, 0, samples)
    c = 1.0 / (1.0 - b)
    j = np.maximum(0.0, np.floor((c - t) / s))
    for _ in range(3):
        low = (1.0 - b) * ((j + 1) * s + t) <= 1.0
        if not low.any():
            break
        j[low] += 1
    s2 = (1.0 - b) * s
    t2 = (1.0 - b) * (j * s + t)
    disp_sq = (s - s2) ** 2 + (t - t2) ** 2
    return float(np.mean(disp_sq > 2.0 * b * b + 1e-15))


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------

def criterion_1() -> CriterionResult:
    """Exact identities: fixed point, Farey periods, pointwise orbit match."""
    t0 = time.perf_counter()
    c = _Checker()
    one = OmegaPoint(1, 1)
    c.check(bcz_step(one) == one, "the corner (1,1) is a fixed point")
    rec = bcz_orbit(OmegaPoint(Fraction(1, 5), 1), 10)
    c.check(rec.period == 10, "orbit of (1/5, 1) has exact period 10")
    all_match = True
    all_sizes = True
    for Q in range(1, 101):
        orbit = farey_section_orbit(Q)
        denoms = stern_brocot_denominators(Q)
        if len(orbit) != totient_farey_size(Q) - 1 or len(orbit) != len(denoms) - 1:
            all_sizes = False
        pts = [(Fraction(denoms[i], Q), Fraction(denoms[i + 1], Q))
               for i in range(len(denoms) - 1)]
        if [(p.s, p.t) for p in orbit] != pts:
            all_match = False
    c.check(all_sizes, "orbit length equals |F_Q| - 1 (totient sieve) for Q <= 100")
    c.check(all_match, "orbit equals the Stern-Brocot pairs pointwise for Q <= 100")
    dt = time.perf_counter() - t0
    c.check(dt < 10.0, f"runtime {dt:.2f} s < 10 s")
    return c.result(1, "exact identities", dt)


def criterion_2() -> CriterionResult:
    """Measure facts: section areas, unimodular branches, histogram invariance."""
    t0 = time.perf_counter()
    c = _Checker()
    for b in (Fraction(1, 10), Fraction(1, 100)):
        c.check(omega_b_polygon(b).measure == (1 - b) ** 2,
                f"exact polygon measure of the b={b} section is (1-b)^2")
    dets_ok = all(
        m[0][0] * m[1][1] - m[0][1] * m[1][0] == 1
        for m in (branch_matrix(j) for j in range(1, 10_001))
    )
    c.check(dets_ok, "branch matrices ((0,1),(-1,j)) are unimodular for j <= 10^4")
    spec = ExperimentSpec(Fraction(1, 4), Fraction(1, 100), 1_000_000,
                          MASTER_SEED + 2, Region.OMEGA)
    rep = invariance_histogram_test(spec, 16, 5)
    c.check(rep.estimate < 0.01,
            f"invariance TV distance {rep.estimate:.5f} < 0.01 "
            "(10^6 samples, 16x16 bins, 5 iterates)")
    dt = time.perf_counter() - t0
    return c.result(2, "measure facts", dt)


def criterion_3() -> CriterionResult:
    """Conjugacy: exact intertwining, exact round trips, near-identity decay."""
    t0 = time.perf_counter()
    c = _Checker()
    for b in (Fraction(1, 10), Fraction(1, 100)):
        cfg = SectionConfig(b)
        spec = ExperimentSpec(Fraction(1, 4), b, 1000, MASTER_SEED + 3, Region.OMEGA)
        pts = sample_exact(spec, 0, 1000)
        conj = 0
        trips = 0
        for p in pts:
            image = phi(p, cfg)
            if phi(bcz_step(p), cfg) == return_map_b(image, cfg)[0]:
                conj += 1
            if phi_inverse(image, cfg) == p and phi(phi_inverse(image, cfg), cfg) == image:
                trips += 1
        c.check(conj == len(pts),
                f"phi intertwines the map with the b={b} return map "
                f"on {conj}/{len(pts)} exact points")
        c.check(trips == len(pts),
                f"phi round trips are exact on {trips}/{len(pts)} points (b={b})")
    fracs = [
        _phi_displacement_fraction(b, 200_000, MASTER_SEED + 30 + i)
        for i, b in enumerate((0.1, 0.01, 0.001))
    ]
    c.check(fracs[0] > fracs[1] > fracs[2],
            "fraction displaced beyond sqrt(2) b strictly decreases: "
            + " > ".join(f"{f:.5f}" for f in fracs))
    dt = time.perf_counter() - t0
    return c.result(3, "renormalization conjugacy", dt)


def criterion_4() -> CriterionResult:
    """Dual-route agreement for the plus-one return event."""
    t0 = time.perf_counter()
    c = _Checker()
    a = Fraction(1, 4)
    for b in (Fraction(1, 100), Fraction(1, 1000)):
        n_depth = int(a / b)
        spec = ExperimentSpec(a, b, 500, MASTER_SEED + 4, Region.OMEGA_B)
        pts = sample_exact(spec, 0, 500)
        cfg = SectionConfig(b)
        mismatches = 0
        events = 0
        for p in pts:
            try:
                if plus_one_event(p, cfg, n_depth):
                    events += 1
            except CriterionMismatch:
                mismatches += 1
        c.check(mismatches == 0,
                f"b={b}: zero mismatches between iteration and window count "
                f"on 500 exact samples ({events} events)")
    dt = time.perf_counter() - t0
    return c.result(4, "plus-one event criterion", dt)


def criterion_5() -> CriterionResult:
    """Return/slope correspondence: first-return identity, shift relabeling."""
    t0 = time.perf_counter()
    c = _Checker()
    spec = ExperimentSpec(Fraction(1, 4), Fraction(1, 100), 10_000,
                          MASTER_SEED + 5, Region.OMEGA)
    pts = sample_exact(spec, 0, 10_000)
    exact_hits = sum(1 for p in pts if nth_slope(p, 1, 1) == 1 / (p.s * p.t))
    c.check(exact_hits == len(pts),
            f"first window slope equals 1/(s t) exactly on {exact_hits}/10000 points")
    shift_ok = True
    for p in sample_exact(spec, 10_000, 20):
        sigma = [nth_slope(p, k, 1) for k in range(1, 52)]
        q = bcz_step(p)
        sigma_q = [nth_slope(q, k, 1) for k in range(1, 51)]
        if any(sigma_q[k - 1] != sigma[k] - sigma[0] for k in range(1, 51)):
            shift_ok = False
            break
    c.check(shift_ok,
            "slope sequence of the image is the shifted sequence minus the "
            "first return, for n <= 50 on 20 exact points")
    dt = time.perf_counter() - t0
    return c.result(5, "return/slope correspondence", dt)


def criterion_6() -> CriterionResult:
    """Constants: mean return rate pi^2/3 and primitive density 6/pi^2."""
    t0 = time.perf_counter()
    c = _Checker()
    spec = ExperimentSpec(Fraction(1, 4), Fraction(1, 100), 10,
                          MASTER_SEED + 6, Region.OMEGA)
    s, t = sample_floats(spec, 0, 10)
    target = math.pi**2 / 3
    rates = [birkhoff_slope_rate(OmegaPoint(float(a), float(bb)), 100_000, 1.0)
             for a, bb in zip(s, t)]
    close = sum(1 for r in rates if abs(r - target) / target < 0.02)
    c.check(close >= 9,
            f"slope rate within 2% of pi^2/3 for {close}/10 seeds at N=10^5")
    target9 = math.pi**2 / (3 * 0.9**2)
    rates9 = [birkhoff_slope_rate(OmegaPoint(float(a), float(bb)), 100_000, 0.9)
              for a, bb in zip(s, t)]
    close9 = sum(1 for r in rates9 if abs(r - target9) / target9 < 0.02)
    c.check(close9 >= 9,
            f"slope rate within 2% of pi^2/(3 (1-b)^2) for {close9}/10 seeds (b=0.1)")
    dens = coprime_density(2000)
    c.check(abs(dens - 6 / math.pi**2) < 0.005,
            f"coprime density at M=2000 is {dens:.5f}, within 0.005 of 6/pi^2")
    dt = time.perf_counter() - t0
    c.check(dt < 60.0, f"runtime {dt:.2f} s < 60 s")
    return c.result(6, "ergodic constants", dt)


def criterion_7() -> CriterionResult:
    """First-moment integral: lower bound and uniformity in b."""
    t0 = time.perf_counter()
    c = _Checker()
    a = Fraction(1, 4)
    runs = {}
    for b in (Fraction(1, 1000), Fraction(1, 100)):
        spec = ExperimentSpec(a, b, 100_000, MASTER_SEED + 7, Region.HALF_SECTION)
        runs[b] = claim_integral(ClaimKind.F1, spec)
    est_fine = runs[Fraction(1, 1000)].estimate
    c.check(est_fine >= float(a) / 100,
            f"F1 integral {est_fine:.4f} >= a/100 = {float(a)/100} at b=10^-3")
    ratio = est_fine / runs[Fraction(1, 100)].estimate
    c.check(0.5 <= ratio <= 2.0,
            f"estimates at b=10^-2 and 10^-3 within factor 2 (ratio {ratio:.3f})")
    dt = time.perf_counter() - t0
    return c.result(7, "first-moment lower bound", dt)


def criterion_8() -> CriterionResult:
    """Excess second moment scales quadratically in a."""
    t0 = time.perf_counter()
    c = _Checker()
    b = Fraction(1, 1000)
    avals = [Fraction(1, 20), Fraction(1, 10), Fraction(1, 5), Fraction(2, 5)]
    estimates = []
    for a in avals:
        spec = ExperimentSpec(a, b, 100_000, MASTER_SEED + 8, Region.HALF_SECTION)
        estimates.append(claim_integral(ClaimKind.F2_EXCESS, spec).estimate)
    slope = np.polyfit(np.log([float(a) for a in avals]), np.log(estimates), 1)[0]
    c.check(1.7 <= slope <= 2.3,
            f"log-log slope of the excess integral in a is {slope:.3f}, in [1.7, 2.3]")
    dt = time.perf_counter() - t0
    return c.result(8, "second-moment scaling", dt)


def criterion_9() -> CriterionResult:
    """Slope band occupancy and uniformly positive plus-one frequency."""
    t0 = time.perf_counter()
    c = _Checker()
    a = Fraction(1, 4)
    g0 = g0_fraction(ExperimentSpec(a, Fraction(1, 1000), 10_000,
                                    MASTER_SEED + 9, Region.OMEGA_B))
    c.check(g0.estimate >= 0.9,
            f"slope-band fraction {g0.estimate:.4f} >= 0.9 at b=10^-3, 10^4 samples")
    plus = {}
    for b in (Fraction(1, 100), Fraction(1, 1000)):
        plus[b] = plus_one_fraction(ExperimentSpec(a, b, 10_000,
                                                   MASTER_SEED + 90, Region.OMEGA_B))
    p2, p3 = plus[Fraction(1, 100)].estimate, plus[Fraction(1, 1000)].estimate
    c.check(p2 > 0 and p3 > 0, f"plus-one frequency positive: {p2:.4f}, {p3:.4f}")
    ratio = p2 / p3 if p3 else math.inf
    c.check(1 / 3 <= ratio <= 3,
            f"plus-one frequencies at b=10^-2 vs 10^-3 within factor 3 "
            f"(ratio {ratio:.3f})")
    dt = time.perf_counter() - t0
    return c.result(9, "return-band and plus-one frequency", dt)


def _parallelogram_uncut(s1: StripSpec, s2: StripSpec) -> bool:
    """Whether the full-strip intersection lies inside the clipped half-section.

    The parallelogram's four vertices are the pairwise crossings of the
    strip boundary lines; containment in the open part of the region
    {1/2 <= s <= 1-b, s+t > 1, t <= 1} is checked exactly.
    """
    b = Fraction(s1.b)
    corners = []
    for off1 in (Fraction(0), b):
        for off2 in (Fraction(0), b):
            # n t - m s = 1 - off1;  n' t - m' s = 1 - off2
            det = s1.m * s2.n - s2.m * s1.n
            tv = ((1 - off2) * s1.m - (1 - off1) * s2.m)
            sv = ((1 - off2) * s1.n - (1 - off1) * s2.n)
            corners.append((Fraction(sv, det), Fraction(tv, det)))
    return all(
        Fraction(1, 2) <= sx <= 1 - b and sx + tx > 1 and tx <= 1
        for sx, tx in corners
    )


def criterion_10() -> CriterionResult:
    """Strip combinatorics: areas, disjointness, necessity, counting bounds."""
    t0 = time.perf_counter()
    c = _Checker()

    rng = np.random.Generator(np.random.Philox(key=MASTER_SEED + 10))
    b = Fraction(1, 100)
    uncut_checked = 0
    uncut_ok = True
    bound_ok = True
    tested = 0
    while uncut_checked < 40 and tested < 4000:
        tested += 1
        n = int(rng.integers(1, 40))
        n2 = int(rng.integers(n + 1, n + 30))
        m = int(rng.integers(0, 2 * n + 1))
        m2 = int(rng.integers(0, 2 * n2 + 1))
        if m * n2 == m2 * n:
            continue
        s1, s2 = StripSpec(m, n, b), StripSpec(m2, n2, b)
        unbounded, clipped = strip_intersection_measure(s1, s2)
        if clipped > 2 * unbounded:
            bound_ok = False
        if _parallelogram_uncut(s1, s2):
            uncut_checked += 1
            if clipped != 2 * unbounded:
                uncut_ok = False
    c.check(uncut_ok and uncut_checked >= 40,
            f"clipped measure equals the parallelogram value on {uncut_checked} "
            "uncut random pairs")
    c.check(bound_ok, "clipped measure never exceeded twice the parallelogram area")

    same_n_ok = True
    for n in range(1, 51):
        regions = {m: a_mn_region(StripSpec(m, n, Fraction(1, 10)))
                   for m in range(0, 2 * n + 1)}
        for m in range(0, 2 * n + 1):
            if regions[m].is_empty():
                continue
            for m2 in range(m + 1, 2 * n + 1):
                _, clipped = strip_intersection_measure(
                    StripSpec(m, n, Fraction(1, 10)), StripSpec(m2, n, Fraction(1, 10))
                )
                if clipped != 0:
                    same_n_ok = False
    c.check(same_n_ok, "same-n regions are exactly disjoint for all n <= 50 (b=0.1)")

    b_nec = Fraction(1, 20)
    necessity_ok = True
    positive_pairs = 0
    for n in range(1, 41):
        for n2 in range(n + 1, 41):
            for m, m2 in candidate_overlaps(n, n2, b_nec):
                _, clipped = strip_intersection_measure(
                    StripSpec(m, n, b_nec), StripSpec(m2, n2, b_nec)
                )
                if clipped > 0:
                    positive_pairs += 1
                    if not neccond_holds(m, n, m2, n2):
                        necessity_ok = False
    c.check(necessity_ok and positive_pairs > 0,
            f"integer band condition held for every positive intersection "
            f"({positive_pairs} pairs, n < n' <= 40, b=0.05)")

    count_ok = all(
        admissible_pair_count(n, n2) <= 8 * (n2 - n)
        for n in range(1, 121)
        for n2 in range(n + 1, 121)
    )
    c.check(count_ok, "admissible pair count <= 8 (n'-n) exhaustively for n' <= 120")

    for N in (60, 200):
        size = q_set_size(N)
        c.check(size >= N * N / 20,
                f"coprime index set at N={N} has {size} elements "
                f"(target N^2/20 = {N*N/20:.0f})")
    dt = time.perf_counter() - t0
    return c.result(10, "strip combinatorics", dt)


def criterion_11() -> CriterionResult:
    """Weak-mixing diagnostics: Cesaro decay, Weyl smallness, periodic control."""
    t0 = time.perf_counter()
    c = _Checker()
    spec = ExperimentSpec(Fraction(1, 4), Fraction(1, 100), 1,
                          MASTER_SEED + 11, Region.OMEGA)
    s, t = sample_floats(spec, 0, 1)
    p = OmegaPoint(float(s[0]), float(t[0]))
    ces = correlation_cesaro(ObservableId.EXP_S, ObservableId.EXP_S, p,
                             1_000_000, 10_000)
    c.check(ces[9_999] < 0.5 * ces[99],
            f"Cesaro average decays: {ces[9_999]:.5f} < half of {ces[99]:.5f}")

    mean = observable_mean(ObservableId.EXP_S)

    def centered(ss, tt):
        return observable_values(ObservableId.EXP_S, ss, tt) - mean

    mag, theta = weyl_scan(centered, p, 1_000_000, uniform_theta_grid(1000))
    c.check(mag <= 0.05,
            f"largest Weyl sum magnitude {mag:.5f} <= 0.05 over a 10^3 theta grid")

    periodic = OmegaPoint(Fraction(1, 5), 1)
    rec = bcz_orbit(periodic, 10)
    ces_p = correlation_cesaro(ObservableId.EXP_S, ObservableId.EXP_S,
                               OmegaPoint(0.2, 1.0), 1_000_000, 10_000)
    c.check(rec.period == 10 and ces_p[9_999] >= 0.5 * ces_p[99],
            "the order-5 periodic orbit is flagged (exact period 10, "
            f"non-decaying Cesaro ratio {ces_p[9_999]/ces_p[99]:.3f})")
    dt = time.perf_counter() - t0
    return c.result(11, "weak-mixing diagnostics", dt)


CRITERIA = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
    criterion_11,
]


def run_all(wanted=None, echo: bool = False) -> list[CriterionResult]:
    """Run the acceptance criteria (all, or a set of numbers) in order."""
    results = []
    total = 0.0
    for idx, fn in enumerate(CRITERIA, start=1):
        if wanted is not None and idx not in wanted:
            continue
        res = fn()
        total += res.seconds
        results.append(res)
        if echo:
            tag = "PASS" if res.passed else "FAIL"
            print(f"{tag}  criterion {res.number}: {res.name} ({res.seconds:.1f} s)")
            for line in res.details:
                print(f"      {line}")
    if echo:
        print(f"total runtime {total:.1f} s; "
              f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    return results


__all__ = ["CriterionResult", "CRITERIA", "run_all", "stern_brocot_denominators",
           "totient_farey_size"]

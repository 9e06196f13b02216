"""Deterministic region sampling and experiment plumbing.

Samples are indexed: sample i is a pure function of (seed, i), realized by
giving each index its own counter block of a Philox stream.  Chunked and
threaded runs therefore produce identical streams, and the reduction order
is fixed by chunk index, so reports do not depend on the worker count.
The BCZ_LAB_THREADS environment variable caps the worker pool.

Sampling is by inverse CDF on the triangle (s has density proportional to
its t-window width, t is uniform on the window), which consumes exactly two
draws per sample; rejection would break the per-index counter alignment.
All samples live on the exact grid of the integer kernels, so the float
surface sees the same points as the exact engines.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterator, Optional

import numpy as np

from . import _intkernels as ik
from .errors import ConfigError
from .triangle import OmegaPoint


class Region(str, Enum):
    OMEGA = "omega"
    OMEGA_B = "omega_b"
    HALF_SECTION = "half_section"


def _as_fraction(value) -> Fraction:
    """Exact conversion; decimal strings like '0.001' give small denominators."""
    if isinstance(value, str):
        return Fraction(value)
    return Fraction(value)


@dataclass(frozen=True)
class ExperimentSpec:
    """Parameters of one statistical run.

    `a` is the box-height budget and `b` the shrink parameter; N = floor(a/b)
    is the return depth all derived quantities use.  Both are stored as exact
    rationals so the integer engine can honor window boundaries exactly;
    pass decimal strings or Fractions (float 0.001 is a 52-bit dyadic and
    gets rejected by the engine envelope).
    """

    a: Fraction
    b: Fraction
    samples: int
    seed: int
    region: Region = Region.OMEGA

    def __post_init__(self):
        object.__setattr__(self, "a", _as_fraction(self.a))
        object.__setattr__(self, "b", _as_fraction(self.b))
        object.__setattr__(self, "region", Region(self.region))
        if not 0 < self.b < 1:
            raise ConfigError("b must lie in (0, 1)")
        if not self.b <= self.a < 1:
            raise ConfigError("need b <= a < 1 so that N = floor(a/b) >= 1")
        if self.samples < 1:
            raise ConfigError("samples must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")

    @property
    def n_depth(self) -> int:
        return int(self.a // self.b)

    def s_bounds(self) -> tuple[Fraction, Fraction]:
        hi = 1 - self.b
        if self.region is Region.OMEGA:
            return Fraction(0), Fraction(1)
        if self.region is Region.OMEGA_B:
            return Fraction(0), hi
        return Fraction(1, 2), hi


@dataclass
class RunReport:
    """Estimate plus verdict for one statistic.

    The verdict compares the estimate against the stated threshold in the
    stated direction; metadata echoes the spec and records wall time.
    """

    estimate: float
    stderr: float
    samples_used: int
    threshold: float
    verdict: bool
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        assert self.stderr >= 0


def spec_echo(spec: ExperimentSpec) -> dict:
    return {
        "a": str(spec.a),
        "b": str(spec.b),
        "samples": spec.samples,
        "seed": spec.seed,
        "region": spec.region.value,
    }


def worker_count() -> int:
    cap = os.environ.get("BCZ_LAB_THREADS")
    if cap is not None:
        try:
            cap = int(cap)
        except ValueError as exc:
            raise ConfigError("BCZ_LAB_THREADS must be a positive integer") from exc
        if cap < 1:
            raise ConfigError("BCZ_LAB_THREADS must be a positive integer")
        return cap
    return min(4, os.cpu_count() or 1)


def run_chunks(worker, total: int, chunk: int) -> list:
    """Apply worker(start, count) over fixed chunk boundaries, in order.

    Chunk boundaries depend only on (total, chunk), never on the pool size,
    and results are reduced in chunk order, so the output is identical for
    any worker count.
    """
    spans = [(start, min(chunk, total - start)) for start in range(0, total, chunk)]
    threads = worker_count()
    if threads == 1 or len(spans) == 1:
        return [worker(s, c) for s, c in spans]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda sc: worker(*sc), spans))


def sample_ints(spec: ExperimentSpec, start: int, count: int):
    """Exact grid numerators (ps, pt) for samples [start, start+count)."""
    s_lo, s_hi = spec.s_bounds()
    return ik.sample_ints(spec.seed, start, count, s_lo, s_hi)


def sample_floats(spec: ExperimentSpec, start: int, count: int):
    """The same sample points as float64 coordinates."""
    ps, pt = sample_ints(spec, start, count)
    inv = 1.0 / ik.Q_GRID
    return ps * inv, pt * inv


def sample_region(spec: ExperimentSpec, limit: Optional[int] = None) -> Iterator[OmegaPoint]:
    """Stream the sample points as float-mode OmegaPoints.

    Yields spec.samples points (or `limit` if given); point i depends only
    on (seed, i).
    """
    total = spec.samples if limit is None else min(limit, spec.samples)
    start = 0
    while start < total:
        count = min(4096, total - start)
        s, t = sample_floats(spec, start, count)
        for i in range(count):
            yield OmegaPoint(s[i], t[i])
        start += count


def sample_exact(spec: ExperimentSpec, start: int, count: int) -> list[OmegaPoint]:
    """The same sample points as exact rationals over the grid denominator."""
    ps, pt = sample_ints(spec, start, count)
    return [
        OmegaPoint(Fraction(int(a), ik.Q_GRID), Fraction(int(b), ik.Q_GRID))
        for a, b in zip(ps, pt)
    ]


class StopWatch:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0
        return False


__all__ = [
    "ExperimentSpec",
    "Region",
    "RunReport",
    "run_chunks",
    "sample_exact",
    "sample_floats",
    "sample_ints",
    "sample_region",
    "spec_echo",
    "worker_count",
]

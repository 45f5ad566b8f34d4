"""Empirical oracle: simulate the sensor network and the stopping rule.

Reproducibility contract
------------------------
Runs are processed in fixed-size blocks. Block b of a simulation seeded
with s draws from ``Philox(key = (s << 64) | b)``, a counter-based
generator, and normal variates come from numpy's ``standard_normal``
(ziggurat transform of that stream). Each block therefore depends only on
(seed, block index, block size), and block sizes are compile-time
constants, so estimates are bit-identical across reruns and across any
shard count: shards merely group whole blocks, and the reduction is an
integer sum. Sharded execution uses threads (numpy releases the GIL while
filling arrays); the result never depends on completion order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, TransientExceedsWindowError
from .model import AttackScenario, AttackTimeline, slot_mean

PMD_BLOCK_RUNS = 4096        # runs per block when a run spans K slots
SLOT_BLOCK_RUNS = 65536      # runs per block for single-slot experiments
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SimConfig:
    """One simulation request; equal configs give bit-identical results."""

    scenario: AttackScenario
    theta: float
    runs: int
    seed: int
    nu: int = 0
    shards: int = 1

    def __post_init__(self):
        if int(self.runs) != self.runs or self.runs < 1:
            raise DomainError(f"runs must be a positive integer, got {self.runs!r}")
        if int(self.shards) != self.shards or self.shards < 1:
            raise DomainError(f"shards must be a positive integer, got {self.shards!r}")
        if int(self.nu) != self.nu or self.nu < 0:
            raise DomainError(f"nu must be a nonnegative integer, got {self.nu!r}")
        theta = float(self.theta)
        if not math.isfinite(theta) or theta < 0.0:
            raise DomainError(f"theta must be finite and >= 0, got {self.theta!r}")
        object.__setattr__(self, "runs", int(self.runs))
        object.__setattr__(self, "shards", int(self.shards))
        object.__setattr__(self, "nu", int(self.nu))
        object.__setattr__(self, "seed", int(self.seed) & _MASK64)


@dataclass(frozen=True)
class SimEstimate:
    """Binomial point estimate with its normal-approximation 95% CI."""

    p_hat: float
    stderr: float
    ci95: tuple[float, float]
    runs: int


def _estimate(successes: int, runs: int) -> SimEstimate:
    p = successes / runs
    stderr = math.sqrt(p * (1.0 - p) / runs)
    return SimEstimate(
        p_hat=p,
        stderr=stderr,
        ci95=(p - 1.96 * stderr, p + 1.96 * stderr),
        runs=runs,
    )


def _block_stream(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=(seed << 64) | (block & _MASK64)))


def _count_blocks(
    runs: int,
    block_runs: int,
    seed: int,
    shards: int,
    count_one: Callable[[np.random.Generator, int], int],
) -> int:
    """Sum count_one over fixed-size blocks, optionally sharded."""
    n_blocks = (runs + block_runs - 1) // block_runs

    def block_size(b: int) -> int:
        return min(block_runs, runs - b * block_runs)

    def shard_total(shard: int) -> int:
        total = 0
        for b in range(shard, n_blocks, shards):
            total += count_one(_block_stream(seed, b), block_size(b))
        return total

    if shards == 1:
        return shard_total(0)
    with ThreadPoolExecutor(max_workers=shards) as pool:
        return sum(pool.map(shard_total, range(shards)))


def simulate_pmd(config: SimConfig) -> SimEstimate:
    """Fraction of runs with no alarm in the K slots after the changepoint.

    Each run draws per-sensor unit-variance Gaussians around the timeline
    means (the transient truncated to whole slots), sums them per slot,
    and counts a miss when every slot stays below h. Pre-change slots are
    independent of post-change ones and are not simulated.
    """
    scenario = config.scenario
    det = scenario.detector
    if config.theta > 0.0:
        length = float(scenario.transient.value(config.theta))
        if length > det.K + 1e-9:
            raise TransientExceedsWindowError(
                f"transient L({config.theta:.6g}) = {length:.6g} exceeds the window K = {det.K}"
            )
    timeline = AttackTimeline(nu=config.nu, theta=config.theta, scenario=scenario)
    means = np.array(
        [slot_mean(timeline, config.nu + j) for j in range(1, det.K + 1)], dtype=float
    )
    h = det.h

    def count_one(rng: np.random.Generator, n: int) -> int:
        x = rng.standard_normal((n, det.K, det.M)) + means[None, :, None]
        y = x.sum(axis=2)
        return int((y < h).all(axis=1).sum())

    misses = _count_blocks(config.runs, PMD_BLOCK_RUNS, config.seed, config.shards, count_one)
    return _estimate(misses, config.runs)


def simulate_false_alarm(config: SimConfig) -> SimEstimate:
    """Fraction of nominal slots whose summed statistic reaches h.

    Calibration check: with the derived threshold this should match the
    configured per-slot false-alarm probability alpha.
    """
    det = config.scenario.detector
    h = det.h

    def count_one(rng: np.random.Generator, n: int) -> int:
        y = rng.standard_normal((n, det.M)).sum(axis=1)
        return int((y >= h).sum())

    alarms = _count_blocks(config.runs, SLOT_BLOCK_RUNS, config.seed, config.shards, count_one)
    return _estimate(alarms, config.runs)


def simulate_allocation(config: SimConfig, allocations) -> SimEstimate:
    """Single-slot miss frequency when sensor i is suppressed with
    allocations[i] resources (empirical counterpart of allocation_miss)."""
    scenario = config.scenario
    det = scenario.detector
    alloc = np.asarray(allocations, dtype=float)
    if alloc.shape != (det.M,):
        raise DomainError(
            f"allocations must be a length-{det.M} vector, got shape {alloc.shape}"
        )
    if not np.all(np.isfinite(alloc)) or np.any(alloc < 0.0):
        raise DomainError("allocations must be finite and >= 0")
    means = np.asarray(scenario.mean.value(alloc), dtype=float)
    h = det.h

    def count_one(rng: np.random.Generator, n: int) -> int:
        y = (rng.standard_normal((n, det.M)) + means[None, :]).sum(axis=1)
        return int((y < h).sum())

    misses = _count_blocks(config.runs, SLOT_BLOCK_RUNS, config.seed, config.shards, count_one)
    return _estimate(misses, config.runs)

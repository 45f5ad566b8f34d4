"""Closed-form detection quantities.

Per-slot miss probability for a slot-level spend theta:

    q(theta) = cdf(x_star - sqrt(M) * mu(gamma(theta)))

with gamma(theta) = theta/M or theta depending on the scenario convention,
and q0 = cdf(x_star - sqrt(M) * mu(0)) for post-transient slots. The
missed-detection probability over the K-slot window is

    Q(theta) = q(theta)^L * q0^(K - L),      r = log Q,

computed in log space throughout so large K cannot underflow.

Derivatives in theta (cf = d gamma / d theta is the convention's
chain-rule constant, u = x_star - sqrt(M) * mu(gamma)):

    dq/dtheta   = -sqrt(M) * pdf(u) * mu'(gamma) * cf
    d2q/dtheta2 = -u * pdf(u) * M * (mu'(gamma) * cf)^2
                  - sqrt(M) * pdf(u) * mu''(gamma) * cf^2
    dr/dtheta   = L' * log(q/q0) + (L/q) * dq/dtheta

All return values are plain floats inside frozen dataclasses; the only
array entry point is pmd_curve, which vectorizes the same formulas over a
theta grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import stdnorm
from .errors import DomainError, TransientExceedsWindowError, UnsupportedFamilyError
from .model import AttackScenario

_L_SLACK = 1e-9  # tolerance when checking L(theta) <= K at the boundary


@dataclass(frozen=True)
class SlotMiss:
    """Per-slot miss probability and its first two theta-derivatives."""

    theta: float
    q_theta: float
    q0: float
    dq_dtheta: float
    d2q_dtheta2: float


@dataclass(frozen=True)
class PmdPoint:
    """Missed-detection probability at one theta, with its log value."""

    theta: float
    L: float
    Q: float
    r: float


@dataclass(frozen=True)
class PmdCurve:
    """Vectorized PMD profile over a theta grid (parallel arrays)."""

    theta: np.ndarray
    L: np.ndarray
    q_theta: np.ndarray
    Q: np.ndarray
    r: np.ndarray


def q0(scenario: AttackScenario) -> float:
    """Post-transient per-slot miss probability (full shift mu(0))."""
    det = scenario.detector
    return float(stdnorm.cdf(det.x_star - math.sqrt(det.M) * scenario.mean.value(0.0)))


def slot_miss(scenario: AttackScenario, theta: float) -> SlotMiss:
    """Per-slot miss probability q(theta) with analytic derivatives.

    theta = 0 is allowed (it reproduces q0); theta may not exceed the
    scenario's theta_max.
    """
    theta = float(theta)
    if not math.isfinite(theta) or theta < 0.0 or theta > scenario.theta_max + 1e-12:
        raise DomainError(
            f"theta must lie in [0, theta_max={scenario.theta_max}], got {theta!r}"
        )
    det = scenario.detector
    sqrt_m = math.sqrt(det.M)
    cf = scenario.gamma_slope
    g = scenario.gamma(theta)
    mu = float(scenario.mean.value(g))
    mu1 = float(scenario.mean.derivative(g))
    mu2 = float(scenario.mean.second_derivative(g))
    u = det.x_star - sqrt_m * mu
    q = float(stdnorm.cdf(u))
    dens = float(stdnorm.pdf(u))
    dq = -sqrt_m * dens * mu1 * cf
    d2q = -u * dens * det.M * (mu1 * cf) ** 2 - sqrt_m * dens * mu2 * cf**2
    return SlotMiss(theta=theta, q_theta=q, q0=q0(scenario), dq_dtheta=dq, d2q_dtheta2=d2q)


def _transient_length(scenario: AttackScenario, theta: float) -> float:
    length = float(scenario.transient.value(theta))
    if length > scenario.detector.K + _L_SLACK:
        raise TransientExceedsWindowError(
            f"transient L({theta:.6g}) = {length:.6g} exceeds the window K = "
            f"{scenario.detector.K}"
        )
    return length


def pmd(scenario: AttackScenario, theta: float, transient_slots: int | None = None) -> PmdPoint:
    """Missed-detection probability over the K-slot window at spend theta.

    transient_slots overrides the real-valued L with an explicit whole
    number of transient slots; the simulator truncates L that way, and
    passing floor(L) here aligns the closed form with it.
    """
    theta = float(theta)
    if not scenario.theta_min - 1e-12 <= theta <= scenario.theta_max + 1e-12:
        raise DomainError(
            f"theta must lie in [{scenario.theta_min}, {scenario.theta_max}], got {theta!r}"
        )
    if transient_slots is None:
        length = _transient_length(scenario, theta)
    else:
        if int(transient_slots) != transient_slots or transient_slots < 0:
            raise DomainError("transient_slots must be a nonnegative integer")
        length = float(transient_slots)
        if length > scenario.detector.K:
            raise TransientExceedsWindowError(
                f"transient_slots = {transient_slots} exceeds the window K = "
                f"{scenario.detector.K}"
            )
    miss = slot_miss(scenario, theta)
    k = scenario.detector.K
    r = length * math.log(miss.q_theta / miss.q0) + k * math.log(miss.q0)
    return PmdPoint(theta=theta, L=length, Q=math.exp(r), r=r)


def pmd_curve(scenario: AttackScenario, thetas) -> PmdCurve:
    """Vectorized PMD over a theta grid (same formulas as pmd)."""
    th = np.asarray(thetas, dtype=float)
    if th.ndim != 1 or th.size == 0:
        raise DomainError("thetas must be a non-empty 1-d array")
    if not np.all(np.isfinite(th)):
        raise DomainError("thetas must be finite")
    if np.any(th < scenario.theta_min - 1e-12) or np.any(th > scenario.theta_max + 1e-12):
        raise DomainError(
            f"thetas must lie in [{scenario.theta_min}, {scenario.theta_max}]"
        )
    det = scenario.detector
    sqrt_m = math.sqrt(det.M)
    length = np.asarray(scenario.transient.value(th), dtype=float)
    if np.any(length > det.K + _L_SLACK):
        raise TransientExceedsWindowError("transient exceeds the window K on the grid")
    q = stdnorm.cdf(det.x_star - sqrt_m * scenario.mean.value(scenario.gamma(th)))
    base = q0(scenario)
    r = length * np.log(q / base) + det.K * math.log(base)
    return PmdCurve(theta=th, L=length, q_theta=q, Q=np.exp(r), r=r)


def log_pmd_derivative(scenario: AttackScenario, theta: float) -> float:
    """dr/dtheta at an interior theta; zero exactly at the worst case."""
    theta = float(theta)
    if not scenario.theta_min < theta < scenario.theta_max:
        raise DomainError(
            f"theta must lie strictly inside ({scenario.theta_min}, {scenario.theta_max})"
        )
    if scenario.transient.family == "budget_floor":
        raise UnsupportedFamilyError("budget_floor transient has no derivative in theta")
    miss = slot_miss(scenario, theta)
    length = _transient_length(scenario, theta)
    dlength = float(scenario.transient.derivative(theta))
    return dlength * math.log(miss.q_theta / miss.q0) + length / miss.q_theta * miss.dq_dtheta


def log_pmd_second_derivative(scenario: AttackScenario, theta: float) -> float:
    """d2r/dtheta2 at an interior theta (used to polish the critical point)."""
    theta = float(theta)
    if not scenario.theta_min < theta < scenario.theta_max:
        raise DomainError(
            f"theta must lie strictly inside ({scenario.theta_min}, {scenario.theta_max})"
        )
    if scenario.transient.family == "budget_floor":
        raise UnsupportedFamilyError("budget_floor transient has no derivative in theta")
    miss = slot_miss(scenario, theta)
    length = _transient_length(scenario, theta)
    d1 = float(scenario.transient.derivative(theta))
    d2 = float(scenario.transient.second_derivative(theta))
    q, dq, d2q = miss.q_theta, miss.dq_dtheta, miss.d2q_dtheta2
    return (
        d2 * math.log(q / miss.q0)
        + 2.0 * d1 * dq / q
        - length * (dq / q) ** 2
        + length * d2q / q
    )


def allocation_miss(scenario: AttackScenario, allocations) -> float:
    """Per-slot miss probability for an explicit per-sensor allocation.

    Sensor i receives allocations[i] resources, so its mean is
    mu(allocations[i]); the slot misses when the summed statistic stays
    below threshold:  cdf(x_star - sum_i mu(alloc_i) / sqrt(M)).
    """
    alloc = np.asarray(allocations, dtype=float)
    det = scenario.detector
    if alloc.shape != (det.M,):
        raise DomainError(
            f"allocations must be a length-{det.M} vector, got shape {alloc.shape}"
        )
    if not np.all(np.isfinite(alloc)) or np.any(alloc < 0.0):
        raise DomainError("allocations must be finite and >= 0")
    total_shift = float(np.sum(scenario.mean.value(alloc)))
    return float(stdnorm.cdf(det.x_star - total_shift / math.sqrt(det.M)))

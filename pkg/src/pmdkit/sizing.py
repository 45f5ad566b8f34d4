"""Detector sizing: the smallest sensor count that caps the adversary's
worst-case missed-detection probability."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from .errors import DomainError, InfeasibleAtCapError, MonotonicityError
from .model import AttackScenario
from .optimize import worst_case_pmd

_MONOTONE_SLACK = 1e-12


@dataclass(frozen=True)
class SizingResult:
    """Smallest adequate sensor count and the evidence for it.

    scan lists every (M, worst-case Q) pair the search evaluated, sorted
    by M. Q_at_M_min_minus_1 is None only when M_min == 1.
    """

    delta: float
    M_min: int
    Q_at_M_min: float
    Q_at_M_min_minus_1: float | None
    scan: tuple[tuple[int, float], ...]


def scenario_with_sensors(scenario: AttackScenario, m: int) -> AttackScenario:
    """Copy of the scenario with the detector using m sensors."""
    detector = dataclasses.replace(scenario.detector, M=m)
    return dataclasses.replace(scenario, detector=detector)


def min_sensors(scenario_template: AttackScenario, delta: float, m_max: int) -> SizingResult:
    """Smallest M <= m_max with worst-case PMD at most delta.

    Exponential search brackets the answer, binary search pins it; both
    lean on the worst-case PMD decreasing in M, and that assumption is
    re-checked across every evaluated point afterwards (a violation
    raises rather than returning a wrong M).
    """
    delta = float(delta)
    if not math.isfinite(delta) or not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie strictly between 0 and 1, got {delta!r}")
    if int(m_max) != m_max or m_max < 1:
        raise DomainError(f"m_max must be a positive integer, got {m_max!r}")
    m_max = int(m_max)

    evaluated: dict[int, float] = {}

    def q_star(m: int) -> float:
        if m not in evaluated:
            evaluated[m] = worst_case_pmd(scenario_with_sensors(scenario_template, m)).Q
        return evaluated[m]

    if q_star(1) <= delta:
        m_min = 1
    else:
        lo = 1  # largest M known to fail
        step = 2
        while True:
            m = min(step, m_max)
            if q_star(m) <= delta:
                hi = m
                break
            if m == m_max:
                raise InfeasibleAtCapError(delta, m_max, q_star(m_max))
            lo = m
            step *= 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if q_star(mid) <= delta:
                hi = mid
            else:
                lo = mid
        m_min = hi

    if m_min > 1:
        q_star(m_min - 1)

    scan = tuple(sorted(evaluated.items()))
    for (m_a, q_a), (m_b, q_b) in zip(scan, scan[1:]):
        if q_b > q_a + _MONOTONE_SLACK:
            raise MonotonicityError(
                f"worst-case PMD increased from Q({m_a}) = {q_a:.12g} to "
                f"Q({m_b}) = {q_b:.12g}; refusing to trust the bracketing search"
            )

    return SizingResult(
        delta=delta,
        M_min=m_min,
        Q_at_M_min=evaluated[m_min],
        Q_at_M_min_minus_1=evaluated.get(m_min - 1),
        scan=scan,
    )

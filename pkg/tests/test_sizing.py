"""Sensor-count search against a worst-case miss probability target."""

import pytest

from pmdkit import DomainError, InfeasibleAtCapError, min_sensors, worst_case_pmd
from pmdkit.sizing import scenario_with_sensors

from conftest import make_scenario


def test_reference_sizing_per_sensor_convention(fig1_scenario):
    result = min_sensors(fig1_scenario, delta=0.05, m_max=100)
    assert result.M_min == 19
    assert result.Q_at_M_min <= 0.05
    assert result.Q_at_M_min_minus_1 > 0.05


def test_matches_linear_scan():
    scenario = make_scenario("exponential", M=5)
    delta, m_max = 0.08, 30
    result = min_sensors(scenario, delta, m_max)
    linear = next(
        m
        for m in range(1, m_max + 1)
        if worst_case_pmd(scenario_with_sensors(scenario, m)).Q <= delta
    )
    assert result.M_min == linear


def test_trivial_target_needs_one_sensor(fig1_scenario):
    result = min_sensors(fig1_scenario, delta=0.9999, m_max=50)
    assert result.M_min == 1
    assert result.Q_at_M_min_minus_1 is None


def test_infeasible_at_cap_carries_diagnostics(fig1_scenario):
    with pytest.raises(InfeasibleAtCapError) as excinfo:
        min_sensors(fig1_scenario, delta=1e-12, m_max=10)
    err = excinfo.value
    assert err.m_max == 10
    assert err.q_at_cap > 1e-12
    assert err.delta == 1e-12


def test_scan_is_sorted_and_monotone(fig1_scenario):
    result = min_sensors(fig1_scenario, delta=0.05, m_max=100)
    ms = [m for m, _ in result.scan]
    qs = [q for _, q in result.scan]
    assert ms == sorted(ms)
    assert all(b <= a + 1e-12 for a, b in zip(qs, qs[1:]))
    # the decision pair is recorded
    assert dict(result.scan)[result.M_min] == result.Q_at_M_min
    assert dict(result.scan)[result.M_min - 1] == result.Q_at_M_min_minus_1


def test_sizing_works_for_boundary_family(fig3_scenario):
    # reciprocal scenarios peak at theta_min; sizing still applies
    result = min_sensors(fig3_scenario, delta=0.05, m_max=60)
    assert result.Q_at_M_min <= 0.05
    if result.M_min > 1:
        assert result.Q_at_M_min_minus_1 > 0.05


def test_parameter_validation(fig1_scenario):
    with pytest.raises(DomainError):
        min_sensors(fig1_scenario, delta=0.0, m_max=10)
    with pytest.raises(DomainError):
        min_sensors(fig1_scenario, delta=1.0, m_max=10)
    with pytest.raises(DomainError):
        min_sensors(fig1_scenario, delta=0.05, m_max=0)


def test_scenario_with_sensors_recomputes_threshold(fig1_scenario):
    resized = scenario_with_sensors(fig1_scenario, 4)
    assert resized.detector.M == 4
    assert resized.detector.h == pytest.approx(2.0 * resized.detector.x_star, rel=1e-15)
    # original untouched
    assert fig1_scenario.detector.M == 25

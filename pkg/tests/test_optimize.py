"""Worst-case solver: root function, bisection+Newton, golden section."""

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
import pytest

from pmdkit import (
    AttackScenario,
    DetectorConfig,
    MeanProfile,
    NonUnimodalError,
    NumericalError,
    TransientModel,
    UnsupportedFamilyError,
    b_function,
    find_critical_point,
    log_pmd_derivative,
    maximize_unimodal,
    pmd_curve,
    worst_case_pmd,
)
from pmdkit.optimize import solve

from conftest import REFERENCE_CONFIGS, make_scenario


def grid_argmax(scenario, points=10_000):
    thetas = np.linspace(scenario.theta_min, scenario.theta_max, points)
    curve = pmd_curve(scenario, thetas)
    idx = int(np.argmax(curve.Q))
    return thetas[idx], float(curve.Q[idx]), thetas[1] - thetas[0]


# --- b function --------------------------------------------------------------


def test_b_changes_sign_when_maximizer_is_interior(fig1_scenario):
    assert b_function(fig1_scenario, 0.1) > 0
    assert b_function(fig1_scenario, 1.5) < 0


def test_b_is_zero_at_the_critical_point(fig1_scenario):
    critical = find_critical_point(fig1_scenario)
    assert abs(b_function(fig1_scenario, critical.theta_star)) <= 1e-10


@pytest.mark.parametrize("transient", ["reciprocal", "exponential"])
@pytest.mark.parametrize("mean", ["rational", "exponential"])
@pytest.mark.parametrize("m", [1, 5, 25])
def test_b_strictly_decreasing(transient, mean, m):
    scenario = make_scenario(transient, mean, M=m)
    thetas = np.linspace(0.1, 1.5, 1000)
    values = np.array([b_function(scenario, t) for t in thetas])
    assert np.all(np.diff(values) < 0)


def test_b_unsupported_family():
    scenario = make_scenario("reciprocal")
    floor_scenario = dataclasses.replace(
        scenario, transient=TransientModel("budget_floor", A=1.5)
    )
    with pytest.raises(UnsupportedFamilyError, match="maximize_unimodal"):
        b_function(floor_scenario, 0.5)


# --- closed-form solver -------------------------------------------------------


@pytest.mark.parametrize("transient,mean", REFERENCE_CONFIGS)
def test_solver_matches_grid_argmax(transient, mean):
    scenario = make_scenario(transient, mean)
    critical = find_critical_point(scenario)
    theta_grid, q_grid, step = grid_argmax(scenario)
    assert abs(critical.theta_star - theta_grid) <= step
    assert critical.Q_star >= q_grid - 1e-12


def test_interior_point_diagnostics(fig1_scenario):
    critical = find_critical_point(fig1_scenario)
    assert not critical.boundary
    assert critical.b_residual <= 1e-10
    assert critical.fixed_point_residual <= 1e-8
    assert critical.bracket[0] < critical.theta_star < critical.bracket[1]
    assert critical.iterations > 0


def test_reciprocal_family_is_boundary_on_reference_domain(fig3_scenario):
    # r decreases over the whole [0.1, 1.5] window here, so the best the
    # adversary can do is stretch the transient across the full window
    critical = find_critical_point(fig3_scenario)
    assert critical.boundary
    assert critical.theta_star == fig3_scenario.theta_min
    assert math.isnan(critical.fixed_point_residual)


def test_boundary_at_theta_max():
    # shrink the domain so b stays positive throughout
    scenario = make_scenario("exponential", theta_max=0.3)
    assert b_function(scenario, 0.3) > 0
    critical = find_critical_point(scenario)
    assert critical.boundary
    assert critical.theta_star == 0.3


def test_degenerate_flat_profile_is_flagged_boundary():
    scenario = dataclasses.replace(
        make_scenario("reciprocal"), mean=MeanProfile("rational", c=0.1, k=1e-9)
    )
    critical = find_critical_point(scenario)
    assert critical.boundary
    assert abs(b_function(scenario, 0.7)) < 1e-9  # no trade-off left anywhere


def test_sign_pattern_of_derivative_around_interior_critical_point(fig1_scenario):
    theta_star = find_critical_point(fig1_scenario).theta_star
    assert log_pmd_derivative(fig1_scenario, theta_star - 0.05) > 0
    assert log_pmd_derivative(fig1_scenario, theta_star + 0.05) < 0
    assert abs(log_pmd_derivative(fig1_scenario, theta_star)) <= 1e-8


def test_reciprocal_maximizer_is_always_the_lower_boundary():
    # b(0) = 0 (q(0) = q0) and b strictly decreases, so b < 0 on theta > 0:
    # any admissible reciprocal scenario peaks at theta_min
    for convention in ("per_sensor", "raw"):
        for m in (2, 10, 25):
            scenario = make_scenario("reciprocal", M=m, convention=convention)
            assert b_function(scenario, scenario.theta_min) < 0
            critical = find_critical_point(scenario)
            assert critical.boundary
            assert critical.theta_star == scenario.theta_min


def test_exponential_fixed_point_identity():
    # q* = q' / log(q/q0) at the interior critical point
    for convention in ("per_sensor", "raw"):
        critical = find_critical_point(make_scenario("exponential", convention=convention))
        assert not critical.boundary
        assert critical.fixed_point_residual <= 1e-8


# --- golden section -----------------------------------------------------------


def test_golden_section_agrees_with_closed_form(fig1_scenario):
    golden = maximize_unimodal(fig1_scenario)
    closed = find_critical_point(fig1_scenario)
    assert golden.theta_star == pytest.approx(closed.theta_star, abs=1e-8)
    assert golden.method == "golden-section"
    assert golden.fixed_point_residual <= 1e-8


def test_golden_section_returns_boundary_for_decreasing_profile(fig3_scenario):
    result = maximize_unimodal(fig3_scenario)
    assert result.boundary
    assert result.theta_star == fig3_scenario.theta_min


@dataclass(frozen=True)
class LinearTransient:
    """Toy concave transient: L = 2A - theta."""

    A: float
    family: str = "linear_toy"
    a: float | None = None

    def value(self, theta):
        return 2.0 * self.A - np.asarray(theta, dtype=float)

    def derivative(self, theta):
        return np.full_like(np.asarray(theta, dtype=float), -1.0)

    def second_derivative(self, theta):
        return np.zeros_like(np.asarray(theta, dtype=float))


@dataclass(frozen=True)
class WavyTransient:
    """Pathological transient that makes r multi-peaked."""

    A: float
    family: str = "wavy_toy"
    a: float | None = None

    def value(self, theta):
        t = np.asarray(theta, dtype=float)
        return 8.0 + 6.0 * np.sin(9.0 * t)


def test_golden_section_on_concave_toy_matches_grid():
    scenario = dataclasses.replace(
        make_scenario("reciprocal", theta_min=0.2, theta_max=1.5),
        transient=LinearTransient(A=1.5),
    )
    result = maximize_unimodal(scenario)
    theta_grid, _, step = grid_argmax(scenario)
    assert abs(result.theta_star - theta_grid) <= step
    assert math.isnan(result.b_residual)  # no closed-form b for this family


def test_golden_section_detects_non_unimodal_profile():
    scenario = dataclasses.replace(
        make_scenario("reciprocal", theta_min=0.2, theta_max=1.5),
        transient=WavyTransient(A=1.5),
    )
    with pytest.raises(NonUnimodalError):
        maximize_unimodal(scenario)


def test_non_finite_b_raises_numerical_error():
    # a huge calibrated shift drives q and q0 to exact zero, so the log
    # ratio in b is 0/0: the solver must surface that, not bisect noise
    scenario = AttackScenario(
        mean=MeanProfile("rational", c=10.0, k=10.0),
        transient=TransientModel("reciprocal", A=1.5),
        detector=DetectorConfig(alpha=1e-10, M=50, K=15),
        theta_min=0.1,
        theta_max=1.5,
    )
    with pytest.raises(NumericalError):
        find_critical_point(scenario)


# --- dispatch -----------------------------------------------------------------


def test_worst_case_dispatch_and_paper_threshold(fig1_scenario):
    point = worst_case_pmd(fig1_scenario)
    assert point.Q < 0.05  # 25 sensors are enough on this configuration
    thetas = np.linspace(0.1, 1.5, 10_000)
    assert point.Q >= np.max(pmd_curve(fig1_scenario, thetas).Q) - 1e-10


def test_worst_case_decreases_with_sensor_count():
    previous = None
    for m in range(5, 55, 5):
        value = worst_case_pmd(make_scenario("exponential", M=m)).Q
        if previous is not None:
            assert value < previous
        previous = value


def test_worst_case_rejects_budget_floor():
    scenario = dataclasses.replace(
        make_scenario("reciprocal"), transient=TransientModel("budget_floor", A=1.5)
    )
    with pytest.raises(UnsupportedFamilyError):
        worst_case_pmd(scenario)


def test_solve_routes_custom_family_to_golden_section():
    scenario = dataclasses.replace(
        make_scenario("reciprocal", theta_min=0.2, theta_max=1.5),
        transient=LinearTransient(A=1.5),
    )
    assert solve(scenario).method == "golden-section"

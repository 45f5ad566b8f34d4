"""Simulator contracts: reproducibility, closed-form agreement, errors.

Statistical assertions follow the suite-wide protocol: a 3-sigma band
with one fresh-seed retry, which keeps the false-failure rate per test
below 1e-5 while still catching real formula errors.
"""

import dataclasses
import math

import pytest

from pmdkit import (
    AttackScenario,
    DetectorConfig,
    DomainError,
    MeanProfile,
    SimConfig,
    TransientModel,
    TransientExceedsWindowError,
    allocation_miss,
    pmd,
    q0,
    simulate_allocation,
    simulate_false_alarm,
    simulate_pmd,
    slot_miss,
)

from conftest import make_scenario

SEED = 987654321


def within_three_sigma(runner, target, seed=SEED):
    """Run an estimator, allowing the protocol's single fresh-seed retry."""
    for attempt_seed in (seed, seed + 1):
        est = runner(attempt_seed)
        sigma = max(est.stderr, math.sqrt(target * (1 - target) / est.runs), 1e-300)
        if abs(est.p_hat - target) <= 3 * sigma:
            return est
    raise AssertionError(
        f"estimate {est.p_hat} not within 3 sigma of {target} even after retry"
    )


# --- reproducibility ----------------------------------------------------------


def test_identical_configs_are_bit_identical(fig1_scenario):
    config = SimConfig(scenario=fig1_scenario, theta=0.7, runs=20_000, seed=SEED)
    first = simulate_pmd(config)
    second = simulate_pmd(config)
    assert first == second


@pytest.mark.parametrize("shards", [2, 3, 7])
def test_shard_count_is_invisible(fig1_scenario, shards):
    base = simulate_pmd(SimConfig(scenario=fig1_scenario, theta=0.7, runs=30_000, seed=SEED))
    sharded = simulate_pmd(
        SimConfig(scenario=fig1_scenario, theta=0.7, runs=30_000, seed=SEED, shards=shards)
    )
    assert base == sharded


def test_shard_invariance_for_slot_experiments(fig1_scenario):
    base = simulate_false_alarm(
        SimConfig(scenario=fig1_scenario, theta=0.0, runs=200_000, seed=SEED)
    )
    sharded = simulate_false_alarm(
        SimConfig(scenario=fig1_scenario, theta=0.0, runs=200_000, seed=SEED, shards=5)
    )
    assert base.p_hat == sharded.p_hat


def test_different_seeds_differ(fig1_scenario):
    a = simulate_pmd(SimConfig(scenario=fig1_scenario, theta=0.7, runs=20_000, seed=1))
    b = simulate_pmd(SimConfig(scenario=fig1_scenario, theta=0.7, runs=20_000, seed=2))
    assert a.p_hat != b.p_hat


# --- agreement with the closed forms ------------------------------------------


def test_no_adversary_matches_q0_power(fig1_scenario):
    target = q0(fig1_scenario) ** 15  # 0.025376... from the mpmath pipeline
    assert target == pytest.approx(0.025376809620588958, rel=1e-10)
    within_three_sigma(
        lambda s: simulate_pmd(
            SimConfig(scenario=fig1_scenario, theta=0.0, runs=100_000, seed=s)
        ),
        target,
    )


def test_vanishing_shift_gives_nominal_window_miss():
    # c -> 0 limit: every slot misses with probability 1 - alpha
    scenario = dataclasses.replace(
        make_scenario("reciprocal"), mean=MeanProfile("rational", c=1e-12, k=10.0)
    )
    within_three_sigma(
        lambda s: simulate_pmd(SimConfig(scenario=scenario, theta=0.0, runs=50_000, seed=s)),
        0.9**15,
    )


def test_single_slot_window_reduces_to_q0():
    # K = 1 needs a transient that fits one slot: a short exponential one
    scenario = AttackScenario(
        mean=MeanProfile("rational", c=0.1, k=10.0),
        transient=TransientModel("exponential", A=1.5, a=1.0),
        detector=DetectorConfig(alpha=0.1, M=25, K=1),
        theta_min=0.1,
        theta_max=1.5,
    )
    within_three_sigma(
        lambda s: simulate_pmd(SimConfig(scenario=scenario, theta=0.0, runs=50_000, seed=s)),
        q0(scenario),
    )


def test_transient_alignment_with_floor(fig1_scenario):
    theta = 0.7
    aligned = int(math.floor(float(fig1_scenario.transient.value(theta))))
    target = pmd(fig1_scenario, theta, transient_slots=aligned).Q
    within_three_sigma(
        lambda s: simulate_pmd(
            SimConfig(scenario=fig1_scenario, theta=theta, runs=100_000, seed=s)
        ),
        target,
    )


def test_changepoint_location_does_not_matter(fig1_scenario):
    early = simulate_pmd(SimConfig(scenario=fig1_scenario, theta=0.7, runs=20_000, seed=SEED))
    late = simulate_pmd(
        SimConfig(scenario=fig1_scenario, theta=0.7, runs=20_000, seed=SEED, nu=40)
    )
    # same per-slot means after the changepoint, same stream: identical
    assert early.p_hat == late.p_hat


# --- false alarm calibration ----------------------------------------------------


@pytest.mark.parametrize("m", [1, 25])
def test_false_alarm_rate_matches_alpha(m):
    scenario = make_scenario(M=m)
    within_three_sigma(
        lambda s: simulate_false_alarm(
            SimConfig(scenario=scenario, theta=0.0, runs=400_000, seed=s)
        ),
        0.1,
    )


def test_median_threshold_alarms_half_the_time():
    scenario = make_scenario(alpha=0.5)
    assert scenario.detector.h == pytest.approx(0.0, abs=1e-12)
    within_three_sigma(
        lambda s: simulate_false_alarm(
            SimConfig(scenario=scenario, theta=0.0, runs=400_000, seed=s)
        ),
        0.5,
    )


# --- allocation experiments -----------------------------------------------------


def test_allocation_simulation_matches_analytic():
    scenario = make_scenario("reciprocal", M=2)
    for alloc in ([0.5, 0.5], [1.0, 0.0]):
        target = allocation_miss(scenario, alloc)
        within_three_sigma(
            lambda s, alloc=alloc: simulate_allocation(
                SimConfig(scenario=scenario, theta=1.0, runs=400_000, seed=s), alloc
            ),
            target,
        )


def test_single_sensor_allocation_equals_slot_miss():
    scenario = make_scenario("reciprocal", M=1)
    theta = 0.8
    target = slot_miss(scenario, theta).q_theta
    assert allocation_miss(scenario, [theta]) == pytest.approx(target, rel=1e-15)
    within_three_sigma(
        lambda s: simulate_allocation(
            SimConfig(scenario=scenario, theta=theta, runs=400_000, seed=s), [theta]
        ),
        target,
    )


# --- estimates and errors --------------------------------------------------------


def test_estimate_fields_are_consistent(fig1_scenario):
    est = simulate_pmd(SimConfig(scenario=fig1_scenario, theta=0.7, runs=10_000, seed=SEED))
    assert 0.0 <= est.p_hat <= 1.0
    assert est.stderr == pytest.approx(
        math.sqrt(est.p_hat * (1 - est.p_hat) / est.runs), rel=1e-12
    )
    assert est.ci95[0] == pytest.approx(est.p_hat - 1.96 * est.stderr, rel=1e-12)
    assert est.ci95[1] == pytest.approx(est.p_hat + 1.96 * est.stderr, rel=1e-12)
    assert est.runs == 10_000


def test_transient_longer_than_window_rejected(fig3_scenario):
    with pytest.raises(TransientExceedsWindowError):
        simulate_pmd(SimConfig(scenario=fig3_scenario, theta=0.05, runs=100, seed=SEED))


def test_config_validation(fig1_scenario):
    with pytest.raises(DomainError):
        SimConfig(scenario=fig1_scenario, theta=0.7, runs=0, seed=SEED)
    with pytest.raises(DomainError):
        SimConfig(scenario=fig1_scenario, theta=0.7, runs=10, seed=SEED, shards=0)
    with pytest.raises(DomainError):
        SimConfig(scenario=fig1_scenario, theta=-1.0, runs=10, seed=SEED)
    with pytest.raises(DomainError):
        SimConfig(scenario=fig1_scenario, theta=0.7, runs=10, seed=SEED, nu=-1)


def test_allocation_validation(fig1_scenario):
    config = SimConfig(scenario=fig1_scenario, theta=0.7, runs=10, seed=SEED)
    with pytest.raises(DomainError):
        simulate_allocation(config, [0.1] * 24)
    with pytest.raises(DomainError):
        simulate_allocation(config, [-1.0] + [0.1] * 24)


def test_seed_is_masked_to_64_bits(fig1_scenario):
    wide = SimConfig(scenario=fig1_scenario, theta=0.7, runs=1000, seed=(1 << 70) + 5)
    narrow = SimConfig(scenario=fig1_scenario, theta=0.7, runs=1000, seed=5)
    assert simulate_pmd(wide).p_hat == simulate_pmd(narrow).p_hat

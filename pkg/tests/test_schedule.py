import math

import pytest

from metastab.counterfn import Power
from metastab.schedule import (
    WeightSchedule,
    canonical_schedule,
    constant_schedule,
    constant_zero_beta,
    reciprocal_power_schedule,
    schedule_from_config,
    verify_schedule,
)


class TestCanonical:
    def test_first_weight(self):
        assert canonical_schedule().beta_seq(0) == 1.0

    def test_rate_beta_value(self):
        assert canonical_schedule().rate_beta(4) == 25

    def test_rate_theta_value(self):
        assert canonical_schedule().rate_theta.evaluate(2).value == 16

    def test_divergence_witness_by_direct_summation(self):
        # independent oracle: sum 1/(i+1) up to 4^n reaches n, for n <= 7
        sched = canonical_schedule()
        for n in range(8):
            top = sched.rate_theta.evaluate(n).value
            total = sum(1.0 / (i + 1) for i in range(top + 1))
            assert total >= n, (n, total)

    def test_passes_verification(self):
        rep = verify_schedule(canonical_schedule(), 7, 10)
        assert rep.passed, rep.detail

    def test_witness_at_least_n_minus_one(self):
        sched = canonical_schedule()
        for n in range(10):
            assert sched.rate_theta.evaluate(n).value >= n - 1


class TestVerification:
    def test_constant_half_fails_a1_at_k2(self):
        rep = verify_schedule(constant_schedule(0.5), 3, 5)
        assert rep.failed
        assert "(A1)" in rep.detail and "k=2" in rep.detail

    def test_mismatched_weights_fail_a1_first(self):
        sched = WeightSchedule(
            alpha=lambda n: 1.0,
            beta_seq=lambda n: 0.5,
            rate_beta=lambda k: 0,
            rate_theta=Power(4),
            label="alpha-above-beta",
        )
        rep = verify_schedule(sched, 3, 5)
        assert rep.failed
        assert "(A1)" in rep.detail and "k=2" in rep.detail

    def test_equal_weights_satisfy_ordering(self):
        rep = verify_schedule(canonical_schedule(), 3, 3)
        assert rep.passed

    def test_constant_zero_fails_divergence(self):
        rep = verify_schedule(constant_schedule(0.0), 3, 3)
        assert rep.failed
        assert "(A2)" in rep.detail

    def test_step_cap_inconclusive(self):
        rep = verify_schedule(canonical_schedule(), 10, 3)
        assert rep.outcome == "inconclusive"
        assert "cap" in rep.detail

    def test_reciprocal_power_below_half_passes(self):
        rep = verify_schedule(reciprocal_power_schedule(0.4), 1, 5)
        assert rep.passed, rep.detail

    def test_reciprocal_power_witness_derivation(self):
        # oracle for the hand-derived tight witness ceil(n^(1/(1-2p))):
        # each of the N+1 summands is at least (N+1)^(-2p)
        p = 0.4
        for n in range(1, 6):
            top = math.ceil(n ** (1 / (1 - 2 * p)))
            total = sum((i + 1) ** (-2 * p) for i in range(top + 1))
            assert total >= n

    def test_reciprocal_power_above_half_fails_divergence(self):
        rep = verify_schedule(reciprocal_power_schedule(1.0), 3, 3)
        assert rep.failed
        assert "(A2)" in rep.detail

    def test_reciprocal_power_rate_beta_is_valid_witness(self):
        sched = reciprocal_power_schedule(0.4)
        for k in range(8):
            start = sched.rate_beta(k)
            for n in range(start, start + 50):
                assert sched.beta_seq(n) <= 1.0 / (k + 1)


class TestConfig:
    def test_label(self):
        assert schedule_from_config("canonical").label == "canonical"

    def test_families(self):
        assert schedule_from_config({"family": "reciprocal-sqrt"}).label == "canonical"
        assert "constant" in schedule_from_config({"family": "constant", "value": 0.5}).label
        assert "reciprocal-power" in schedule_from_config(
            {"family": "reciprocal-power", "p": 0.4}
        ).label

    def test_unknown(self):
        with pytest.raises(ValueError):
            schedule_from_config("zeno")
        with pytest.raises(ValueError):
            schedule_from_config({"family": "fibonacci"})


class TestZeroBeta:
    def test_forces_zero(self):
        sched = constant_zero_beta(canonical_schedule())
        assert sched.beta_seq(0) == 0.0
        assert sched.beta_seq(100) == 0.0
        assert sched.alpha(0) == 1.0

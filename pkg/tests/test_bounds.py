import math
from fractions import Fraction

import mpmath
import pytest

from metastab.bignat import BoundNat, tau_from_exponent
from metastab.bounds import (
    SquareFejerProfile,
    afp_bounds,
    ceil_fraction,
    closedness_moduli,
    combined_bound_sqrt_schedule,
    combined_metastability_bound,
    descent_budget,
    half_descent_index,
    lipschitz_fraction,
    liminf_modulus,
    liminf_modulus_shifted,
    liminf_modulus_sqrt_schedule,
    liminf_modulus_successive,
    metastability_bound,
    metastability_constants,
    shift_index,
    uniform_fejer_modulus,
)
from metastab.counterfn import Const, Identity, Power, Table, majorant
from metastab.schedule import canonical_schedule, reciprocal_power_schedule, verify_schedule

CANON = canonical_schedule()
THETA4 = Power(4)
TAU = tau_from_exponent(4096)
TAU64 = tau_from_exponent(64)


def gamma_linear(j):
    return j + 1


class TestExactCeilings:
    @pytest.mark.parametrize("L", [1, 2, 0.5, 1.5, Fraction(7, 3), 10, 0.001])
    def test_half_descent_index_against_high_precision(self, L):
        # oracle: 50-digit floating sqrt, safe because 2L^2+4 is never an
        # exact square of a rational with these denominators
        fr = lipschitz_fraction(L)
        with mpmath.workdps(50):
            expected = int(mpmath.ceil(1 + mpmath.sqrt(2 * mpmath.mpf(fr.numerator) ** 2
                                                       / mpmath.mpf(fr.denominator) ** 2 + 4)))
        assert half_descent_index(L) == expected

    def test_lipschitz_fraction_forms(self):
        assert lipschitz_fraction(2) == Fraction(2)
        assert lipschitz_fraction(1.5) == Fraction(3, 2)
        assert lipschitz_fraction(Fraction(1, 3)) == Fraction(1, 3)
        with pytest.raises(ValueError):
            lipschitz_fraction(0)
        with pytest.raises(ValueError):
            lipschitz_fraction(-1.0)

    def test_ceil_fraction(self):
        assert ceil_fraction(Fraction(7, 2)) == 4
        assert ceil_fraction(Fraction(8, 2)) == 4
        assert ceil_fraction(Fraction(-1, 2)) == 0


class TestShiftIndex:
    def test_unit_lipschitz(self):
        assert shift_index(1.0, CANON.rate_beta) == 25

    def test_double_lipschitz(self):
        assert shift_index(2.0, CANON.rate_beta) == 36

    def test_constant_witness(self):
        assert shift_index(1.0, lambda k: 7) == 7


class TestDescentBudget:
    @pytest.mark.parametrize("b,k,expected", [(1, 0, 4), (0, 0, 2), (2, 3, 160)])
    def test_values(self, b, k, expected):
        assert descent_budget(b, k) == expected


class TestLiminfModuli:
    def test_shifted_value(self):
        assert liminf_modulus_shifted(1, THETA4, 0, 0, TAU).value == 256

    def test_with_shift(self):
        assert liminf_modulus(1, THETA4, 0, 0, 25, TAU).value == 281

    def test_big_exact_power(self):
        got = liminf_modulus_shifted(1, THETA4, 0, 5, TAU)
        assert got.value == 4**144

    def test_dominates_start_index(self):
        # theta(l+M) >= l+M-1 >= l for every valid divergence witness
        for sched in (CANON, reciprocal_power_schedule(0.4)):
            assert verify_schedule(sched, 1, 3).passed
            for b in (0, 1, 2):
                for l in (0, 1, 3, 5):
                    for k in (0, 1, 2):
                        val = liminf_modulus_shifted(b, sched.rate_theta, l, k, TAU)
                        assert val.at_least(l)

    def test_sqrt_schedule_closed_form(self):
        assert liminf_modulus_sqrt_schedule(1, 1.0, 0, 0, TAU).value == 281
        assert liminf_modulus_sqrt_schedule(1, 1.0, 1, 0, TAU).value == 1049
        assert liminf_modulus_sqrt_schedule(2, 1.0, 0, 0, TAU).value == 1048601

    def test_sqrt_schedule_matches_general_formula(self):
        # the closed form is exactly the general modulus with the canonical
        # witnesses plugged in
        for b in range(4):
            for L in (1.0, 2.0):
                shift_k = shift_index(L, CANON.rate_beta)
                for l in range(3):
                    for k in range(3):
                        closed = liminf_modulus_sqrt_schedule(b, L, l, k, TAU)
                        general = liminf_modulus(b, CANON.rate_theta, l, k, shift_k, TAU)
                        assert closed.compare(general) == 0

    def test_successive_values(self):
        got = liminf_modulus_successive(1, 1.0, CANON.rate_beta, THETA4, 0, 0, TAU)
        assert got.value == 25 + 4**36

    def test_successive_inflated_index(self):
        # L = 0.5, k = 3 inflates the precision index to ceil(1.5 * 4) = 6
        got = liminf_modulus_successive(1, 0.5, CANON.rate_beta, THETA4, 0, 3, TAU)
        shift_k = shift_index(0.5, CANON.rate_beta)
        expected = liminf_modulus(1, THETA4, 0, 6, shift_k, TAU)
        assert got.compare(expected) == 0


class TestAfpBounds:
    def test_values(self):
        afp = afp_bounds(1, THETA4, 25, TAU)
        assert afp.shifted(0).value == 256
        assert afp.original(0).value == 281
        assert afp.monotone(0).value == 256

    def test_degenerate_set_with_identity_witness(self):
        afp = afp_bounds(0, Identity(), 0, TAU)
        assert afp.shifted(0).value == 2

    def test_monotone_variant_is_nondecreasing(self):
        # even for a deliberately non-monotone divergence witness
        bumpy = Table((9, 1, 5, 0, 7, 2))
        afp = afp_bounds(1, bumpy, 3, TAU)
        values = [afp.monotone(k) for k in range(12)]
        for a, b in zip(values, values[1:]):
            assert a.compare(b) <= 0

    def test_monotone_dominates_shifted_when_majorant_needed(self):
        bumpy = Table((9, 1, 5, 0, 7, 2))
        afp = afp_bounds(1, bumpy, 3, TAU)
        for k in range(8):
            assert afp.monotone(k).compare(afp.shifted(k)) >= 0


class TestClosednessModuli:
    def test_unit_lipschitz(self):
        cm = closedness_moduli(1.0)
        assert (cm.omega(0), cm.delta(0)) == (4, 1)

    def test_double_lipschitz(self):
        cm = closedness_moduli(2.0)
        assert (cm.omega(1), cm.delta(1)) == (16, 3)

    def test_fractional_lipschitz_ceiling(self):
        assert closedness_moduli(1.5).omega(0) == 8

    def test_closedness_implication_oracle(self):
        # (1+L)/(ceil(L)(4k+4)+1) + 1/(2k+2) <= 1/(k+1) for sampled L, k
        for L in (1.0, 1.5, 2.0, 3.7):
            cm = closedness_moduli(L)
            for k in range(10):
                bound = (1 + L) / (cm.omega(k) + 1) + 1.0 / (cm.delta(k) + 1)
                assert bound <= 1.0 / (k + 1) + 1e-12


class TestFejer:
    @pytest.mark.parametrize("b,n,m,r,expected", [(1, 0, 2, 0, 16), (1, 5, 0, 3, 0), (2, 9, 3, 1, 96)])
    def test_chi_values(self, b, n, m, r, expected):
        assert uniform_fejer_modulus(b, n, m, r) == expected

    def test_chi_independent_of_n(self):
        assert uniform_fejer_modulus(2, 0, 3, 1) == uniform_fejer_modulus(2, 99, 3, 1)

    def test_square_profile_moduli(self):
        # sampled version of the two modulus implications
        import numpy as np

        rng = np.random.default_rng(0)
        samples = rng.uniform(0.0, 10.0, 1000)
        for k in range(21):
            a_mod = SquareFejerProfile.g_modulus(k)
            h_mod = SquareFejerProfile.h_modulus(k)
            for a in samples:
                if a <= 1.0 / (a_mod + 1):
                    assert a * a <= 1.0 / (k + 1) + 1e-12
                if a * a <= 1.0 / (h_mod + 1):
                    assert a <= 1.0 / (k + 1) + 1e-12


class TestMetastabilityConstants:
    def test_reference_point(self):
        consts = metastability_constants(1, 1.0, CANON.rate_beta, gamma_linear, 0)
        assert consts.shift == 25
        assert consts.rounds == 4
        assert consts.combined_index == 2
        assert consts.combined_rounds == 10

    def test_root_73_oracle(self):
        assert 8 * 8 < 73 <= 9 * 9  # ceil(sqrt(73)) = 9 feeds combined_rounds

    def test_combined_index_scaling(self):
        consts = metastability_constants(1, 1.0, CANON.rate_beta, gamma_linear, 2)
        assert consts.combined_index == math.ceil((1 * (4 * 2 + 4) - 1) / 2)


def straight_line_plain(b, theta_vals_max, rounds, coef_index, g_const, shift_k, floor_term=None):
    """Independent re-derivation: plain ints, loop written out from scratch.

    theta_vals_max: callable giving max(theta(0..n)) exactly; g is const.
    """
    coefficient = 8 * b * (8 * coef_index**2 + 16 * coef_index + 10)
    state = 0
    for _ in range(rounds):
        inner = coefficient * g_const
        if floor_term is not None:
            inner = max(floor_term, inner)
        state = theta_vals_max(2 * (b * b + 1) * (inner + 1) ** 2)
    return shift_k + state


class TestMetastabilityBounds:
    def test_zero_rounds_returns_shift(self):
        # the recursion starts at 0, so zero rounds leaves only the shift
        got = metastability_bound(1, THETA4, lambda j: 0, CANON.rate_beta, 1.0, 0, Const(0), TAU)
        assert got.value == 25

    def test_reference_exact_value(self):
        got = metastability_bound(1, THETA4, gamma_linear, CANON.rate_beta, 1.0, 0, Const(0), TAU)
        assert got.value == 281

    def test_reference_against_straight_line(self):
        def theta_max(n):
            return max(4**i for i in range(n + 1))

        expected = straight_line_plain(1, theta_max, rounds=4, coef_index=0, g_const=0, shift_k=25)
        got = metastability_bound(1, THETA4, gamma_linear, CANON.rate_beta, 1.0, 0, Const(0), TAU)
        assert got.value == expected == 281

    def test_nonmonotone_theta_against_straight_line(self):
        bumpy = Table((5, 3, 9, 2, 6))
        beta_const = lambda k: 7

        def theta_max(n):
            vals = [5, 3, 9, 2, 6]
            return max(vals[min(i, 4)] for i in range(n + 1))

        expected = straight_line_plain(1, theta_max, rounds=4, coef_index=0, g_const=0, shift_k=7)
        got = metastability_bound(1, bumpy, gamma_linear, beta_const, 1.0, 0, Const(0), TAU)
        assert got.value == expected

    def test_degenerate_diameter_against_straight_line(self):
        def theta_max(n):
            return max(4**i for i in range(n + 1))

        expected = straight_line_plain(0, theta_max, rounds=4, coef_index=0, g_const=3, shift_k=25)
        got = metastability_bound(0, THETA4, gamma_linear, CANON.rate_beta, 1.0, 0, Const(3), TAU)
        assert got.value == expected

    def test_nonzero_counterfunction_saturates(self):
        # first round already reaches 4**26244 ~ 10**15798 > 10**4096
        assert 26244 * math.log10(4) > 4096
        got = metastability_bound(1, THETA4, gamma_linear, CANON.rate_beta, 1.0, 0, Const(1), TAU)
        assert got.is_huge
        assert got.token() == ">=1e4096"

    def test_combined_reference_value(self):
        got = combined_metastability_bound(
            1, THETA4, gamma_linear, CANON.rate_beta, 1.0, 0, Const(0), TAU
        )
        assert got.value == 25 + 4**16

    def test_combined_against_straight_line(self):
        def theta_max(n):
            return max(4**i for i in range(n + 1))

        expected = straight_line_plain(
            1, theta_max, rounds=10, coef_index=2, g_const=0, shift_k=25, floor_term=1
        )
        got = combined_metastability_bound(
            1, THETA4, gamma_linear, CANON.rate_beta, 1.0, 0, Const(0), TAU
        )
        assert got.value == expected == 25 + 4**16

    def test_combined_saturates_with_nonzero_counterfunction(self):
        got = combined_metastability_bound(
            1, THETA4, gamma_linear, CANON.rate_beta, 1.0, 0, Const(1), TAU
        )
        assert got.is_huge

    def test_sqrt_schedule_constant(self):
        # the additive constant of the square-root-schedule bound is
        # (ceil(1+sqrt(6))+1)^2 = 25, exposed by running zero rounds
        got = combined_bound_sqrt_schedule(1, lambda j: 0, 1.0, 0, Const(0), TAU)
        assert got.value == 25

    def test_sqrt_schedule_reference_value(self):
        got = combined_bound_sqrt_schedule(1, gamma_linear, 1.0, 0, Const(0), TAU)
        assert got.value == 25 + 4**16

    def test_sqrt_schedule_matches_general_for_canonical(self):
        for k in (0, 1):
            for g in (Const(0), Const(2)):
                special = combined_bound_sqrt_schedule(1, gamma_linear, 1.0, k, g, TAU)
                general = combined_metastability_bound(
                    1, THETA4, gamma_linear, CANON.rate_beta, 1.0, k, g, TAU
                )
                c = special.compare(general)
                assert c == 0 or c is None  # both saturated counts as agreement

    def test_shift_override_agrees_under_canonical_rate(self):
        # the two candidate counterfunction shifts coincide for the
        # square-schedule convergence rate
        g = Table((5, 1, 9))
        base = combined_bound_sqrt_schedule(1, gamma_linear, 1.0, 0, g, TAU)
        k_canonical = shift_index(1.0, CANON.rate_beta)
        other = combined_bound_sqrt_schedule(
            1, gamma_linear, 1.0, 0, g, TAU, shift_override=k_canonical
        )
        assert (base.is_huge and other.is_huge) or base.compare(other) == 0
        # and the shifts themselves are literally the same number
        assert k_canonical == (half_descent_index(1.0) + 1) ** 2 == 25


class TestSaturationSweep:
    def test_verdicts_agree_across_thresholds(self):
        # every bound formula evaluated at both thresholds must order the
        # same way against exact witnesses below the smaller threshold
        witnesses = [0, 3, 57, 10**5]
        for tau in (TAU64, TAU):
            pass
        cases = []
        for b in (1, 2):
            for k in (0, 1, 2):
                for g in (Const(0), Const(5), Table((2, 7))):
                    for tau in (TAU64, TAU):
                        cases.append(
                            (
                                (b, k, str(g), tau == TAU),
                                metastability_bound(
                                    b, THETA4, gamma_linear, CANON.rate_beta, 2.0, k, g, tau
                                ),
                            )
                        )
        by_params = {}
        for (b, k, gs, big), bound in cases:
            by_params.setdefault((b, k, gs), {})[big] = bound
        for params, pair in by_params.items():
            for w in witnesses:
                assert pair[True].at_least(w) == pair[False].at_least(w), params

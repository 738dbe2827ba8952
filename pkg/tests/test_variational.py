"""
Tests for Fourier loops, Psi_c, the test families and the certificate arithmetic.
"""

import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ehcap.config import DEFAULT_TOLERANCES
from ehcap.errors import ValidationError
from ehcap.geometry import ApproximantParams, gauge_bidisc
from ehcap.variational import (
    FourierLoop,
    GammaProfile,
    RampProfile,
    action_A,
    action_H,
    build_W2_element,
    build_W3_element,
    certificate_coefficients,
    certify_gamma_profile,
    e_inner,
    eval_loop,
    fourier_coeff_re_sq,
    gamma_profile,
    i8_threshold,
    l1_coeff_bound,
    loop_points,
    negativity_scan,
    projective_delta,
    psi_c,
    psi_c_approximant,
    ramp_critical_values,
    w3_head_action,
)

from conftest import I8_THRESHOLD, SQRT27

C2 = 4 * math.sqrt(2)
SQRT_HALF = math.sqrt(0.5)

coefficient = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)


def _loop_strategy(K=3):
    return st.lists(st.tuples(coefficient, coefficient), min_size=2 * K + 1, max_size=2 * K + 1).map(
        lambda rows: FourierLoop(K, np.array(rows, dtype=complex))
    )


class TestFourierLoop:
    def test_projections_split_the_loop(self):
        f = FourierLoop.from_modes({-2: (1, 0), 0: (0.5, 0.5j), 1: (0, 1), 2: (1j, 1)})
        total = f.plus() + f.zero() + f.minus()
        assert np.array_equal(total.coeffs, f.coeffs)
        assert not np.any(f.plus().coeff(-2))

    def test_action_counts_frequency(self):
        f = FourierLoop.from_modes({1: (1, 0), -1: (0, 2), 3: (1, 1)})
        assert action_A(f) == pytest.approx(math.pi * (1 - 4 + 3 * 2))

    def test_e_inner_weights_constant_term_by_one(self):
        f = FourierLoop.from_modes({0: (2, 0), 2: (0, 1)})
        assert e_inner(f, f) == pytest.approx(4 + 2 * math.pi * 2)

    def test_plus_and_minus_parts_are_orthogonal(self, rng):
        for K in (1, 3, 6):
            f = FourierLoop(K, rng.normal(size=(2 * K + 1, 2)) + 1j * rng.normal(size=(2 * K + 1, 2)))
            assert e_inner(f.plus(), f.minus()) == pytest.approx(0.0, abs=1e-12)
            assert e_inner(f.plus(), f.zero()) == pytest.approx(0.0, abs=1e-12)
            assert e_inner(f.plus(), f) == pytest.approx(e_inner(f.plus(), f.plus()))

    def test_phase_shift_keeps_action(self):
        f = FourierLoop.from_modes({1: (1, 0.3j), 2: (0.2, 0)})
        g = f.phase_shift(0.17)
        assert action_A(g) == pytest.approx(action_A(f))
        assert eval_loop(g, 0.0) == pytest.approx(eval_loop(f, 0.17))

    def test_rejects_wrong_row_count(self):
        with pytest.raises(ValidationError):
            FourierLoop(2, np.zeros((4, 2)))

    def test_rows_layout(self):
        rows = FourierLoop.from_modes({1: (1 + 2j, -1j)}).to_rows()
        assert rows[-1] == {"k": 1, "re1": 1.0, "im1": 2.0, "re2": 0.0, "im2": -1.0}


class TestFourierCoeffReSq:
    def test_w2_third_harmonic_is_gamma(self):
        f = build_W2_element(SQRT_HALF, 1j * SQRT_HALF)
        assert fourier_coeff_re_sq(f, 3) == pytest.approx(0.23)

    def test_w3_fourth_harmonic_is_half_gamma_squared(self):
        f = build_W3_element(0.6, 0.3j, 0.5)
        assert fourier_coeff_re_sq(f, 4) == pytest.approx(0.125)
        assert fourier_coeff_re_sq(f, -4) == pytest.approx(0.125)

    def test_orders_past_two_k_vanish(self):
        f = build_W3_element(0.6, 0.3j, 0.5)
        assert fourier_coeff_re_sq(f, 5) == 0
        with pytest.raises(ValidationError):
            fourier_coeff_re_sq(f, 9)

    def test_matches_sampled_fft(self, rng):
        f = FourierLoop(2, rng.normal(size=(5, 2)) + 1j * rng.normal(size=(5, 2)))
        t = np.arange(64) / 64
        z = eval_loop(f, t)
        q = np.real(z[:, 0] ** 2 + z[:, 1] ** 2)
        spectrum = np.fft.fft(q) / 64
        for m in range(-4, 5):
            assert fourier_coeff_re_sq(f, m) == pytest.approx(spectrum[m % 64], abs=1e-12)


class TestPsi:
    def test_single_mode(self):
        f = FourierLoop.from_modes({1: (1, 0)})
        for c in (1.0, C2, 7.0):
            assert psi_c(f, c) == pytest.approx(math.pi - c * (0.5 + 1 / math.pi), abs=1e-10)

    def test_isotropic_mode(self):
        f = FourierLoop.from_modes({1: (1, 1j)})
        assert psi_c(f, 5.0) == pytest.approx(2 * math.pi - 5.0, abs=1e-12)

    def test_w2_at_zero_delta(self):
        c, g = C2, 0.23
        f = build_W2_element(SQRT_HALF, 1j * SQRT_HALF)
        expected = (2 * math.pi - c / 2) * g * g - (2 * c / math.pi) * g + math.pi - c / 2
        assert psi_c(f, c) == pytest.approx(expected, abs=1e-10)
        assert psi_c(f, c) == pytest.approx(-0.332, abs=1e-3)

    def test_matches_brute_force_quadrature(self, rng):
        f = FourierLoop(3, rng.normal(size=(7, 2)) + 1j * rng.normal(size=(7, 2)))
        t = np.arange(200_000) / 200_000
        z = eval_loop(f, t)
        r = 0.5 * np.sum(np.abs(z) ** 2, axis=1) + 0.5 * np.abs(np.real(z[:, 0] ** 2 + z[:, 1] ** 2))
        assert psi_c(f, 3.0) == pytest.approx(action_A(f) - 3.0 * r.mean(), abs=1e-6)

    @settings(max_examples=40, deadline=None)
    @given(f=_loop_strategy(), lam=st.floats(min_value=0.1, max_value=5.0))
    def test_two_homogeneous(self, f, lam):
        assert psi_c(lam * f, 2.0) == pytest.approx(lam ** 2 * psi_c(f, 2.0), rel=1e-9, abs=1e-9)

    def test_phase_invariant(self, rng):
        for _ in range(10):
            f = FourierLoop(3, rng.normal(size=(7, 2)) + 1j * rng.normal(size=(7, 2)))
            shifted = f.phase_shift(rng.uniform())
            assert psi_c(shifted, 2.0) == pytest.approx(psi_c(f, 2.0), rel=1e-9)

    def test_approximant_stays_below(self):
        f = FourierLoop.from_modes({1: (1, 1j)})
        params = ApproximantParams(10)
        below = psi_c_approximant(f, 5.0, params)
        assert below < psi_c(f, 5.0)
        assert below == pytest.approx(2 * math.pi - 5.0 * params.outer_sq / 1.0793700526, abs=1e-6)


class TestRamp:
    def test_profile_is_flat_then_linear(self):
        ramp = RampProfile(c=C2, eps=0.01)
        assert ramp(0.5) == 0.0
        assert ramp.derivative(2.0) == pytest.approx(C2 + 0.01)
        assert ramp(2.0) - ramp(1.5) == pytest.approx(0.5 * (C2 + 0.01))

    def test_critical_values_below_slope(self):
        ramp = RampProfile(c=6.0)
        values = ramp_critical_values([4.0, SQRT27, 2 * math.pi], ramp)
        assert [alpha for _, alpha, _ in values.crossed] == [4.0, SQRT27]
        assert values.uncrossed == [2 * math.pi]
        for s, alpha, value in values.crossed:
            assert 1.0 <= s <= 1.001
            assert value == pytest.approx(alpha, rel=2e-3)

    def test_action_h_on_unit_circle(self):
        f = FourierLoop.from_modes({1: (1, 0)})
        assert action_H(f, RampProfile(c=5.0)) == pytest.approx(math.pi)

    def test_steeper_ramp_gives_smaller_action(self, rng):
        lower, higher = RampProfile(c=4.0, width=0.2), RampProfile(c=6.0, width=1e-3)
        s = np.linspace(0.0, 3.0, 301)
        assert np.all(lower(s) <= higher(s))
        for _ in range(10):
            f = FourierLoop(2, 0.6 * (rng.normal(size=(5, 2)) + 1j * rng.normal(size=(5, 2))))
            assert action_H(f, lower) >= action_H(f, higher)

    def test_action_h_uses_the_bidisc_gauge(self):
        f = FourierLoop.from_modes({1: (1.2, 0), -1: (0, 0.5)})
        pts = loop_points(f, np.arange(2048) / 2048)
        ramp = RampProfile(c=5.0)
        expected = action_A(f) - float(np.mean(ramp(gauge_bidisc(pts))))
        assert action_H(f, ramp) == pytest.approx(expected, rel=1e-12)
        assert action_H(f, ramp) < action_A(f)

    def test_rejects_bad_ramp(self):
        with pytest.raises(ValidationError):
            RampProfile(c=0.0)


class TestFamilies:
    @pytest.mark.parametrize("gamma", np.linspace(0.22, 0.58, 13).tolist())
    def test_w2_head_is_negative_across_the_gamma_window(self, gamma):
        f = build_W2_element(SQRT_HALF, 1j * SQRT_HALF, profile=GammaProfile(gamma0=gamma))
        expected = (2 * math.pi - C2 / 2) * gamma ** 2 - (2 * C2 / math.pi) * gamma + math.pi - C2 / 2
        assert psi_c(f, C2) == pytest.approx(expected, abs=1e-9)
        assert psi_c(f, C2) < 0

    def test_gamma_profile_plateau_and_decay(self):
        profile = GammaProfile()
        assert profile(0.0) == pytest.approx(0.23)
        assert profile(0.49) == pytest.approx(0.23)
        assert profile(0.6) == 0.0
        assert profile(0.545) == pytest.approx(0.115)

    def test_projective_delta(self):
        assert projective_delta(1, 1j) == 0.0
        assert projective_delta(2, 0) == 1.0
        assert gamma_profile(1, 0) == 0.0
        with pytest.raises(ValidationError):
            projective_delta(0, 0)

    def test_w2_is_real_scalar_equivariant(self):
        a, b = 0.8, 0.7j
        one = build_W2_element(a, b)
        two = build_W2_element(2.5 * a, 2.5 * b)
        assert fourier_coeff_re_sq(two, 3) == pytest.approx(2.5 ** 2 * fourier_coeff_re_sq(one, 3))

    def test_w2_rejects_positive_tail(self):
        with pytest.raises(ValidationError):
            build_W2_element(1, 0, tail={3: (1, 0)})

    def test_w2_rejects_zero_alpha_on_plateau(self):
        with pytest.raises(ValidationError):
            build_W2_element(0, 1j, profile=GammaProfile(0.23, 1.1, 1.2))

    def test_w3_head_action(self):
        f = build_W3_element(0.6, 0.3j, 0.5)
        assert action_A(f) == pytest.approx(w3_head_action(0.6, 0.3j, 0.5))


class TestCertificates:
    def test_i6_coefficients(self):
        cert = certificate_coefficients("I6", C2)
        assert (cert.A, cert.B, cert.C) == pytest.approx((3.56265, -2.82843, 0.44308), abs=1e-4)

    def test_i6_window(self):
        cert = certificate_coefficients("I6", C2)
        lo, hi = cert.gamma_roots()
        assert lo < 0.22 and hi > 0.57
        assert lo == pytest.approx(0.215, abs=1e-3)
        assert hi == pytest.approx(0.579, abs=1e-3)
        assert all(cert.evaluate(g) < 0 for g in np.linspace(0.22, 0.579, 50))

    def test_i4_coefficients(self):
        cert = certificate_coefficients("I4", C2)
        assert cert.C == pytest.approx(0.477, abs=1e-3)
        assert -cert.B == pytest.approx(1.414, abs=1e-3)
        assert cert.A == pytest.approx(4.352, abs=1e-3)
        assert cert.delta_root(0.23) == pytest.approx(0.4996, abs=1e-3)

    def test_i8_threshold(self):
        assert float(i8_threshold()) == pytest.approx(I8_THRESHOLD, abs=1e-12)
        assert float(i8_threshold()) == pytest.approx(8.6466, abs=5e-4)

    def test_i8_holds_only_above_threshold(self):
        assert certificate_coefficients("I8", I8_THRESHOLD * 1.001).holds
        assert not certificate_coefficients("I8", I8_THRESHOLD * 0.999).holds

    def test_unknown_case_suggests(self):
        with pytest.raises(ValidationError, match="did you mean 'I6'"):
            certificate_coefficients("i6", C2)

    def test_case_specific_helpers(self):
        with pytest.raises(ValidationError):
            certificate_coefficients("I4", C2).gamma_roots()
        with pytest.raises(ValidationError):
            certificate_coefficients("I6", C2).delta_root(0.2)

    @pytest.mark.parametrize("c", [C2, C2 * 0.999])
    def test_default_gamma_profile_is_covered(self, c):
        cert = certify_gamma_profile(c)
        assert cert.ok, cert.uncovered[:5]
        assert cert.plateau_ok

    def test_narrow_profile_leaves_gaps(self):
        cert = certify_gamma_profile(C2, GammaProfile(0.23, 0.1, 0.2))
        assert not cert.ok
        assert all(0.1 < d < 0.35 for d in cert.uncovered)


class TestNegativityScan:
    def test_w2_below_c2(self):
        report = negativity_scan("W2", C2 * 0.999, samples=500, seed=1)
        assert report.violations == 0
        assert report.max_psi < 0
        assert report.evidence == "sampling evidence"

    def test_w3_above_i8_threshold(self):
        report = negativity_scan("W3", I8_THRESHOLD * 1.001, samples=500, seed=1)
        assert report.violations == 0

    def test_small_c_finds_violations(self):
        report = negativity_scan("W2", 1.0, samples=50, K_tail=0, seed=2)
        assert report.violations == 50
        assert set(report.argmax) == {"alpha", "beta"}

    def test_seed_fixes_report(self):
        a = negativity_scan("W3", 9.0, samples=200, seed=5).to_dict()
        b = negativity_scan("W3", 9.0, samples=200, seed=5).to_dict()
        assert a == b

    def test_worker_count_does_not_change_report(self):
        serial = negativity_scan("W2", C2, samples=160, seed=9, workers=1)
        threaded = negativity_scan("W2", C2, samples=160, seed=9, workers=2)
        assert serial.to_dict() == threaded.to_dict()

    def test_unknown_family(self):
        with pytest.raises(ValidationError, match="did you mean"):
            negativity_scan("w2", C2, samples=10)

    @pytest.mark.slow
    @pytest.mark.parametrize("family,c", [("W2", C2 * 0.999), ("W3", 8.6466 * 1.001)])
    def test_ten_thousand_samples(self, family, c):
        report = negativity_scan(family, c, samples=10_000, K_tail=8, seed=7, workers=4)
        assert report.violations == 0
        assert report.max_psi < 0


class TestL1Bound:
    @settings(max_examples=50, deadline=None)
    @given(f=_loop_strategy(), n=st.integers(min_value=-3, max_value=3))
    def test_mean_modulus_dominates_each_coefficient(self, f, n):
        bound = l1_coeff_bound(f, n)
        assert bound.holds

    def test_thousand_seeded_loops_every_order(self, rng):
        worst = math.inf
        for _ in range(1000):
            K = int(rng.integers(0, 9))
            coeffs = rng.normal(size=(2 * K + 1, 2)) + 1j * rng.normal(size=(2 * K + 1, 2))
            f = FourierLoop(K, coeffs)
            for n in range(-K, K + 1):
                bound = l1_coeff_bound(f, n, nodes=512)
                assert bound.holds
                worst = min(worst, bound.slack)
        assert worst >= -1e-9

    def test_slack_comes_from_tolerances(self):
        f = FourierLoop.from_modes({1: (1, 0)})
        strict = replace(DEFAULT_TOLERANCES, l1_slack=-1.0)
        assert l1_coeff_bound(f, 1).holds
        assert not l1_coeff_bound(f, 1, tolerances=strict).holds

    def test_single_mode_is_tight(self):
        bound = l1_coeff_bound(FourierLoop.from_modes({2: (0.6, 0.8j)}), 2)
        assert bound.lhs == pytest.approx(bound.rhs)

    def test_rejects_order_past_k(self):
        with pytest.raises(ValidationError):
            l1_coeff_bound(FourierLoop.from_modes({1: (1, 0)}), 2)

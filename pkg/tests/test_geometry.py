"""
Tests for gauges and defining functions of the bidisc and of D_n.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ehcap.errors import NumericalError, ValidationError
from ehcap.geometry import (
    ApproximantParams,
    defining_Dn,
    g_profile,
    gauge_bidisc,
    gauge_Dn,
    grad_defining_Dn,
    in_bidisc,
    in_Dn,
    sandwich_check,
)


class TestApproximantParams:
    def test_rejects_bad_n(self):
        for n in (0, -3, 2.5, True):
            with pytest.raises(ValidationError):
                ApproximantParams(n)

    def test_rejects_small_p(self):
        with pytest.raises(ValidationError):
            ApproximantParams(10, p=1.5)

    def test_profile_inverse(self):
        params = ApproximantParams(10)
        for s in (0.0, 0.2, 0.5, 1.0, 2.0):
            value, slope, back = g_profile(s, params)
            assert value == pytest.approx(s ** 3)
            assert slope == pytest.approx(3 * s ** 2)
            assert back == pytest.approx(s, abs=1e-12)

    def test_profile_vanishes_below_zero(self):
        assert g_profile(-0.5, ApproximantParams(4)) == (0.0, 0.0, 0.0)

    def test_g_inv_rejects_negative(self):
        with pytest.raises(ValidationError):
            ApproximantParams(4).g_inv(-0.1)


class TestBidiscGauge:
    def test_matches_max_of_norms(self, rng):
        pts = rng.uniform(-2, 2, size=(100_000, 4))
        expected = np.maximum(np.sum(pts[:, :2] ** 2, axis=1), np.sum(pts[:, 2:] ** 2, axis=1))
        assert np.max(np.abs(gauge_bidisc(pts) - expected)) <= 1e-12

    def test_two_homogeneous(self, rng):
        pts = rng.normal(size=(50, 4))
        assert np.allclose(gauge_bidisc(3.0 * pts), 9.0 * gauge_bidisc(pts))

    def test_scalar_point(self):
        assert gauge_bidisc([0.6, 0.0, 0.0, 0.8]) == pytest.approx(0.64)
        assert in_bidisc([0.6, 0.0, 0.0, 0.8])

    def test_rejects_bad_shape(self):
        with pytest.raises(ValidationError):
            gauge_bidisc([1.0, 2.0, 3.0])
        with pytest.raises(ValidationError):
            gauge_bidisc([1.0, np.nan, 0.0, 0.0])


class TestDn:
    def test_boundary_point(self, approximant):
        rho = math.sqrt(approximant.outer_sq)
        assert defining_Dn([1.0, 0.0, rho, 0.0], approximant) == pytest.approx(0.0, abs=1e-14)

    def test_bidisc_is_inside(self, rng, approximant):
        angles = rng.uniform(0, 2 * np.pi, size=(200, 2))
        pts = np.column_stack([np.cos(angles[:, 0]), np.sin(angles[:, 0]), np.cos(angles[:, 1]), np.sin(angles[:, 1])])
        assert np.all(in_Dn(pts, approximant))

    def test_midpoint_convexity(self, rng, approximant):
        a = rng.uniform(-0.85, 0.85, size=(500, 4))
        b = rng.uniform(-0.85, 0.85, size=(500, 4))
        mid = defining_Dn(0.5 * (a + b), approximant)
        avg = 0.5 * (defining_Dn(a, approximant) + defining_Dn(b, approximant))
        assert np.all(mid <= avg + 1e-10 * np.maximum(1.0, np.abs(avg)))

    def test_gradient_vanishes_in_the_flat_part(self, approximant):
        assert np.allclose(grad_defining_Dn([0.5, 0.0, 0.1, 0.2], approximant), 0.0)

    def test_gradient_matches_finite_differences(self, approximant):
        pt = np.array([0.3, 0.98, 0.9, -0.5])
        h = 1e-7
        numeric = [
            (defining_Dn(pt + h * e, approximant) - defining_Dn(pt - h * e, approximant)) / (2 * h)
            for e in np.eye(4)
        ]
        assert grad_defining_Dn(pt, approximant) == pytest.approx(numeric, rel=1e-6, abs=1e-8)


class TestGaugeDn:
    def test_scaled_point_lands_on_boundary(self, rng, approximant):
        for pt in rng.normal(size=(20, 4)):
            s = gauge_Dn(pt, approximant)
            assert defining_Dn(pt / math.sqrt(s), approximant) == pytest.approx(0.0, abs=1e-9)

    def test_sandwiched_by_bidisc_gauge(self, rng, approximant):
        for pt in rng.normal(size=(20, 4)):
            r = gauge_bidisc(pt)
            rn = gauge_Dn(pt, approximant)
            assert r / approximant.outer_sq * (1 - 1e-12) <= rn <= r * (1 + 1e-12)

    @settings(max_examples=30, deadline=None)
    @given(scale=st.floats(min_value=0.1, max_value=10.0))
    def test_two_homogeneous(self, scale):
        params = ApproximantParams(7)
        pt = np.array([0.4, -0.7, 0.9, 0.3])
        assert gauge_Dn(scale * pt, params) == pytest.approx(scale ** 2 * gauge_Dn(pt, params), rel=1e-10)

    @pytest.mark.parametrize("lam", [0.5, 2.0, 7.0])
    def test_homogeneity_at_fixed_scales(self, rng, approximant, lam):
        for pt in rng.normal(size=(10, 4)):
            assert gauge_Dn(lam * pt, approximant) == pytest.approx(lam ** 2 * gauge_Dn(pt, approximant), rel=1e-10)

    def test_origin_is_rejected(self):
        with pytest.raises(ValidationError):
            gauge_Dn([0.0, 0.0, 0.0, 0.0], ApproximantParams(5))

    def test_bracket_failure_is_numerical(self, monkeypatch):
        from ehcap import geometry

        monkeypatch.setattr(geometry, "defining_Dn", lambda pt, params: 1.0)
        with pytest.raises(NumericalError):
            gauge_Dn([1.0, 0.0, 0.0, 0.0], ApproximantParams(5))


class TestSandwich:
    @pytest.mark.parametrize("n", [1, 5, 20])
    def test_inclusions_hold(self, n):
        report = sandwich_check(ApproximantParams(n), samples=20_000, seed=3)
        assert report.ok, report.violations
        assert report.worst_margin["bidisc boundary in D_n"] < 0

    def test_seed_is_reproducible(self):
        a = sandwich_check(ApproximantParams(4), samples=2000, seed=11).to_dict()
        b = sandwich_check(ApproximantParams(4), samples=2000, seed=11).to_dict()
        assert a == b

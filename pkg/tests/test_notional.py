"""Notional function families."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from optstrat.errors import DegenerateCorrelation
from optstrat.model import SecurityModel, normal_conditional_moments
from optstrat.notional import (
    BuyHold,
    ClippedRatio,
    LambdaClipped,
    Rescaled,
    SignThreshold,
    Tabulated,
    on_raw_indicator,
)

H = np.linspace(-10, 10, 2001)


class TestSignThreshold:
    def test_values(self):
        f = SignThreshold(-0.5)
        np.testing.assert_array_equal(f([-1.0, -0.5, 0.0]), [-1.0, 0.0, 1.0])

    def test_describe(self):
        assert SignThreshold(0.25).describe() == {"kind": "sign_threshold", "threshold": 0.25}


class TestBuyHold:
    def test_constant(self):
        np.testing.assert_array_equal(BuyHold(-1)(np.zeros(3)), [-1.0, -1.0, -1.0])

    def test_rejects_bad_direction(self):
        with pytest.raises(ValueError):
            BuyHold(2)


class TestClippedRatio:
    @given(st.floats(0.01, 0.99), st.floats(-0.1, 0.1))
    def test_bounded_and_saturates_at_extrema(self, rho, mu):
        f = ClippedRatio(SecurityModel(mu, 0.05, rho))
        assert np.all(np.abs(f(H)) <= 1.0)
        assert f(f.h_plus) == pytest.approx(1.0, abs=1e-12)
        assert f(f.h_minus) == pytest.approx(-1.0, abs=1e-12)

    @given(st.floats(0.01, 0.99), st.floats(-0.1, 0.1))
    def test_ratio_extrema_are_symmetric(self, rho, mu):
        # |g(H+)| == |g(H-)| for every drift, so one scale normalizes both sides
        model = SecurityModel(mu, 0.05, rho)
        f = ClippedRatio(model)
        cm = normal_conditional_moments(model)
        assert abs(cm.g(f.h_plus)) == pytest.approx(abs(cm.g(f.h_minus)), rel=1e-12)
        assert cm.g(f.h_plus) == pytest.approx(f.scale, rel=1e-12)

    def test_is_proportional_to_g(self):
        model = SecurityModel(0.01, 0.05, 0.4)
        f = ClippedRatio(model)
        cm = normal_conditional_moments(model)
        np.testing.assert_allclose(f(H), cm.g(H) / f.scale, rtol=1e-12, atol=1e-15)

    def test_zero_drift_formula(self):
        rho = 0.6
        c = 1 - rho * rho
        f = ClippedRatio(SecurityModel(0.0, 1.0, rho))
        np.testing.assert_allclose(f(H), 2 * rho * np.sqrt(c) * H / (c + rho * rho * H * H), rtol=1e-12, atol=1e-15)

    def test_requires_standardized(self):
        with pytest.raises(ValueError):
            ClippedRatio(SecurityModel(0.0, 1.0, 0.5, mu_H=1.0))

    @pytest.mark.parametrize("rho", [0.0, 1.0])
    def test_degenerate_rho(self, rho):
        with pytest.raises(DegenerateCorrelation):
            ClippedRatio(SecurityModel(0.0, 1.0, rho))


class TestLambdaClipped:
    def test_clips(self):
        cm = normal_conditional_moments(SecurityModel(0.0, 0.05, 0.5))
        f = LambdaClipped(cm, 1.0)
        assert np.max(np.abs(f(H))) == 1.0

    def test_rejects_nonpositive_lambda(self):
        cm = normal_conditional_moments(SecurityModel(0.0, 0.05, 0.5))
        with pytest.raises(ValueError):
            LambdaClipped(cm, 0.0)


class TestTabulated:
    def test_interpolates_and_extends_flat(self):
        f = Tabulated.from_pairs([(-1.0, -0.5), (1.0, 0.5)])
        np.testing.assert_allclose(f([-5.0, 0.0, 0.5, 5.0]), [-0.5, 0.0, 0.25, 0.5])

    @pytest.mark.parametrize(
        "grid,values",
        [([0.0, 0.0], [0.1, 0.2]), ([1.0, 0.0], [0.1, 0.2]), ([0.0, 1.0], [0.1, 1.5]), ([0.0], [0.1, 0.2])],
    )
    def test_validation(self, grid, values):
        with pytest.raises(ValueError):
            Tabulated(grid, values)


class TestRescaled:
    def test_raw_indicator_matches_standardized(self):
        raw = SecurityModel(0.01, 0.05, -0.4, mu_H=3.0, sigma_H=2.0)
        inner = SignThreshold(-0.5)
        f = on_raw_indicator(raw, inner)
        assert isinstance(f, Rescaled)
        h = np.array([-1.0, 2.0, 3.5, 9.0])
        np.testing.assert_array_equal(f(h), inner(-(h - 3.0) / 2.0))

    def test_standard_model_passthrough(self):
        inner = SignThreshold(0.0)
        assert on_raw_indicator(SecurityModel(0.0, 1.0, 0.5), inner) is inner

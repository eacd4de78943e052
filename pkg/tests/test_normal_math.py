"""Special functions and the Gaussian-weighted quadrature engine.

Reference values were computed once with mpmath at 40 digits (direct
integration of the normal density / Gaussian tail) and frozen here.
"""

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from optstrat.errors import QuadratureError
from optstrat.normal_math import (
    QuadratureSpec,
    a_of_theta,
    clip,
    erfcx_scaled,
    integrate_gaussian_weighted,
    std_normal_cdf,
    std_normal_pdf,
    tau_of_m,
)

finite = st.floats(min_value=-50, max_value=50, allow_nan=False)

# mpmath: quad(npdf, [-inf, 1]) and e * quad(2/sqrt(pi) exp(-t^2), [1, inf])
CDF_AT_1 = 0.84134474606854295
ERFCX_AT_1 = 0.427583576155807
# mpmath: exp(-t^2/2) sqrt(2/pi) + t (2 ncdf(t) - 1)
A_REF = {
    0.0: 0.79788456080286536,
    0.5: 0.89559311480261206,
    1.0: 1.1666309411753726,
    2.0: 2.0169814052336593,
    3.0: 3.0007643086340954,
}


class TestStdNormalCdf:
    def test_symmetry_point(self):
        assert std_normal_cdf(0.0) == 0.5

    def test_upper_limit(self):
        assert std_normal_cdf(40.0) == 1.0

    def test_reference_value(self):
        assert abs(std_normal_cdf(1.0) - CDF_AT_1) <= 1e-14

    @pytest.mark.parametrize("x", [-8.0, -3.0, -0.3, 0.7, 2.5, 6.0])
    def test_matches_mpmath(self, x):
        assert abs(std_normal_cdf(x) - float(mp.ncdf(x))) <= 1e-14

    @given(finite, finite)
    def test_monotone(self, a, b):
        lo, hi = min(a, b), max(a, b)
        assert std_normal_cdf(lo) <= std_normal_cdf(hi)

    @pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
    def test_rejects_non_finite(self, bad):
        with pytest.raises(ValueError):
            std_normal_cdf(bad)

    def test_vectorized(self):
        out = std_normal_cdf(np.array([-1.0, 0.0, 1.0]))
        np.testing.assert_allclose(out, [1 - CDF_AT_1, 0.5, CDF_AT_1], atol=1e-15)

    def test_pdf_integrates_to_one(self):
        assert integrate_gaussian_weighted(lambda h: 1.0) == pytest.approx(1.0, abs=1e-12)
        assert std_normal_pdf(0.0) == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-15)


class TestErfcxScaled:
    def test_origin(self):
        assert erfcx_scaled(0.0) == 1.0

    def test_reference_value(self):
        assert erfcx_scaled(1.0) == pytest.approx(ERFCX_AT_1, rel=1e-14)

    def test_large_argument_asymptote(self):
        x = 1e6
        assert erfcx_scaled(x) == pytest.approx(1 / (x * math.sqrt(math.pi)), rel=1e-9)

    def test_no_overflow_far_out(self):
        # b up to 1e8 in e^{b^2/2}(1 - N(b)) = erfcx(b / sqrt 2) / 2
        val = 0.5 * erfcx_scaled(1e8 / math.sqrt(2))
        assert math.isfinite(val) and val == pytest.approx(1 / (1e8 * math.sqrt(2 * math.pi)), rel=1e-12)

    def test_tail_identity_against_cdf(self):
        # upper tail taken as N(-b): 1 - N(b) by subtraction has no relative precision past b ~ 8
        b = np.linspace(0, 30, 3001)
        lhs = 0.5 * erfcx_scaled(b / math.sqrt(2))
        rhs = np.exp(b * b / 2) * std_normal_cdf(-b)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12)

    @pytest.mark.parametrize("b", [0.0, 0.3, 1.0, 2.5, 5.0, 12.0])
    def test_gaussian_tail_identity(self, b):
        with mp.workdps(40):
            expected = mp.exp(mp.mpf(b) ** 2 / 2) * mp.ncdf(-b)
        assert 0.5 * erfcx_scaled(b / math.sqrt(2)) == pytest.approx(float(expected), rel=1e-13)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            erfcx_scaled(-0.1)


class TestAOfTheta:
    @pytest.mark.parametrize("theta,expected", sorted(A_REF.items()))
    def test_reference_values(self, theta, expected):
        assert a_of_theta(theta) == pytest.approx(expected, rel=1e-14)

    def test_origin_is_sqrt_2_over_pi(self):
        assert abs(a_of_theta(0.0) - math.sqrt(2 / math.pi)) <= 1e-15

    @given(finite)
    def test_dominates_abs(self, t):
        assert a_of_theta(t) >= abs(t)

    @given(finite)
    def test_even(self, t):
        assert a_of_theta(-t) == a_of_theta(t)

    def test_tends_to_abs(self):
        gaps = [a_of_theta(t) - t for t in (2.0, 4.0, 6.0, 10.0)]
        assert all(b < a for a, b in zip(gaps, gaps[1:]))
        assert gaps[-1] < 1e-20

    def test_matches_textbook_form(self):
        rng = np.random.default_rng(0)
        t = rng.uniform(-10, 10, size=10_000)
        direct = t * tau_of_m(t) + math.sqrt(2 / math.pi) * np.exp(-0.5 * t * t)
        np.testing.assert_allclose(a_of_theta(t), direct, rtol=0, atol=1e-13)

    def test_merges_with_abs_beyond_six(self):
        t = np.concatenate([np.linspace(-40, -6, 500), np.linspace(6, 40, 500)])
        assert np.max(np.abs(a_of_theta(t) - np.abs(t))) < 1e-6

    def test_is_mean_absolute_value(self):
        # E|theta + Z| by quadrature
        for theta in (-1.3, 0.4, 2.2):
            val = integrate_gaussian_weighted(lambda h: abs(theta + h), points=[-theta])
            assert a_of_theta(theta) == pytest.approx(val, rel=1e-10)


class TestTauAndClip:
    @given(finite)
    def test_tau_is_odd_and_matches_cdf(self, m):
        assert tau_of_m(-m) == -tau_of_m(m)
        assert tau_of_m(m) == pytest.approx(2 * std_normal_cdf(m) - 1, abs=1e-15)

    def test_clip(self):
        np.testing.assert_array_equal(clip([-3.0, -0.5, 0.0, 0.9, 7.0]), [-1.0, -0.5, 0.0, 0.9, 1.0])

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            tau_of_m(math.nan)


class TestQuadrature:
    def test_spec_defaults(self):
        spec = QuadratureSpec()
        assert (spec.abs_tol, spec.rel_tol, spec.max_subdivisions, spec.integration_halfwidth) == (
            1e-10,
            1e-10,
            2000,
            12.0,
        )

    @pytest.mark.parametrize(
        "kwargs",
        [{"abs_tol": 0.0}, {"rel_tol": -1e-3}, {"max_subdivisions": 0}, {"integration_halfwidth": 7.9}],
    )
    def test_spec_validation(self, kwargs):
        with pytest.raises(ValueError):
            QuadratureSpec(**kwargs)

    @pytest.mark.parametrize("k,expected", [(0, 1.0), (1, 0.0), (2, 1.0), (3, 0.0), (4, 3.0), (6, 15.0)])
    def test_moments(self, k, expected):
        assert integrate_gaussian_weighted(lambda h: h**k) == pytest.approx(expected, rel=1e-10, abs=1e-9)

    def test_breakpoints_help_kinks(self):
        val = integrate_gaussian_weighted(lambda h: np.sign(h - 0.3), points=[0.3])
        assert val == pytest.approx(1 - 2 * float(mp.ncdf(0.3)), abs=1e-12)

    def test_out_of_range_points_ignored(self):
        assert integrate_gaussian_weighted(lambda h: 1.0, points=[-50.0, 50.0]) == pytest.approx(1.0)

    def test_nonconvergence_raises(self):
        spec = QuadratureSpec(abs_tol=1e-14, rel_tol=1e-14, max_subdivisions=1)
        with pytest.raises(QuadratureError, match="did not converge"):
            integrate_gaussian_weighted(lambda h: math.sin(40 * h) ** 2, spec)

    @settings(max_examples=25, deadline=None)
    @given(st.floats(min_value=-3, max_value=3), st.floats(min_value=0.2, max_value=3))
    def test_linear_gaussian_expectation(self, a, b):
        # E[(a + b Z)^2] = a^2 + b^2
        val = integrate_gaussian_weighted(lambda h: (a + b * h) ** 2)
        assert val == pytest.approx(a * a + b * b, rel=1e-9, abs=1e-12)

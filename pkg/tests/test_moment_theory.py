import math

from hypothesis import given, settings, strategies as st
import numpy as np
import pytest

from steinhaus.errors import DomainError
from steinhaus.field_sampler import ModelParams
from steinhaus.moment_theory import (
    CRITICAL,
    SUBCRITICAL,
    SUPERCRITICAL,
    classify_regime,
    mean_gain_asymptotic,
    mean_gain_exact,
    rate_function,
    rate_function_derivative,
    rate_function_second_derivative,
    saddle_point,
)
from steinhaus.quadrature import integrate
from steinhaus.reference_oracles import mc_mean_gain

from _oracles import bisection_saddle


class TestRateFunction:
    def test_zero_at_origin(self):
        assert rate_function(0.5, 0.0) == 0.0

    def test_slope_at_origin(self):
        assert abs(rate_function(2.0, 1e-8) - (-1e-8)) <= 1e-12

    def test_against_series_oracle(self):
        i0_4 = math.fsum((2.0**2) ** k / math.factorial(k) ** 2 for k in range(60))
        assert rate_function(2.0, 2.0) == pytest.approx(2.0 - math.log(i0_4), rel=1e-14)

    def test_array_input(self):
        u = np.array([0.0, 1.0, 2.0])
        np.testing.assert_allclose(rate_function(2.0, u), [rate_function(2.0, x) for x in u])

    @pytest.mark.parametrize("g,u", [(0.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, math.nan),
                                     (math.inf, 1.0)])
    def test_domain(self, g, u):
        with pytest.raises(DomainError):
            rate_function(g, u)

    @given(st.floats(0.01, 0.99), st.floats(0, 1e4))
    def test_linear_lower_bound_below_threshold(self, g, u):
        assert rate_function(g, u) >= (1 - g) * u - 1e-12 * max(1.0, u)

    @given(st.floats(0.01, 50), st.floats(0, 1e4))
    def test_coercive_lower_bound(self, g, u):
        assert rate_function(g, u) >= u - 2 * math.sqrt(g * u) - 1e-12 * max(1.0, u)


class TestDerivative:
    def test_limit_subcritical(self):
        assert rate_function_derivative(0.5, 0.0) == 0.5
        assert rate_function_derivative(0.5, 1e-14) == pytest.approx(0.5, abs=1e-12)

    def test_limit_critical(self):
        assert rate_function_derivative(1.0, 0.0) == 0.0

    def test_limit_at_infinity(self):
        assert rate_function_derivative(2.0, 1e8) == pytest.approx(1.0, abs=1e-3)

    @pytest.mark.parametrize("g", [0.3, 1.0, 2.0, 7.0])
    @pytest.mark.parametrize("u", [0.01, 0.5, 3.0, 40.0])
    def test_finite_difference(self, g, u):
        h = 1e-6 * max(u, 1.0)
        fd = (rate_function(g, u + h) - rate_function(g, u - h)) / (2 * h)
        assert rate_function_derivative(g, u) == pytest.approx(fd, abs=1e-8)
        fd2 = (rate_function_derivative(g, u + h) - rate_function_derivative(g, u - h)) / (2 * h)
        assert rate_function_second_derivative(g, u) == pytest.approx(fd2, rel=1e-5, abs=1e-9)


class TestSaddle:
    def test_near_critical(self):
        s = saddle_point(1 + 1e-6)
        assert 0 < s.u0 < 1e-2
        assert 0 < s.gamma_g < 1e-6
        assert s.f2_u0 == pytest.approx(0.5, rel=1e-3)

    def test_g2_against_bisection(self):
        u0, gamma = bisection_saddle(2.0, 1e-12, 8.0)
        s = saddle_point(2.0)
        assert s.u0 == pytest.approx(u0, abs=1e-10)
        assert s.gamma_g == pytest.approx(gamma, abs=1e-10)
        # frozen from the bisection oracle
        assert u0 == pytest.approx(1.382658197216898, abs=1e-12)
        assert gamma == pytest.approx(0.47021544233119106, abs=1e-12)

    @pytest.mark.parametrize("g", [1.1, 2.0, 5.0, 20.0])
    def test_stationarity_and_curvature(self, g):
        s = saddle_point(g)
        assert abs(rate_function_derivative(g, s.u0)) <= 1e-12
        assert s.gamma_g > 0 and s.f2_u0 > 0
        assert s.f2_u0 == pytest.approx(rate_function_second_derivative(g, s.u0), rel=1e-6)

    def test_large_gain(self):
        g = 50.0
        assert saddle_point(g).gamma_g == pytest.approx(g - 0.5 * math.log(4 * math.pi * g), rel=0.02)

    @pytest.mark.parametrize("g", [0.5, 1.0])
    def test_domain(self, g):
        with pytest.raises(DomainError):
            saddle_point(g)

    def test_rejects_tiny_tolerance(self):
        with pytest.raises(DomainError):
            saddle_point(2.0, tol=1e-16)

    @pytest.mark.parametrize("g", [1.1, 2.0, 5.0, 20.0])
    def test_unique_sign_change(self, g):
        u_hi = max(4 * g, 10)
        grid = np.linspace(0, u_hi, 10_001)[1:]
        signs = np.sign([rate_function_derivative(g, u) for u in grid])
        assert np.count_nonzero(np.diff(signs)) == 1


class TestMeanGainExact:
    @pytest.mark.parametrize("g", [0.25, 0.5, 2.0, 4.0])
    def test_single_mode(self, g):
        rep = mean_gain_exact(ModelParams(d=1, N=0, g=g))
        assert abs(rep.log_mean_gain - g) <= 1e-10

    def test_subcritical_limit(self):
        values = [mean_gain_exact(ModelParams(N=N, g=0.5)).log_mean_gain for N in range(0, 65)]
        assert all(v <= math.log(2) for v in values)
        assert all(np.diff(values) > 0)
        assert math.log(2) - values[-1] < 0.004

    def test_against_monte_carlo(self):
        params = ModelParams(d=1, N=2, g=0.8)
        mc = mc_mean_gain(params, 20_000)
        exact = math.exp(mean_gain_exact(params).log_mean_gain)
        assert abs(mc.mean - exact) <= 4 * mc.std_error

    def test_convergence_rate(self):
        ns = np.array([4, 8, 16, 32, 64])
        gap = [2 - math.exp(mean_gain_exact(ModelParams(N=int(N), g=0.5)).log_mean_gain) for N in ns]
        slope = np.polyfit(np.log(2 * ns + 1), np.log(gap), 1)[0]
        assert abs(slope + 1) <= 0.2

    def test_supercritical_prefactor(self):
        N, g = 100, 2.0
        s = saddle_point(g)
        rep = mean_gain_exact(ModelParams(N=N, g=g))
        M = 2 * N + 1
        rest = rep.log_mean_gain - s.gamma_g * M - 0.5 * math.log(2 * math.pi / s.f2_u0)
        assert abs(rest / math.log(2 * N + 1) - 0.5) <= 0.1

    @pytest.mark.parametrize("N", [0, 3, 20])
    def test_increasing_in_gain(self, N):
        gains = [0.1, 0.5, 0.9, 1.0, 1.1, 2.0, 5.0]
        values = [mean_gain_exact(ModelParams(N=N, g=g)).log_mean_gain for g in gains]
        assert all(np.diff(values) > 0)

    @pytest.mark.parametrize("d,N,N1", [(2, 1, 4), (3, 1, 13), (2, 3, 24)])
    def test_depends_on_mode_count_only(self, d, N, N1):
        a = mean_gain_exact(ModelParams(d=d, N=N, g=1.7)).log_mean_gain
        b = mean_gain_exact(ModelParams(d=1, N=N1, g=1.7)).log_mean_gain
        assert a == pytest.approx(b, rel=1e-10)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0.01, 0.99), st.integers(0, 200))
    def test_report_invariants_subcritical(self, g, N):
        rep = mean_gain_exact(ModelParams(N=N, g=g))
        assert 0 <= rep.log_mean_gain <= rep.upper_bound_log + 1e-12
        assert rep.regime == SUBCRITICAL and rep.asymptotic_log is None

    def test_critical_report(self):
        rep = mean_gain_exact(ModelParams(N=10, g=1.0))
        assert rep.regime == CRITICAL
        assert rep.upper_bound_log == math.inf and rep.asymptotic_log is None
        assert rep.log_mean_gain > 0

    def test_large_mode_count_no_overflow(self):
        rep = mean_gain_exact(ModelParams(d=3, N=5, g=3.0))  # M = 1331
        assert math.isfinite(rep.log_mean_gain)
        assert rep.log_mean_gain > 700  # exp() would overflow


class TestAsymptotic:
    def test_converges_to_quadrature(self):
        diffs = []
        for N in (8, 16, 32, 64, 100):
            rep = mean_gain_exact(ModelParams(N=N, g=2.0))
            diffs.append(abs(rep.log_mean_gain - rep.asymptotic_log))
        assert all(np.diff(diffs) < 0)
        assert diffs[-1] < 0.02

    def test_near_critical_gamma_negligible(self):
        g = 1 + 1e-6
        s = saddle_point(g)
        for N in (3, 30):
            params = ModelParams(N=N, g=g)
            expected = 0.5 * math.log(2 * N + 1) + 0.5 * math.log(2 * math.pi / s.f2_u0)
            assert mean_gain_asymptotic(params, s) == pytest.approx(expected, abs=1e-8)

    def test_formula_instantiation(self):
        s = saddle_point(2.0)
        value = mean_gain_asymptotic(ModelParams(d=1, N=12, g=2.0), s)
        assert value == s.gamma_g * 25 + 0.5 * math.log(25) + 0.5 * math.log(2 * math.pi / s.f2_u0)

    def test_domain(self):
        with pytest.raises(DomainError):
            mean_gain_asymptotic(ModelParams(g=0.5), saddle_point(2.0))
        with pytest.raises(DomainError):
            mean_gain_asymptotic(ModelParams(g=3.0), saddle_point(2.0))


@pytest.mark.parametrize("g,tag", [(0.5, SUBCRITICAL), (1.0, CRITICAL), (2.0, SUPERCRITICAL)])
def test_classify_regime(g, tag):
    assert classify_regime(g) == tag


class TestQuadrature:
    def test_polynomial_exact(self):
        value, _ = integrate(lambda x: x**5 - 3 * x**2, [0.0, 2.0])
        assert value == pytest.approx(64 / 6 - 8, rel=1e-14)

    def test_sharp_gaussian(self):
        w = 1e-4
        # nodes must be told where the peak is, as mean_gain_exact does
        pts = [0.0] + [0.3 + s * w for s in (-10, -3, -1, 0, 1, 3, 10)] + [1.0]
        value, _ = integrate(lambda x: np.exp(-((x - 0.3) ** 2) / (2 * w * w)), pts, rtol=1e-12)
        assert value == pytest.approx(w * math.sqrt(2 * math.pi), rel=1e-10)

    def test_empty_interval(self):
        assert integrate(np.exp, [1.0, 1.0]) == (0.0, 0.0)

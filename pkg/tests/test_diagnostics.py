import math

from hypothesis import given, settings, strategies as st
import numpy as np
import pytest

from steinhaus.diagnostics import (
    chain_ratios,
    chain_report,
    ergodic_ratio_log,
    exceedance_level,
    exceedance_volume,
    markov_log_bound,
    mass_concentration,
    quantile_threshold,
    refinement_change,
    resolved_grid,
    spatial_moments,
)
from steinhaus.errors import DomainError, UsageError
from steinhaus.field_sampler import IntensityGrid, ModelParams, intensity_grid, sample_phases
from steinhaus.moment_theory import mean_gain_exact


def random_grid(N=8, c=4, r=0, d=1):
    return intensity_grid(sample_phases(ModelParams(d=d, N=N), r), c)


class TestSpatialMoments:
    @pytest.mark.parametrize("g", [0.5, 2.0])
    def test_constant_field(self, g):
        grid = intensity_grid(sample_phases(ModelParams(N=0), 0), 4)
        m = spatial_moments(grid, g, 4)
        np.testing.assert_allclose(m.log_m, g * np.arange(5), rtol=1e-14, atol=1e-15)

    def test_two_values(self):
        g = 0.7
        grid = IntensityGrid(1, 0, 2, np.array([0.0, math.log(2) / g]))
        assert spatial_moments(grid, g, 1).log_m[1] == pytest.approx(math.log(1.5), rel=1e-14)

    @pytest.mark.parametrize("r", range(3))
    def test_naive_oracle(self, r):
        grid, g = random_grid(r=r), 1.3
        naive = math.log(math.fsum(np.exp(2 * g * grid.values)) / grid.values.size)
        assert spatial_moments(grid, g, 2).log_m[2] == pytest.approx(naive, rel=1e-12)

    def test_no_overflow(self):
        grid = IntensityGrid(1, 0, 3, np.array([0.0, 400.0, 400.0]))
        lm = spatial_moments(grid, 1.0, 4).log_m
        assert lm[4] == pytest.approx(1600 + math.log(2 / 3), rel=1e-14)

    @pytest.mark.parametrize("p_max", [0, 9])
    def test_p_max_range(self, p_max):
        with pytest.raises(DomainError):
            spatial_moments(random_grid(), 1.0, p_max)

    @pytest.mark.parametrize("p", [2, 3, 4])
    def test_scaling_identity(self, p):
        grid, g = random_grid(N=16), 0.8
        assert spatial_moments(grid, g, p).log_m[p] == spatial_moments(grid, g * p, 1).log_m[1]

    def test_monotone_in_gain(self):
        grid = random_grid(N=16)
        values = [spatial_moments(grid, g, 1).log_m[1] for g in np.linspace(0.1, 4, 30)]
        assert all(np.diff(values) >= 0)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10**6), st.floats(0.1, 3.0))
    def test_power_mean_and_jensen(self, r, g):
        lm = spatial_moments(random_grid(N=6, r=r), g, 6).log_m
        p = np.arange(1, 7)
        assert np.all(np.diff(lm[1:] / p) >= -1e-12)
        assert np.all(lm[1:] >= g * p - 1e-12)


class TestChain:
    @pytest.mark.parametrize("r", range(10))
    def test_nonnegative(self, r):
        L = chain_ratios(spatial_moments(random_grid(N=16, r=r), 2.0, 6))
        assert L.shape == (5,)
        assert np.all(L >= -1e-12)

    def test_values(self):
        m = spatial_moments(random_grid(), 1.0, 3)
        L = chain_ratios(m)
        assert L[0] == m.log_m[2] / 2 - m.log_m[1]
        assert L[1] == m.log_m[3] / 3 - m.log_m[2] / 2


class TestErgodicRatio:
    def test_single_mode(self):
        params = ModelParams(N=0, g=0.5)
        m = spatial_moments(intensity_grid(sample_phases(params, 0)), 0.5, 1)
        assert abs(ergodic_ratio_log(m, mean_gain_exact(params))) <= 1e-10

    def test_gain_mismatch(self):
        m = spatial_moments(random_grid(), 0.5, 1)
        with pytest.raises(UsageError):
            ergodic_ratio_log(m, mean_gain_exact(ModelParams(N=8, g=0.6)))

    def test_supercritical_strongly_negative(self):
        params = ModelParams(N=128, g=2.0)
        grid, _ = resolved_grid(sample_phases(params, 0), 2.0, 1)
        value = ergodic_ratio_log(spatial_moments(grid, 2.0, 1), mean_gain_exact(params))
        assert value < -50


class TestExceedance:
    def test_extremes(self):
        grid, g = random_grid(), 1.0
        assert exceedance_volume(grid, g, g * grid.values.min() - 1) == 1.0
        assert exceedance_volume(grid, g, g * grid.values.max()) == 0.0

    @pytest.mark.parametrize("r", range(10))
    @pytest.mark.parametrize("p", [2, 3])
    def test_markov(self, r, p):
        grid, g = random_grid(N=16, r=r), 2.0
        m = spatial_moments(grid, g, 4)
        log_f = quantile_threshold(grid, g, exceedance_level(p))
        assert exceedance_volume(grid, g, log_f) <= math.exp(markov_log_bound(m, p, log_f)) * (1 + 1e-12)

    def test_levels(self):
        assert [exceedance_level(p) for p in (1, 2, 3)] == pytest.approx([0.9, 0.99, 0.999])


class TestMassConcentration:
    @pytest.mark.parametrize("q", [0.1, 0.5, 0.9])
    @pytest.mark.parametrize("p", [1, 3])
    def test_constant_field(self, q, p):
        grid = IntensityGrid(1, 0, 100, np.ones(100))
        assert abs(mass_concentration(grid, 1.0, p, q) - q) <= 1 / 100

    def test_single_peak(self):
        values = np.zeros(64)
        values[17] = 50.0
        grid = IntensityGrid(1, 0, 64, values)
        assert mass_concentration(grid, 1.0, 2, 0.5) == 1 / 64

    @pytest.mark.parametrize("q", [0.0, 1.0])
    def test_domain(self, q):
        with pytest.raises(DomainError):
            mass_concentration(random_grid(), 1.0, 1, q)

    def test_in_unit_interval(self):
        grid = random_grid(N=32)
        for p in (1, 2, 3):
            assert 0 < mass_concentration(grid, 2.0, p, 0.9) <= 1


class TestRefinement:
    def test_single_mode_stable(self):
        ph = sample_phases(ModelParams(N=0), 0)
        assert refinement_change(ph, 2.0, 3, 4) == pytest.approx(0.0, abs=1e-13)

    def test_resolved_grid_meets_tolerance(self):
        ph = sample_phases(ModelParams(N=8), 0)
        grid, change = resolved_grid(ph, 2.0, 4)
        assert change <= 0.01
        assert grid.m_grid % 17 == 0 and grid.m_grid >= 8 * 17

    def test_budget_exhausted(self):
        ph = sample_phases(ModelParams(N=8), 0)
        grid, change = resolved_grid(ph, 2.0, 4, max_values=68)
        assert change == math.inf and grid.m_grid == 68


def test_chain_report_shapes():
    params = ModelParams(N=8, g=2.0)
    grid = random_grid(N=8)
    rep = chain_report(grid, 0, 2.0, mean_gain_exact(params), p_max=4)
    assert rep.L.shape == rep.exceedance.shape == rep.concentration.shape == (3,)
    assert np.all((rep.exceedance >= 0) & (rep.exceedance <= 1))
    assert rep.log_ergodic_ratio < 0

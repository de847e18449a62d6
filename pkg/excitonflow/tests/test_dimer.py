"""Tests for the closed-form dimer results."""

import math

import pytest
from scipy.integrate import quad

from excitonflow.core.dimer import (
    DimerParams,
    ExtremumKind,
    analytic_sink_population,
    dimer_populations,
    extremal_frequencies,
    phase_integral,
    static_sink_population,
    static_sink_population_gamma_condition,
)
from excitonflow.core.errors import ConfigurationError, DomainError, GammaConditionViolated


class TestStaticSinkPopulation:
    """Tests for the resting-dimer yield."""

    def test_reference_value(self):
        assert static_sink_population(1.0, 0.1, 0.5) == pytest.approx(0.673854447, rel=1e-8)

    def test_zero_coupling(self):
        assert static_sink_population(0.0, 0.1, 0.5) == 0.0

    def test_lossless(self):
        assert static_sink_population(2.0, 0.0, 0.5) == pytest.approx(1.0)

    def test_increasing_in_coupling(self):
        values = [static_sink_population(j, 0.1, 0.5) for j in (0.5, 1.0, 2.0, 8.0)]
        assert values == sorted(values)
        assert values[-1] < 1.0

    def test_domain(self):
        with pytest.raises(DomainError):
            static_sink_population(1.0, 0.0, 0.0)
        with pytest.raises(DomainError):
            static_sink_population(-1.0, 0.1, 0.5)

    def test_gamma_condition_limit(self):
        assert static_sink_population_gamma_condition(1.0, 0.6, 0.5) == pytest.approx(0.5 / (1.2 * 1.36))


class TestDimerParams:
    """Tests for DimerParams."""

    def test_defaults_meet_condition(self):
        params = DimerParams()
        assert params.satisfies_gamma_condition()
        assert params.period == pytest.approx(2 * math.pi / 4.54)

    def test_condition_violated(self):
        params = DimerParams(gamma1=0.1, gamma2=0.1, gamma_sink=0.5)
        with pytest.raises(GammaConditionViolated):
            dimer_populations(params, 1.0)

    def test_detuned_sites_violate_condition(self):
        with pytest.raises(GammaConditionViolated):
            DimerParams(epsilon2=0.3).require_gamma_condition()

    def test_amplitude_bound(self):
        with pytest.raises(ConfigurationError):
            DimerParams(a=0.5)


class TestPhaseIntegral:
    """Tests for the coupling phase integral."""

    def test_frozen_drive(self):
        params = DimerParams(omega=0.0)
        assert phase_integral(params, 2.0) == pytest.approx(16.0)

    def test_whole_periods(self):
        params = DimerParams()
        t = 3 * params.period
        direct = quad(params.coupling, 0.0, t, limit=400, epsrel=1e-11)[0]
        assert phase_integral(params, t) == pytest.approx(direct, rel=1e-8)

    def test_partial_period(self):
        params = DimerParams(phi=0.3)
        t = 2.4 * params.period
        direct = quad(params.coupling, 0.0, t, limit=400, epsrel=1e-11)[0]
        assert phase_integral(params, t) == pytest.approx(direct, rel=1e-8)


class TestDimerPopulations:
    """Tests for the closed-form populations."""

    def test_start(self):
        assert dimer_populations(DimerParams(), 0.0) == (1.0, 0.0)

    def test_rabi_transfer(self):
        params = DimerParams(a=0.0, gamma1=0.0, gamma2=0.0, gamma_sink=0.0)
        p1, p2 = dimer_populations(params, math.pi / 2)
        assert p1 == pytest.approx(0.0, abs=1e-12)
        assert p2 == pytest.approx(1.0)

    def test_total_decays_uniformly(self):
        params = DimerParams()
        for t in (0.3, 1.7, 5.0):
            p1, p2 = dimer_populations(params, t)
            assert p1 + p2 == pytest.approx(math.exp(-2 * params.gamma * t), rel=1e-12)


class TestAnalyticSinkPopulation:
    """Tests for the integrated sink population."""

    def test_start(self):
        assert analytic_sink_population(DimerParams(), 0.0) == 0.0

    def test_no_sink(self):
        params = DimerParams(gamma1=0.1, gamma2=0.1, gamma_sink=0.0)
        assert analytic_sink_population(params, 10.0) == 0.0

    def test_static_long_time_limit(self):
        params = DimerParams(a=0.0)
        expected = static_sink_population_gamma_condition(1.0, 0.6, 0.5)
        assert analytic_sink_population(params, 60.0) == pytest.approx(expected, rel=1e-7)

    def test_nondecreasing(self):
        params = DimerParams()
        values = [analytic_sink_population(params, t) for t in (0.5, 1.0, 2.0, 4.0)]
        assert values == sorted(values)


class TestExtremalFrequencies:
    """Tests for the extremal frequency estimates."""

    def test_first_maximum(self):
        assert extremal_frequencies(0.25, ExtremumKind.MAX, 0) == pytest.approx(4.6188, abs=1e-4)

    def test_harmonics(self):
        assert extremal_frequencies(0.25, ExtremumKind.MIN, 1) == pytest.approx(2.3094, abs=1e-4)
        assert extremal_frequencies(0.25, ExtremumKind.MAX, 1) == pytest.approx(1.5396, abs=1e-4)

    def test_no_zeroth_minimum(self):
        with pytest.raises(DomainError):
            extremal_frequencies(0.25, ExtremumKind.MIN, 0)

    def test_amplitude_domain(self):
        with pytest.raises(DomainError):
            extremal_frequencies(0.5, ExtremumKind.MAX, 0)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])

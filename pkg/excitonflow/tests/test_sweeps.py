"""Tests for the sweep engine, search helpers and grid pool."""

import math
import pickle

import numpy as np
import pytest

from excitonflow.core import sweeps
from excitonflow.core.dimer import ExtremumKind, extremal_frequencies, static_sink_population
from excitonflow.core.dynamics import ChannelSpec, IntegratorConfig, static_sink_population_numeric
from excitonflow.core.enhancement import EnhancementPoint, ReferenceKind, best_point
from excitonflow.core.errors import (
    ConfigurationError,
    DimensionMismatch,
    GridPointError,
    NoMaximumInBracket,
    NoSignChange,
    PositivityViolation,
)
from excitonflow.core.model import ChainSpec, NormalMode, PairwiseSinusoid, StaticProfile
from excitonflow.core.parallel import labelled, map_grid
from excitonflow.core.sweeps import (
    FrequencyAxis,
    Scenario,
    amplitude_scan,
    breathing_scenario,
    chain_length_scan,
    critical_dephasing_rate,
    dephasing_scan,
    frequency_sweep,
    optimal_frequency,
    optimal_pulse,
    optimal_pulse_speed,
    phase_ensemble,
    phase_grid,
    pulse_grid,
    static_reference,
)
from excitonflow.core.sweeps.search import (
    bracket_maximum,
    find_root,
    golden_section_max,
    uniform_grid,
)


def dimer_scenario(omega=4.54, a=0.25, phi=math.pi / 2):
    return Scenario(
        chain=ChainSpec(n_sites=2),
        motion=PairwiseSinusoid.uniform(1, a, omega, phi),
        channels=ChannelSpec.uniform(2, 0.1, 0.5),
    )


def _collapse_above_two(x):
    if x > 2:
        raise PositivityViolation("collapsed")
    return x * x


def pulse_chain(j0=1.0):
    return Scenario(
        chain=ChainSpec(n_sites=13, j0=j0),
        motion=StaticProfile(),
        channels=ChannelSpec.uniform(13, 0.1, 0.5),
    )


def _grid_only_sink(omega, *, scenario, axis):
    if abs(omega * 10 - round(omega * 10)) > 1e-6:
        raise PositivityViolation(f"off-grid frequency {omega}")
    return 1.0 - (omega - 4.5) ** 2


def _failing_baseline(*args, **kwargs):
    raise PositivityViolation("baseline collapsed")


class TestSearch:
    """Tests for grid and 1-D search helpers."""

    def test_uniform_grid(self):
        grid = uniform_grid(0.5, 20.0, 0.02)
        assert len(grid) == 976
        assert grid[0] == 0.5
        assert grid[-1] == pytest.approx(20.0)

    def test_uniform_grid_rejects_bad_step(self):
        with pytest.raises(ConfigurationError):
            uniform_grid(0.0, 1.0, 0.0)

    def test_bracket_maximum(self):
        lo, hi, best = bracket_maximum([1.0, 2.0, 3.0, 4.0], [0.1, 0.5, 0.3, 0.2])
        assert (lo, hi, best) == (1.0, 3.0, 1)

    def test_bracket_maximum_at_edge(self):
        with pytest.raises(NoMaximumInBracket):
            bracket_maximum([1.0, 2.0, 3.0], [0.1, 0.2, 0.3])

    def test_golden_section(self):
        x, fx = golden_section_max(lambda x: -(x - 2.0) ** 2, 0.0, 5.0)
        assert x == pytest.approx(2.0, abs=1e-2)
        assert fx == pytest.approx(0.0, abs=1e-4)

    def test_find_root(self):
        assert find_root(lambda x: x - 1.0, 0.0, 3.0) == pytest.approx(1.0, abs=1e-4)

    def test_no_sign_change(self):
        with pytest.raises(NoSignChange):
            find_root(lambda x: x * x + 1.0, -1.0, 1.0)


class TestMapGrid:
    """Tests for the grid pool."""

    def test_order_preserved(self):
        assert map_grid(abs, [-3, 2, -1]) == [3, 2, 1]

    def test_failure_names_point(self):
        with pytest.raises(GridPointError) as info:
            map_grid(_collapse_above_two, [1.0, 2.0, 3.0], label="omega")
        assert info.value.label == "omega"
        assert info.value.value == 3.0
        assert isinstance(info.value.cause, PositivityViolation)

    def test_failure_survives_pickling(self):
        err = GridPointError("omega", 1.5, PositivityViolation("collapsed"))
        copy = pickle.loads(pickle.dumps(err))
        assert (copy.label, copy.value) == ("omega", 1.5)

    def test_workers_do_not_change_results(self):
        values = [0.5, 1.0, 1.5, 2.0]
        assert map_grid(_collapse_above_two, values, workers=2) == map_grid(_collapse_above_two, values)

    def test_labelled_names_argument(self):
        job = labelled(_collapse_above_two, "omega")
        assert job(1.5) == 2.25
        with pytest.raises(GridPointError) as info:
            job(2.5)
        assert (info.value.label, info.value.value) == ("omega", 2.5)

    def test_inner_label_kept_under_outer(self):
        inner = labelled(_collapse_above_two, "baseline")
        with pytest.raises(GridPointError) as info:
            map_grid(inner, [3.0], label="gamma_deph")
        assert info.value.label == "gamma_deph"
        assert isinstance(info.value.cause, GridPointError)
        assert info.value.cause.label == "baseline"


class TestEnhancementPoint:
    """Tests for EnhancementPoint."""

    def test_delta_and_gain(self):
        point = EnhancementPoint(1.0, 0.75, 0.5, ReferenceKind.J_MAX)
        assert point.delta == 0.25
        assert point.gain_ratio == 1.5
        assert point.to_dict()["baseline_kind"] == "j_max"

    def test_best_point(self):
        points = [EnhancementPoint(w, p, 0.5, ReferenceKind.J0) for w, p in [(1, 0.4), (2, 0.7), (3, 0.7)]]
        assert best_point(points).param == 2


class TestScenario:
    """Tests for Scenario validation."""

    def test_initial_site(self):
        with pytest.raises(ConfigurationError):
            Scenario(ChainSpec(n_sites=2), StaticProfile(), ChannelSpec.uniform(2, 0.1, 0.5), initial_site=0)

    def test_channel_mismatch(self):
        with pytest.raises(DimensionMismatch):
            Scenario(ChainSpec(n_sites=3), StaticProfile(), ChannelSpec.uniform(2, 0.1, 0.5))

    def test_mode_axis(self):
        motion = NormalMode.single(5, 2, 0.05, "confined")
        scenario = Scenario(ChainSpec(n_sites=5), motion, ChannelSpec.uniform(5, 0.1, 0.5))
        tuned = scenario.with_frequency(1.3, FrequencyAxis.MODE)
        assert tuned.motion.mode_frequencies()[1] == pytest.approx(1.3)
        assert scenario.with_frequency(1.3).motion.omega0 == 1.3


class TestStaticReference:
    """Tests for the static baselines."""

    def test_dimer_closed_form(self):
        scenario = dimer_scenario()
        assert static_reference(scenario, ReferenceKind.J_MAX) == static_sink_population(8.0, 0.1, 0.5)
        assert static_reference(scenario, ReferenceKind.J0) == static_sink_population(1.0, 0.1, 0.5)

    def test_closed_form_matches_propagation(self):
        numeric = static_sink_population_numeric(
            ChainSpec(n_sites=2), 8.0, ChannelSpec.uniform(2, 0.1, 0.5), IntegratorConfig()
        )
        assert numeric == pytest.approx(static_sink_population(8.0, 0.1, 0.5), abs=1e-6)

    def test_failure_names_baseline(self, monkeypatch):
        monkeypatch.setattr(sweeps, "static_sink_population_numeric", _failing_baseline)
        scenario = Scenario(ChainSpec(n_sites=3), StaticProfile(), ChannelSpec.uniform(3, 0.1, 0.5))
        with pytest.raises(GridPointError) as info:
            static_reference(scenario, ReferenceKind.J_MAX)
        assert (info.value.label, info.value.value) == ("baseline", "j_max")
        assert isinstance(info.value.cause, PositivityViolation)


class TestFrequencySweep:
    """Tests for frequency sweeps and the phase ensemble."""

    def test_sweep_shape_and_baseline(self):
        scenario = dimer_scenario()
        points = frequency_sweep(scenario, [1.0, 2.0, 4.54])
        assert [p.param for p in points] == [1.0, 2.0, 4.54]
        assert len({p.p_static_ref for p in points}) == 1
        assert all(0.0 <= p.p_sink <= 1.0 for p in points)
        assert points[-1].delta > 0.0

    def test_rejects_unsorted_grid(self):
        with pytest.raises(ConfigurationError):
            frequency_sweep(dimer_scenario(), [2.0, 1.0])

    def test_worker_count_does_not_change_results(self):
        scenario = dimer_scenario()
        serial = frequency_sweep(scenario, [3.0, 4.0, 5.0], workers=1)
        pooled = frequency_sweep(scenario, [3.0, 4.0, 5.0], workers=2)
        assert [p.p_sink for p in serial] == [p.p_sink for p in pooled]

    def test_phase_grid(self):
        np.testing.assert_allclose(phase_grid(4), [0.0, math.pi / 2, math.pi, 3 * math.pi / 2])
        with pytest.raises(ConfigurationError):
            phase_grid(0)

    def test_single_phase_reproduces_sweep(self):
        scenario = dimer_scenario()
        grid = [2.0, 4.54]
        ensemble = phase_ensemble(scenario, grid, 1, phase_offset=math.pi / 2)
        sweep = frequency_sweep(scenario, grid)
        np.testing.assert_array_equal(ensemble.mean, [p.p_sink for p in sweep])

    def test_envelope_ordering(self):
        ensemble = phase_ensemble(dimer_scenario(), [2.0, 4.54], 4)
        assert ensemble.curves.shape == (4, 2)
        assert np.all(ensemble.envelope_min <= ensemble.mean)
        assert np.all(ensemble.mean <= ensemble.envelope_max)
        assert len(list(ensemble.rows())) == 2


class TestDephasing:
    """Tests for dephasing scans."""

    def test_scan_starts_at_plain_sweep(self):
        scenario = dimer_scenario()
        points = dephasing_scan(scenario, [0.0, 0.5])
        plain = frequency_sweep(scenario, [4.54])[0]
        assert points[0].p_sink == plain.p_sink
        assert points[0].p_static_ref == plain.p_static_ref
        assert [p.param for p in points] == [0.0, 0.5]

    def test_baseline_failure_names_rate(self, monkeypatch):
        monkeypatch.setattr(sweeps, "static_sink_population_numeric", _failing_baseline)
        scenario = Scenario(ChainSpec(n_sites=3), StaticProfile(), ChannelSpec.uniform(3, 0.1, 0.5))
        with pytest.raises(GridPointError) as info:
            dephasing_scan(scenario, [0.2])
        assert (info.value.label, info.value.value) == ("gamma_deph", 0.2)
        assert info.value.cause.label == "baseline"

    @pytest.mark.slow
    def test_enhancement_over_resting_chain_survives_strong_dephasing(self):
        template = Scenario(ChainSpec(n_sites=4), StaticProfile(), ChannelSpec.uniform(4, 0.1, 0.5))
        scenario = breathing_scenario(template, 4, 4 / 48).with_frequency(1.5, FrequencyAxis.MODE)
        point = dephasing_scan(scenario, [1.0], ReferenceKind.J0)[0]
        assert point.delta > 0.0

    @pytest.mark.slow
    def test_critical_rate_extinguishes_enhancement(self):
        scenario = dimer_scenario()
        gamma_c = critical_dephasing_rate(scenario)
        assert 0.0 < gamma_c < 10.0
        dephased = scenario.with_dephasing(gamma_c)
        delta = dephased.sink_population() - static_reference(dephased, ReferenceKind.J_MAX)
        assert abs(delta) < 1e-3


class TestOptima:
    """Tests for optimum refinement."""

    @pytest.mark.slow
    def test_dimer_optimum(self):
        point = optimal_frequency(dimer_scenario(), (3.5, 5.5), step=0.1)
        assert point.param == pytest.approx(4.54, abs=0.05)
        assert point.delta >= 0.01
        estimate = extremal_frequencies(0.25, ExtremumKind.MAX, 0)
        assert abs(point.param - estimate) / estimate < 0.05

    def test_refinement_failure_names_frequency(self, monkeypatch):
        monkeypatch.setattr(sweeps, "_sink_at_frequency", _grid_only_sink)
        with pytest.raises(GridPointError) as info:
            optimal_frequency(dimer_scenario(), (4.0, 5.0), step=0.1)
        assert info.value.label == "omega"
        assert 4.4 <= info.value.value <= 4.6
        assert isinstance(info.value.cause, PositivityViolation)

    @pytest.mark.slow
    def test_optimum_insensitive_to_coarse_step(self):
        coarse = optimal_frequency(dimer_scenario(), (3.5, 5.5), step=0.1)
        fine = optimal_frequency(dimer_scenario(), (3.5, 5.5), step=0.05)
        assert abs(coarse.param - fine.param) < 1e-2

    @pytest.mark.slow
    def test_small_amplitude_enhancement_is_algebraic(self):
        points = amplitude_scan(dimer_scenario(), [0.05, 0.1, 0.2], (1.0, 5.0), step=0.1)
        assert all(p.delta > 0.0 for p in points)
        log_a = np.log([p.param for p in points])
        log_delta = np.log([p.delta for p in points])
        slopes = np.diff(log_delta) / np.diff(log_a)
        assert np.all((slopes > 1.0) & (slopes < 4.0))
        assert abs(slopes[1] - slopes[0]) < 1.0


@pytest.mark.slow
class TestDimerRegimes:
    """Asymptotic and extremal behaviour of the driven dimer."""

    def test_fast_drive_reaches_average_coupling(self):
        scenario = dimer_scenario(omega=100.0)
        baseline = static_reference(scenario, ReferenceKind.J_AVG)
        assert scenario.sink_population() == pytest.approx(baseline, rel=0.02)

    def test_phase_ensemble_limits(self):
        scenario = dimer_scenario()
        ensemble = phase_ensemble(scenario, [0.1, 0.5, 50.0, 100.0], 16)
        j0_baseline = static_reference(scenario, ReferenceKind.J0)
        avg_baseline = static_reference(scenario, ReferenceKind.J_AVG)
        assert np.all(ensemble.mean[:2] < j0_baseline)
        assert ensemble.mean[2] < avg_baseline
        assert ensemble.mean[3] <= avg_baseline + 1e-6
        assert ensemble.mean[3] == pytest.approx(avg_baseline, rel=0.02)

    @pytest.mark.parametrize(
        "kind,m",
        [(ExtremumKind.MAX, 0), (ExtremumKind.MAX, 1), (ExtremumKind.MAX, 2),
         (ExtremumKind.MIN, 1), (ExtremumKind.MIN, 2)],
    )
    def test_sweep_extrema_near_estimates(self, kind, m):
        estimate = extremal_frequencies(0.25, kind, m)
        grid = np.linspace(0.85 * estimate, 1.15 * estimate, 31)
        sinks = [p.p_sink for p in frequency_sweep(dimer_scenario(), grid)]
        k = int(np.argmax(sinks)) if kind is ExtremumKind.MAX else int(np.argmin(sinks))
        assert 0 < k < len(grid) - 1
        assert abs(grid[k] - estimate) / estimate < 0.05


@pytest.mark.slow
class TestChainTrends:
    """Breathing-mode trends over chain length."""

    def test_optimum_and_critical_rate_fall_with_length(self):
        template = Scenario(ChainSpec(n_sites=4), StaticProfile(), ChannelSpec.uniform(4, 0.1, 0.5))
        points = chain_length_scan(template, [4, 7, 10, 13], bracket=(0.2, 2.5), step=0.05)
        omegas = [p.omega_opt for p in points]
        assert omegas == pytest.approx([1.51, 0.97, 0.65, 0.50], abs=0.05)
        assert all(b <= a + 1e-3 for a, b in zip(omegas, omegas[1:]))

        rates = []
        for p in points:
            if p.delta_opt <= 0.0:
                continue
            at_opt = breathing_scenario(template, p.n_sites, p.amplitude).with_frequency(
                p.omega_opt, FrequencyAxis.MODE
            )
            rates.append(critical_dephasing_rate(at_opt))
        assert len(rates) >= 2
        assert all(b <= a + 1e-3 for a, b in zip(rates, rates[1:]))


class TestChainScans:
    """Tests for chain-length and pulse scans."""

    def test_breathing_scenario(self):
        template = dimer_scenario()
        scenario = breathing_scenario(template, 6, 6 / 48)
        assert scenario.chain.n_sites == 6
        assert scenario.motion.active_modes == (1,)
        assert scenario.channels.gamma_n == (0.1,) * 6

    @pytest.mark.slow
    def test_resting_pulse_underperforms_uniform_chain(self):
        scenario = Scenario(
            chain=ChainSpec(n_sites=13),
            motion=StaticProfile(),
            channels=ChannelSpec.uniform(13, 0.1, 0.5),
        )
        surface = pulse_grid(scenario, 1 / 6, [0.0], [1.0])
        assert surface.p_sink[0, 0] < static_reference(scenario, ReferenceKind.J0)


@pytest.mark.slow
class TestPulseOptima:
    """Guided-pulse optima on the 13-site chain."""

    def test_optimal_speed_at_unit_width(self):
        point = optimal_pulse_speed(pulse_chain(), 1 / 6, 1.0)
        assert point.param == pytest.approx(2.53, abs=0.05)

    def test_optimal_speed_scales_with_coupling(self):
        slow = optimal_pulse_speed(pulse_chain(), 1 / 6, 1.0)
        fast = optimal_pulse_speed(pulse_chain(j0=2.0), 1 / 6, 1.0, v_bracket=(0.0, 8.0), step=0.5)
        assert fast.param / slow.param == pytest.approx(2.0, rel=0.1)

    def test_refined_optimum(self):
        scenario = pulse_chain()
        surface = pulse_grid(scenario, 1 / 6, [2.5, 3.0, 3.5, 4.0], [3.5, 4.0, 4.5, 5.0])
        assert surface.p_static_ref == pytest.approx(0.2601, abs=1e-3)
        best = optimal_pulse(scenario, surface, rounds=4)
        assert best.v == pytest.approx(3.34, abs=0.1)
        assert best.sigma == pytest.approx(4.20, abs=0.2)
        assert best.delta > 0.03


if __name__ == "__main__":
    pytest.main([__file__, "-v"])

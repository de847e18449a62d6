"""
ExcitonFlow Sweep Engine

Experiment harness around the propagator: frequency, phase, amplitude,
chain-length, dephasing and pulse scans, static baselines, optimum
refinement and critical dephasing rates.

Features:
- Scenario bundles everything one propagation needs
- Baselines at the maximal, time-averaged or resting couplings
- Deterministic grids evaluated on an order-preserving worker pool
- Golden-section refinement of coarse-grid optima
- Bisection for the dephasing rate where the enhancement vanishes
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import partial
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from excitonflow.core.dimer import static_sink_population
from excitonflow.core.dynamics import (
    ChannelSpec,
    IntegratorConfig,
    TransferRecord,
    propagate,
    static_sink_population_numeric,
)
from excitonflow.core.enhancement import EnhancementPoint, ReferenceKind, best_point
from excitonflow.core.errors import ConfigurationError
from excitonflow.core.model import (
    Boundary,
    ChainSpec,
    GaussianPulse,
    MotionProfile,
    NormalMode,
    VibronicCoupling,
    average_coupling_scales,
    max_coupling_scales,
)
from excitonflow.core.parallel import labelled, map_grid
from excitonflow.core.sweeps.search import (
    bracket_maximum,
    find_root,
    golden_section_max,
    uniform_grid,
)

logger = logging.getLogger(__name__)

DEFAULT_GAMMA_MAX = 10.0
DEFAULT_ROOT_TOL = 1e-4
DEFAULT_REL_TOL = 1e-3


class FrequencyAxis(str, Enum):
    """What a swept frequency sets: the drive (omega / omega0) or the lowest active mode."""
    DRIVE = "drive"
    MODE = "mode"


@dataclass(frozen=True)
class Scenario:
    """Everything one propagation needs."""
    chain: ChainSpec
    motion: MotionProfile
    channels: ChannelSpec
    vibronic: VibronicCoupling = field(default_factory=VibronicCoupling)
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    initial_site: int = 1

    def __post_init__(self):
        self.motion.check(self.chain)
        self.channels.check(self.chain.n_sites)
        if not 1 <= self.initial_site <= self.chain.n_sites:
            raise ConfigurationError(
                f"initial site {self.initial_site} outside 1..{self.chain.n_sites}"
            )

    def with_motion(self, motion: MotionProfile) -> "Scenario":
        return replace(self, motion=motion)

    def with_dephasing(self, gamma_deph: float) -> "Scenario":
        return replace(self, channels=self.channels.with_dephasing(gamma_deph))

    def with_frequency(self, omega: float, axis: FrequencyAxis = FrequencyAxis.DRIVE) -> "Scenario":
        motion = self.motion
        if axis is FrequencyAxis.MODE and isinstance(motion, NormalMode):
            active = motion.active_modes
            if not active:
                raise ConfigurationError("no active normal mode to tune")
            return self.with_motion(motion.with_mode_frequency(active[0], omega))
        return self.with_motion(motion.with_frequency(omega))

    def propagate(self, **kwargs: Any) -> TransferRecord:
        return propagate(
            self.chain, self.motion, self.vibronic, self.channels,
            self.integrator, self.initial_site, **kwargs,
        )

    def sink_population(self) -> float:
        return self.propagate().asymptotic_sink

    def to_dict(self) -> Dict[str, Any]:
        return {
            "chain": self.chain.to_dict(),
            "motion": self.motion.to_dict(),
            "channels": self.channels.to_dict(),
            "vibronic": self.vibronic.to_dict(),
            "integrator": self.integrator.to_dict(),
            "initial_site": self.initial_site,
        }


# Baselines

def reference_scales(scenario: Scenario, kind: ReferenceKind) -> np.ndarray:
    """Per-bond J / J0 of the static reference chain."""
    kind = ReferenceKind(kind)
    if kind is ReferenceKind.J0:
        return np.ones(scenario.chain.n_bonds)
    if kind is ReferenceKind.J_MAX:
        return max_coupling_scales(scenario.motion, scenario.chain)
    return average_coupling_scales(scenario.motion, scenario.chain)


def static_reference(scenario: Scenario, kind: ReferenceKind) -> float:
    """
    Asymptotic sink population of the resting chain at the reference
    couplings, with the scenario's channels (dephasing included).

    A numerical failure is reported as GridPointError labelled "baseline".
    """
    kind = ReferenceKind(kind)
    return labelled(partial(_reference_population, scenario=scenario), "baseline")(kind.value)


def _reference_population(kind: str, *, scenario: Scenario) -> float:
    scales = reference_scales(scenario, ReferenceKind(kind))
    chain, ch = scenario.chain, scenario.channels
    closed_form = (
        chain.n_sites == 2
        and scenario.initial_site == 1
        and ch.gamma_n[0] == ch.gamma_n[1]
        and chain.site_energies[0] == chain.site_energies[1]
        and ch.gamma_deph == 0.0
        and 2.0 * ch.gamma_n[0] + ch.gamma_sink > 0.0
    )
    if closed_form:
        return static_sink_population(chain.j0 * float(scales[0]), ch.gamma_n[0], ch.gamma_sink)
    scale = float(scales[0]) if np.all(scales == scales[0]) else tuple(scales)
    return static_sink_population_numeric(chain, scale, ch, scenario.integrator, scenario.initial_site)


# Grid jobs (module level so worker processes can unpickle them)

def _sink_at_frequency(omega: float, *, scenario: Scenario, axis: FrequencyAxis) -> float:
    return scenario.with_frequency(omega, axis).sink_population()


def _sink_at_phase_frequency(point: Tuple[float, float], *, scenario: Scenario, axis: FrequencyAxis) -> float:
    phi, omega = point
    moving = scenario.with_motion(scenario.motion.with_phase(phi))
    return moving.with_frequency(omega, axis).sink_population()


def _dephasing_point(gamma: float, *, scenario: Scenario, reference: ReferenceKind) -> Tuple[float, float]:
    dephased = scenario.with_dephasing(gamma)
    return dephased.sink_population(), static_reference(dephased, reference)


def _pulse_point(point: Tuple[float, float], *, scenario: Scenario, strength: float) -> float:
    speed, width = point
    pulse = GaussianPulse(strength=strength, width=width, speed=speed)
    return scenario.with_motion(pulse).sink_population()


def _check_grid(grid: Sequence[float], name: str) -> List[float]:
    values = [float(x) for x in grid]
    if not values:
        raise ConfigurationError(f"{name} grid is empty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigurationError(f"{name} grid must be strictly increasing")
    return values


# Frequency and phase sweeps

def frequency_sweep(
    scenario: Scenario,
    omega_grid: Sequence[float],
    reference: ReferenceKind = ReferenceKind.J_MAX,
    axis: FrequencyAxis = FrequencyAxis.DRIVE,
    workers: int = 1,
) -> List[EnhancementPoint]:
    """One propagation per frequency, compared with a single static baseline."""
    reference = ReferenceKind(reference)
    omegas = _check_grid(omega_grid, "omega")
    baseline = static_reference(scenario, reference)
    logger.info(
        "frequency sweep: %d points, %s baseline %.6f, %d worker(s)",
        len(omegas), reference.value, baseline, workers,
    )
    job = partial(_sink_at_frequency, scenario=scenario, axis=FrequencyAxis(axis))
    sinks = map_grid(job, omegas, workers, label="omega")
    return [
        EnhancementPoint(param=w, p_sink=p, p_static_ref=baseline, baseline_kind=reference)
        for w, p in zip(omegas, sinks)
    ]


@dataclass(frozen=True)
class PhaseEnsemble:
    """Sink populations over a phase grid (rows) and a frequency grid (columns)."""
    omegas: np.ndarray
    phases: np.ndarray
    curves: np.ndarray

    @property
    def envelope_min(self) -> np.ndarray:
        return self.curves.min(axis=0)

    @property
    def envelope_max(self) -> np.ndarray:
        return self.curves.max(axis=0)

    @property
    def mean(self) -> np.ndarray:
        return self.curves.mean(axis=0)

    def rows(self) -> Iterator[Tuple[float, float, float, float]]:
        """(omega, mean, env_min, env_max) per frequency."""
        for row in zip(self.omegas, self.mean, self.envelope_min, self.envelope_max):
            yield tuple(float(x) for x in row)


def phase_grid(n_phases: int, phase_offset: float = 0.0) -> np.ndarray:
    """phi_k = offset + 2 pi k / n for k = 0..n-1."""
    if int(n_phases) != n_phases or n_phases < 1:
        raise ConfigurationError(f"n_phases must be a positive integer, got {n_phases}")
    return phase_offset + 2.0 * np.pi * np.arange(n_phases) / n_phases


def phase_ensemble(
    scenario: Scenario,
    omega_grid: Sequence[float],
    n_phases: int,
    phase_offset: float = 0.0,
    axis: FrequencyAxis = FrequencyAxis.DRIVE,
    workers: int = 1,
) -> PhaseEnsemble:
    """
    Frequency sweeps over a uniform phase grid. A single phase with
    offset phi reproduces the plain sweep at phi.
    """
    omegas = _check_grid(omega_grid, "omega")
    phases = phase_grid(n_phases, phase_offset)
    points = [(float(phi), w) for phi in phases for w in omegas]
    logger.info("phase ensemble: %d phases x %d frequencies", len(phases), len(omegas))
    job = partial(_sink_at_phase_frequency, scenario=scenario, axis=FrequencyAxis(axis))
    sinks = map_grid(job, points, workers, label="phi,omega")
    curves = np.array(sinks).reshape(len(phases), len(omegas))
    return PhaseEnsemble(omegas=np.array(omegas), phases=phases, curves=curves)


# Optima

def optimal_frequency(
    scenario: Scenario,
    bracket: Tuple[float, float],
    reference: ReferenceKind = ReferenceKind.J_MAX,
    step: float = 0.1,
    axis: FrequencyAxis = FrequencyAxis.DRIVE,
    rel_tol: float = DEFAULT_REL_TOL,
    workers: int = 1,
) -> EnhancementPoint:
    """
    Coarse sweep over the bracket, then golden-section refinement between
    the neighbours of the coarse maximum.
    """
    reference = ReferenceKind(reference)
    coarse = frequency_sweep(scenario, uniform_grid(bracket[0], bracket[1], step), reference, axis, workers)
    lo, hi, _ = bracket_maximum([p.param for p in coarse], [p.p_sink for p in coarse])
    job = partial(_sink_at_frequency, scenario=scenario, axis=FrequencyAxis(axis))
    omega_opt, p_opt = golden_section_max(labelled(job, "omega"), lo, hi, rel_tol)
    best = best_point(coarse)
    if best.p_sink > p_opt:
        omega_opt, p_opt = best.param, best.p_sink
    point = EnhancementPoint(
        param=omega_opt, p_sink=p_opt, p_static_ref=coarse[0].p_static_ref, baseline_kind=reference,
    )
    logger.info("optimal frequency %.6g: P_sink=%.6f delta=%.6f", omega_opt, p_opt, point.delta)
    return point


@dataclass(frozen=True)
class OptimumPoint:
    """Optimum over frequency for one value of an outer parameter."""
    param: float
    omega_opt: float
    p_sink: float
    p_static_ref: float
    baseline_kind: ReferenceKind

    @property
    def delta(self) -> float:
        return self.p_sink - self.p_static_ref

    def to_dict(self) -> Dict[str, Any]:
        return {
            "param": self.param,
            "omega_opt": self.omega_opt,
            "p_sink": self.p_sink,
            "baseline_kind": self.baseline_kind.value,
            "baseline_value": self.p_static_ref,
            "delta": self.delta,
        }


def amplitude_scan(
    scenario: Scenario,
    amplitudes: Sequence[float],
    bracket: Tuple[float, float],
    step: float = 0.1,
    reference: ReferenceKind = ReferenceKind.J_MAX,
    axis: FrequencyAxis = FrequencyAxis.DRIVE,
    workers: int = 1,
) -> List[OptimumPoint]:
    """Optimal frequency and enhancement per motion amplitude."""
    results = []
    for a in _check_grid(amplitudes, "amplitude"):
        scaled = scenario.with_motion(scenario.motion.with_amplitude(a))
        opt = optimal_frequency(scaled, bracket, reference, step, axis, workers=workers)
        results.append(OptimumPoint(a, opt.param, opt.p_sink, opt.p_static_ref, opt.baseline_kind))
    return results


def critical_dephasing_rate(
    scenario: Scenario,
    reference: ReferenceKind = ReferenceKind.J_MAX,
    gamma_max: float = DEFAULT_GAMMA_MAX,
    xtol: float = DEFAULT_ROOT_TOL,
) -> float:
    """
    Dephasing rate where the enhancement at the scenario's fixed frequency
    drops to zero. Moving and static runs share the dephasing rate.
    """
    reference = ReferenceKind(reference)

    def enhancement(gamma: float) -> float:
        dephased = scenario.with_dephasing(gamma)
        return dephased.sink_population() - static_reference(dephased, reference)

    delta = labelled(enhancement, "gamma_deph")

    undephased = delta(0.0)
    if undephased <= 0.0:
        raise ConfigurationError(
            f"no enhancement without dephasing (delta={undephased:.3g}); nothing to extinguish"
        )
    gamma_c = find_root(delta, 0.0, gamma_max, xtol)
    logger.info("critical dephasing rate %.6g (delta at 0: %.6f)", gamma_c, undephased)
    return gamma_c


def dephasing_scan(
    scenario: Scenario,
    gamma_grid: Sequence[float],
    reference: ReferenceKind = ReferenceKind.J_MAX,
    workers: int = 1,
) -> List[EnhancementPoint]:
    """Enhancement versus dephasing rate, each static baseline dephased alike."""
    reference = ReferenceKind(reference)
    gammas = _check_grid(gamma_grid, "gamma")
    job = partial(_dephasing_point, scenario=scenario, reference=reference)
    pairs = map_grid(job, gammas, workers, label="gamma_deph")
    return [
        EnhancementPoint(param=g, p_sink=p, p_static_ref=ref, baseline_kind=reference)
        for g, (p, ref) in zip(gammas, pairs)
    ]


@dataclass(frozen=True)
class ChainLengthPoint:
    n_sites: int
    amplitude: float
    omega_opt: float
    delta_opt: float
    gamma_c: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_sites": self.n_sites,
            "amplitude": self.amplitude,
            "omega_opt": self.omega_opt,
            "delta_opt": self.delta_opt,
            "gamma_c": self.gamma_c,
        }


def breathing_scenario(template: Scenario, n_sites: int, amplitude: float) -> Scenario:
    """Open chain of n_sites driven in its lowest mode, with the template's rates and energies."""
    chain = ChainSpec.uniform(
        n_sites, template.chain.site_energies[0], template.chain.d0, template.chain.j0
    )
    omega0 = template.motion.omega0 if isinstance(template.motion, NormalMode) else 1.0
    motion = NormalMode.single(n_sites, 1, amplitude, Boundary.OPEN, omega0, 0.0)
    ch = template.channels
    channels = ChannelSpec.uniform(n_sites, ch.gamma_n[0], ch.gamma_sink, ch.gamma_deph)
    return Scenario(chain, motion, channels, template.vibronic, template.integrator)


def chain_length_scan(
    template: Scenario,
    n_values: Sequence[int],
    a_per_site: float = 1.0 / 48.0,
    bracket: Tuple[float, float] = (0.05, 3.0),
    step: float = 0.05,
    reference: ReferenceKind = ReferenceKind.J_MAX,
    critical: bool = False,
    workers: int = 1,
) -> List[ChainLengthPoint]:
    """
    Breathing-mode optimum per chain length with amplitude n * a_per_site,
    optionally with the critical dephasing rate at that optimum.
    """
    results = []
    for n in n_values:
        amplitude = n * a_per_site
        scenario = breathing_scenario(template, int(n), amplitude)
        opt = optimal_frequency(scenario, bracket, reference, step, FrequencyAxis.MODE, workers=workers)
        gamma_c = None
        if critical:
            at_opt = scenario.with_frequency(opt.param, FrequencyAxis.MODE)
            gamma_c = critical_dephasing_rate(at_opt, reference)
        results.append(ChainLengthPoint(int(n), amplitude, opt.param, opt.delta, gamma_c))
        logger.info("N=%d: omega_opt=%.6g delta=%.6f", n, opt.param, opt.delta)
    return results


# Guided pulses

@dataclass(frozen=True)
class PulseSurface:
    """Sink population over (speed, width) with its uniform static baseline."""
    v_grid: np.ndarray
    sigma_grid: np.ndarray
    p_sink: np.ndarray
    p_static_ref: float
    strength: float

    @property
    def delta(self) -> np.ndarray:
        return self.p_sink - self.p_static_ref

    def best(self) -> Tuple[int, int]:
        """Grid indices of the largest sink population."""
        i, j = np.unravel_index(int(np.argmax(self.p_sink)), self.p_sink.shape)
        return int(i), int(j)

    def rows(self) -> Iterator[Tuple[float, float, float, float, float]]:
        """(v, sigma, p_sink, baseline_value, delta), speed-major."""
        for i, v in enumerate(self.v_grid):
            for j, s in enumerate(self.sigma_grid):
                p = float(self.p_sink[i, j])
                yield float(v), float(s), p, self.p_static_ref, p - self.p_static_ref


def _pulse_scenario(scenario: Scenario, strength: float) -> Scenario:
    return scenario.with_motion(GaussianPulse(strength=strength, width=1.0, speed=0.0))


def pulse_grid(
    scenario: Scenario,
    strength: float,
    v_grid: Sequence[float],
    sigma_grid: Sequence[float],
    workers: int = 1,
) -> PulseSurface:
    """Sink population per (v, sigma) against the uniform chain at J0 / (1 - A)^3."""
    vs = _check_grid(v_grid, "v")
    sigmas = _check_grid(sigma_grid, "sigma")
    base = _pulse_scenario(scenario, strength)
    baseline = static_reference(base, ReferenceKind.J_MAX)
    points = [(v, s) for v in vs for s in sigmas]
    logger.info("pulse grid: %d x %d points, baseline %.6f", len(vs), len(sigmas), baseline)
    job = partial(_pulse_point, scenario=base, strength=strength)
    sinks = map_grid(job, points, workers, label="v,sigma")
    return PulseSurface(
        v_grid=np.array(vs),
        sigma_grid=np.array(sigmas),
        p_sink=np.array(sinks).reshape(len(vs), len(sigmas)),
        p_static_ref=baseline,
        strength=strength,
    )


def optimal_pulse_speed(
    scenario: Scenario,
    strength: float,
    width: float,
    v_bracket: Tuple[float, float] = (0.0, 6.0),
    step: float = 0.25,
    reference: ReferenceKind = ReferenceKind.J_MAX,
    rel_tol: float = DEFAULT_REL_TOL,
    workers: int = 1,
) -> EnhancementPoint:
    """Golden-section optimum of the pulse speed at fixed width."""
    reference = ReferenceKind(reference)
    base = _pulse_scenario(scenario, strength)
    baseline = static_reference(base, reference)
    vs = uniform_grid(v_bracket[0], v_bracket[1], step)
    job = partial(_pulse_point, scenario=base, strength=strength)
    sinks = map_grid(job, [(v, width) for v in vs], workers, label="v,sigma")
    lo, hi, best = bracket_maximum(vs, sinks)
    at_speed = labelled(job, "v,sigma")
    v_opt, p_opt = golden_section_max(lambda v: at_speed((v, width)), lo, hi, rel_tol)
    if sinks[best] > p_opt:
        v_opt, p_opt = vs[best], sinks[best]
    logger.info("optimal pulse speed %.6g at sigma=%.6g: P_sink=%.6f", v_opt, width, p_opt)
    return EnhancementPoint(param=v_opt, p_sink=p_opt, p_static_ref=baseline, baseline_kind=reference)


@dataclass(frozen=True)
class PulseOptimum:
    v: float
    sigma: float
    p_sink: float
    p_static_ref: float

    @property
    def delta(self) -> float:
        return self.p_sink - self.p_static_ref

    def to_dict(self) -> Dict[str, Any]:
        return {
            "v": self.v,
            "sigma": self.sigma,
            "p_sink": self.p_sink,
            "baseline_value": self.p_static_ref,
            "delta": self.delta,
        }


def _axis_bracket(grid: np.ndarray, value: float, floor: float) -> Tuple[float, float]:
    spacing = float(grid[1] - grid[0]) if len(grid) > 1 else max(abs(value), 1.0)
    return max(value - spacing, floor), value + spacing


def optimal_pulse(
    scenario: Scenario,
    surface: PulseSurface,
    rounds: int = 3,
    rel_tol: float = DEFAULT_REL_TOL,
) -> PulseOptimum:
    """
    Refine the grid optimum by alternating golden-section searches over
    speed and width, one grid spacing either side of the current point.
    """
    base = _pulse_scenario(scenario, surface.strength)
    job = labelled(partial(_pulse_point, scenario=base, strength=surface.strength), "v,sigma")
    i, j = surface.best()
    v, sigma = float(surface.v_grid[i]), float(surface.sigma_grid[j])
    p = float(surface.p_sink[i, j])
    sigma_floor = float(surface.sigma_grid[0]) / 2.0

    for round_index in range(rounds):
        lo, hi = _axis_bracket(surface.v_grid, v, 0.0)
        v_new, p_new = golden_section_max(lambda x: job((x, sigma)), lo, hi, rel_tol)
        if p_new > p:
            v, p = v_new, p_new
        lo, hi = _axis_bracket(surface.sigma_grid, sigma, sigma_floor)
        s_new, p_new = golden_section_max(lambda x: job((v, x)), lo, hi, rel_tol)
        if p_new > p:
            sigma, p = s_new, p_new
        logger.info("pulse refinement round %d: v=%.6g sigma=%.6g P_sink=%.6f", round_index + 1, v, sigma, p)
    return PulseOptimum(v=v, sigma=sigma, p_sink=p, p_static_ref=surface.p_static_ref)


@dataclass(frozen=True)
class PulseDephasingPoint:
    gamma: float
    v_opt: float
    p_sink: float
    p_static_ref: float

    @property
    def delta(self) -> float:
        return self.p_sink - self.p_static_ref

    def to_dict(self) -> Dict[str, Any]:
        return {
            "gamma": self.gamma,
            "v_opt": self.v_opt,
            "p_sink": self.p_sink,
            "baseline_value": self.p_static_ref,
            "delta": self.delta,
        }


def pulse_dephasing_scan(
    scenario: Scenario,
    strength: float,
    width: float,
    gamma_grid: Sequence[float],
    v_bracket: Tuple[float, float] = (0.0, 6.0),
    step: float = 0.25,
    workers: int = 1,
) -> List[PulseDephasingPoint]:
    """Best pulse speed per dephasing rate, against the uniform J0 chain with the same dephasing."""
    results = []
    for gamma in _check_grid(gamma_grid, "gamma"):
        opt = optimal_pulse_speed(
            scenario.with_dephasing(gamma), strength, width, v_bracket, step,
            ReferenceKind.J0, workers=workers,
        )
        results.append(PulseDephasingPoint(gamma, opt.param, opt.p_sink, opt.p_static_ref))
    return results


__all__ = [
    "FrequencyAxis", "ReferenceKind", "EnhancementPoint", "Scenario",
    "reference_scales", "static_reference",
    "frequency_sweep", "PhaseEnsemble", "phase_grid", "phase_ensemble",
    "optimal_frequency", "OptimumPoint", "amplitude_scan",
    "critical_dephasing_rate", "dephasing_scan",
    "ChainLengthPoint", "breathing_scenario", "chain_length_scan",
    "PulseSurface", "pulse_grid", "optimal_pulse_speed", "PulseOptimum", "optimal_pulse",
    "PulseDephasingPoint", "pulse_dephasing_scan",
]

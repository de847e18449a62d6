"""
Experiment runners.

Each runner turns a resolved ExperimentConfig into CSV files in the output
directory and returns their paths; run_experiment adds the manifest.
"""

from __future__ import annotations

import logging
import time
from pathlib import Path
from typing import Callable, Dict, List, Tuple

from excitonflow import __version__
from excitonflow.cli import tables
from excitonflow.cli.config import (
    ExperimentConfig,
    build_scenario,
    frequency_axis,
    reference_kind,
)
from excitonflow.core.classical import classical_enhancement, propagate_classical
from excitonflow.core.errors import ConfigurationError, NotApplicable
from excitonflow.core.model import Boundary, MotionProfile, NormalMode, PairwiseSinusoid
from excitonflow.core.sweeps import (
    FrequencyAxis,
    ReferenceKind,
    Scenario,
    amplitude_scan,
    chain_length_scan,
    critical_dephasing_rate,
    dephasing_scan,
    frequency_sweep,
    optimal_pulse,
    optimal_pulse_speed,
    phase_ensemble,
    pulse_dephasing_scan,
    pulse_grid,
    static_reference,
)
from excitonflow.core.sweeps.search import uniform_grid
from excitonflow.provenance import RunManifest

logger = logging.getLogger(__name__)

ExperimentFn = Callable[[ExperimentConfig, Path], List[Path]]

_REGISTRY: Dict[str, Tuple[ExperimentFn, str]] = {}


def experiment(name: str, description: str) -> Callable[[ExperimentFn], ExperimentFn]:
    def register(fn: ExperimentFn) -> ExperimentFn:
        _REGISTRY[name] = (fn, description)
        return fn
    return register


def list_experiments() -> List[Tuple[str, str]]:
    return [(name, desc) for name, (_, desc) in _REGISTRY.items()]


def _omega_grid(cfg: ExperimentConfig) -> List[float]:
    return uniform_grid(cfg.sweep.omega_min, cfg.sweep.omega_max, cfg.sweep.omega_step)


def _bracket(cfg: ExperimentConfig) -> Tuple[float, float]:
    return cfg.sweep.omega_min, cfg.sweep.omega_max


def _baselines(scenario: Scenario, label: str = "") -> List[Tuple[str, float]]:
    rows = []
    for kind in ReferenceKind:
        try:
            rows.append((f"{kind.value}{label}", static_reference(scenario, kind)))
        except NotApplicable:
            continue
    return rows


def _drive_frequency(motion: MotionProfile) -> float:
    if isinstance(motion, PairwiseSinusoid):
        return motion.omega
    if isinstance(motion, NormalMode) and motion.active_modes:
        return float(motion.mode_frequencies()[motion.active_modes[0] - 1])
    raise NotApplicable(f"{motion.kind.value} motion has no drive frequency")


@experiment("dimer-sweep", "Sink population and enhancement versus drive frequency")
def dimer_sweep(cfg: ExperimentConfig, out: Path) -> List[Path]:
    scenario = build_scenario(cfg)
    points = frequency_sweep(
        scenario, _omega_grid(cfg), reference_kind(cfg), frequency_axis(cfg), cfg.workers
    )
    return [
        tables.write_sweep(out / "sweep.csv", points),
        tables.write_baselines(out / "baselines.csv", _baselines(scenario)),
    ]


@experiment("dimer-phase-ensemble", "Envelope and mean over a uniform grid of drive phases")
def dimer_phase_ensemble(cfg: ExperimentConfig, out: Path) -> List[Path]:
    scenario = build_scenario(cfg)
    ensemble = phase_ensemble(
        scenario, _omega_grid(cfg), cfg.sweep.n_phases, cfg.sweep.phase_offset,
        frequency_axis(cfg), cfg.workers,
    )
    return [
        tables.write_ensemble(out / "ensemble.csv", ensemble),
        tables.write_baselines(out / "baselines.csv", _baselines(scenario)),
    ]


@experiment("dimer-amplitude", "Optimal frequency and enhancement versus amplitude")
def dimer_amplitude(cfg: ExperimentConfig, out: Path) -> List[Path]:
    points = amplitude_scan(
        build_scenario(cfg), cfg.sweep.amplitudes, _bracket(cfg), cfg.sweep.opt_step,
        reference_kind(cfg), frequency_axis(cfg), cfg.workers,
    )
    return [tables.write_optima(out / "amplitude.csv", points)]


@experiment("chain-modes", "Frequency sweep of single normal modes")
def chain_modes(cfg: ExperimentConfig, out: Path) -> List[Path]:
    base = build_scenario(cfg)
    m = cfg.motion
    files = []
    baselines = [(ReferenceKind.J0.value, static_reference(base, ReferenceKind.J0))]
    for q in cfg.scan.modes:
        if q > cfg.chain.n_sites:
            raise ConfigurationError(f"mode q={q} exceeds the chain length {cfg.chain.n_sites}")
        motion = NormalMode.single(cfg.chain.n_sites, q, m.a, Boundary(m.boundary), m.omega0, m.phi)
        scenario = base.with_motion(motion)
        points = frequency_sweep(
            scenario, _omega_grid(cfg), reference_kind(cfg), FrequencyAxis.MODE, cfg.workers
        )
        files.append(tables.write_sweep(out / f"mode_q{q}.csv", points))
        baselines.append(
            (f"{ReferenceKind.J_MAX.value}_q{q}", static_reference(scenario, ReferenceKind.J_MAX))
        )
    files.append(tables.write_baselines(out / "baselines.csv", baselines))
    return files


@experiment("chain-length-scan", "Breathing-mode optimum (and critical dephasing) versus chain length")
def chain_length(cfg: ExperimentConfig, out: Path) -> List[Path]:
    points = chain_length_scan(
        build_scenario(cfg), cfg.scan.n_sites, cfg.scan.a_per_site, _bracket(cfg),
        cfg.sweep.opt_step, reference_kind(cfg), cfg.scan.critical_dephasing, cfg.workers,
    )
    files = [tables.write_chain_length(out / "chain_length.csv", points)]
    if cfg.scan.critical_dephasing:
        rows = [(p.n_sites, p.omega_opt, p.gamma_c) for p in points]
        files.append(tables.write_critical(out / "critical.csv", rows))
    return files


@experiment("dephasing-scan", "Enhancement versus dephasing rate")
def dephasing(cfg: ExperimentConfig, out: Path) -> List[Path]:
    scenario = build_scenario(cfg)
    reference = reference_kind(cfg)
    points = dephasing_scan(scenario, cfg.scan.gamma_grid, reference, cfg.workers)
    files = [tables.write_sweep(out / "dephasing.csv", points)]
    if cfg.scan.critical_dephasing:
        gamma_c = critical_dephasing_rate(scenario, reference, cfg.scan.gamma_max)
        rows = [(cfg.chain.n_sites, _drive_frequency(scenario.motion), gamma_c)]
        files.append(tables.write_critical(out / "critical.csv", rows))
    return files


@experiment("pulse-grid", "Guided-pulse enhancement over speed and width")
def pulse_surface(cfg: ExperimentConfig, out: Path) -> List[Path]:
    scenario = build_scenario(cfg)
    p = cfg.pulse
    strength = cfg.motion.strength
    surface = pulse_grid(
        scenario, strength, uniform_grid(p.v_min, p.v_max, p.v_step),
        uniform_grid(p.sigma_min, p.sigma_max, p.sigma_step), cfg.workers,
    )
    files = [tables.write_pulse_surface(out / "pulse_grid.csv", surface)]
    if p.refine:
        optimum = optimal_pulse(scenario, surface, p.rounds)
        files.append(tables.write_pulse_optimum(out / "pulse_optimum.csv", optimum))
        speed = optimal_pulse_speed(
            scenario, strength, cfg.motion.width, (p.v_min, p.v_max), p.v_step, workers=cfg.workers
        )
        files.append(tables.write_pulse_speed(out / "pulse_speed.csv", cfg.motion.width, speed))
    return files


@experiment("pulse-dephasing", "Optimal pulse speed and gain versus dephasing rate")
def pulse_dephasing(cfg: ExperimentConfig, out: Path) -> List[Path]:
    p = cfg.pulse
    points = pulse_dephasing_scan(
        build_scenario(cfg), cfg.motion.strength, cfg.motion.width, cfg.scan.gamma_grid,
        (p.v_min, p.v_max), p.v_step, cfg.workers,
    )
    return [tables.write_pulse_dephasing(out / "pulse_dephasing.csv", points)]


@experiment("classical-compare", "Quantum and classical enhancement over the same frequency grid")
def classical_compare(cfg: ExperimentConfig, out: Path) -> List[Path]:
    scenario = build_scenario(cfg)
    grid = _omega_grid(cfg)
    quantum = frequency_sweep(scenario, grid, ReferenceKind.J_MAX, FrequencyAxis.DRIVE, cfg.workers)
    classical = classical_enhancement(
        scenario.chain, scenario.motion, scenario.channels, cfg.classical.hop_scale,
        grid, scenario.integrator, scenario.initial_site, cfg.workers,
    )
    return [
        tables.write_sweep(out / "quantum.csv", quantum),
        tables.write_sweep(out / "classical.csv", classical),
    ]


@experiment("trajectory", "Populations versus time for one configuration")
def trajectory(cfg: ExperimentConfig, out: Path) -> List[Path]:
    scenario = build_scenario(cfg)
    if cfg.trajectory.model == "classical":
        record = propagate_classical(
            scenario.chain, scenario.motion, scenario.channels, cfg.classical.hop_scale,
            scenario.integrator, scenario.initial_site,
        )
    else:
        record = scenario.propagate()
    logger.info("trajectory: %s, P_sink=%.8f", record.termination.value, record.asymptotic_sink)
    return [tables.write_trajectory(out / "trajectory.csv", record)]


def output_dir(cfg: ExperimentConfig) -> Path:
    return Path(cfg.output) if cfg.output else Path("runs") / str(cfg.experiment)


def run_experiment(cfg: ExperimentConfig) -> Path:
    """Run cfg.experiment, write its CSVs and manifest.yaml; return the manifest path."""
    if cfg.experiment not in _REGISTRY:
        raise ConfigurationError(f"unknown experiment {cfg.experiment!r}")
    fn, _ = _REGISTRY[cfg.experiment]
    out = output_dir(cfg)
    out.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(experiment=cfg.experiment, config=cfg.to_flat(), version=__version__)
    started = time.perf_counter()
    logger.info("running %s into %s with %d worker(s)", cfg.experiment, out, cfg.workers)
    files = fn(cfg, out)
    manifest.wall_time_s = time.perf_counter() - started
    for path in files:
        manifest.add_output(path)
    path = manifest.write(out / "manifest.yaml")
    logger.info("%s finished in %.1f s: %d file(s)", cfg.experiment, manifest.wall_time_s, len(files))
    return path


__all__ = ["experiment", "list_experiments", "output_dir", "run_experiment"]

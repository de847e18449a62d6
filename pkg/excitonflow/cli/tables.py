"""CSV emission. Floats use 12 significant digits with no locale dependence."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Any, Iterable, List, Sequence, Tuple

import numpy as np

from excitonflow.core.dynamics import TransferRecord
from excitonflow.core.enhancement import EnhancementPoint
from excitonflow.core.sweeps import (
    ChainLengthPoint,
    OptimumPoint,
    PhaseEnsemble,
    PulseDephasingPoint,
    PulseOptimum,
    PulseSurface,
)

SWEEP_HEADER = ["param", "p_sink", "baseline_kind", "baseline_value", "delta"]
OPTIMUM_HEADER = ["param", "omega_opt", "p_sink", "baseline_kind", "baseline_value", "delta"]
PULSE_HEADER = ["v", "sigma", "p_sink", "baseline_value", "delta"]
ENSEMBLE_HEADER = ["omega", "mean", "env_min", "env_max"]
BASELINE_HEADER = ["baseline_kind", "baseline_value"]
CRITICAL_HEADER = ["n_sites", "omega", "gamma_c"]
PULSE_DEPHASING_HEADER = ["gamma", "v_opt", "p_sink", "baseline_value", "delta"]


def fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    return path


def write_trajectory(path: Path, record: TransferRecord) -> Path:
    header = ["t"] + [f"p{n}" for n in range(1, record.n_sites + 1)] + ["p_sink", "loss"]
    rows = (
        [t, *pops, sink, loss]
        for t, pops, sink, loss in zip(
            record.times, record.site_populations, record.sink_population, record.loss
        )
    )
    return write_csv(path, header, rows)


def write_sweep(path: Path, points: Sequence[EnhancementPoint]) -> Path:
    return write_csv(
        path,
        SWEEP_HEADER,
        ([p.param, p.p_sink, p.baseline_kind.value, p.p_static_ref, p.delta] for p in points),
    )


def write_optima(path: Path, points: Sequence[OptimumPoint]) -> Path:
    return write_csv(
        path,
        OPTIMUM_HEADER,
        (
            [p.param, p.omega_opt, p.p_sink, p.baseline_kind.value, p.p_static_ref, p.delta]
            for p in points
        ),
    )


def write_ensemble(path: Path, ensemble: PhaseEnsemble) -> Path:
    return write_csv(path, ENSEMBLE_HEADER, ensemble.rows())


def write_pulse_surface(path: Path, surface: PulseSurface) -> Path:
    return write_csv(path, PULSE_HEADER, surface.rows())


def write_pulse_optimum(path: Path, optimum: PulseOptimum) -> Path:
    return write_csv(
        path, PULSE_HEADER, [[optimum.v, optimum.sigma, optimum.p_sink, optimum.p_static_ref, optimum.delta]]
    )


def write_pulse_speed(path: Path, sigma: float, point: EnhancementPoint) -> Path:
    return write_csv(
        path,
        ["sigma", "v_opt", "p_sink", "baseline_value", "delta"],
        [[sigma, point.param, point.p_sink, point.p_static_ref, point.delta]],
    )


def write_pulse_dephasing(path: Path, points: Sequence[PulseDephasingPoint]) -> Path:
    return write_csv(
        path,
        PULSE_DEPHASING_HEADER,
        ([p.gamma, p.v_opt, p.p_sink, p.p_static_ref, p.delta] for p in points),
    )


def write_chain_length(path: Path, points: Sequence[ChainLengthPoint]) -> Path:
    with_critical = any(p.gamma_c is not None for p in points)
    header = ["n_sites", "amplitude", "omega_opt", "delta_opt"] + (["gamma_c"] if with_critical else [])
    rows = (
        [p.n_sites, p.amplitude, p.omega_opt, p.delta_opt] + ([p.gamma_c] if with_critical else [])
        for p in points
    )
    return write_csv(path, header, rows)


def write_critical(path: Path, rows: Sequence[Tuple[int, float, float]]) -> Path:
    return write_csv(path, CRITICAL_HEADER, rows)


def write_baselines(path: Path, baselines: List[Tuple[str, float]]) -> Path:
    return write_csv(path, BASELINE_HEADER, baselines)


__all__ = [
    "fmt", "write_csv", "write_trajectory", "write_sweep", "write_optima",
    "write_ensemble", "write_pulse_surface", "write_pulse_optimum", "write_pulse_speed",
    "write_pulse_dephasing", "write_chain_length", "write_critical", "write_baselines",
]

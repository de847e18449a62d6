"""
ExcitonFlow Dynamics Engine

Lindblad master equation for a single excitation on the chain plus a sink.
The density matrix lives on the basis {|1>..|N>, |sink>}; excitation lost to
the environment is tracked as an extra integrated variable.

Rate convention: every channel is gamma * [2 L rho L^+ - {L^+ L, rho}], so a
site with dissipation rate gamma_n loses population at 2 gamma_n and the sink
fills at 2 gamma_sink from site N. Dephasing removes coherence at 2 gamma per
involved site and leaves populations alone.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import solve_ivp

from excitonflow.core.errors import (
    ConfigurationError,
    DimensionMismatch,
    NumericalError,
    PositivityViolation,
    StepSizeUnderflow,
)
from excitonflow.core.model import (
    ChainSpec,
    HamiltonianSnapshot,
    MotionProfile,
    StaticProfile,
    VibronicCoupling,
    bond_extensions,
    distance_ratio_function,
    hamiltonian_at,
    shortest_period,
)

logger = logging.getLogger(__name__)

_SUPPORTED_METHODS = ("RK45", "DOP853")


class Termination(str, Enum):
    CONVERGED = "converged"
    TIME_CAPPED = "time_capped"


@dataclass(frozen=True)
class ChannelSpec:
    """Dissipation, sink and dephasing rates."""
    gamma_n: Tuple[float, ...]
    gamma_sink: float
    gamma_deph: float = 0.0

    def __post_init__(self):
        rates = tuple(float(g) for g in self.gamma_n)
        object.__setattr__(self, "gamma_n", rates)
        for name, value in [("gamma_sink", self.gamma_sink), ("gamma_deph", self.gamma_deph)]:
            if not (math.isfinite(value) and value >= 0):
                raise ConfigurationError(f"{name} must be >= 0, got {value}")
        for n, g in enumerate(rates, start=1):
            if not (math.isfinite(g) and g >= 0):
                raise ConfigurationError(f"gamma_{n} must be >= 0, got {g}")

    @classmethod
    def uniform(
        cls, n_sites: int, gamma: float, gamma_sink: float, gamma_deph: float = 0.0
    ) -> "ChannelSpec":
        return cls(gamma_n=(gamma,) * n_sites, gamma_sink=gamma_sink, gamma_deph=gamma_deph)

    @property
    def n_sites(self) -> int:
        return len(self.gamma_n)

    def check(self, n_sites: int) -> None:
        if self.n_sites != n_sites:
            raise DimensionMismatch(
                f"{self.n_sites} dissipation rates given for {n_sites} sites"
            )

    def decay_rates(self) -> np.ndarray:
        """
        Per-basis-state half rates k (sites then sink); coherence rho_nm
        decays at k_n + k_m before the population corrections.
        """
        k = np.append(np.array(self.gamma_n) + 2.0 * self.gamma_deph, 0.0)
        k[-2] += self.gamma_sink
        return k

    def with_dephasing(self, gamma_deph: float) -> "ChannelSpec":
        return ChannelSpec(self.gamma_n, self.gamma_sink, gamma_deph)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "gamma_n": list(self.gamma_n),
            "gamma_sink": self.gamma_sink,
            "gamma_deph": self.gamma_deph,
        }


@dataclass(frozen=True)
class QuantumState:
    """Density matrix over N sites plus the sink (last index)."""
    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] < 3:
            raise DimensionMismatch(f"rho must be a square (N+1)x(N+1) matrix, got {rho.shape}")
        object.__setattr__(self, "rho", rho)

    @classmethod
    def localized(cls, n_sites: int, site: int) -> "QuantumState":
        """|site><site| with 1-based site index."""
        if not 1 <= site <= n_sites:
            raise ConfigurationError(f"initial site {site} outside 1..{n_sites}")
        rho = np.zeros((n_sites + 1, n_sites + 1), dtype=complex)
        rho[site - 1, site - 1] = 1.0
        return cls(rho)

    @property
    def n_sites(self) -> int:
        return self.rho.shape[0] - 1

    @property
    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.rho))[:-1]

    @property
    def sink_population(self) -> float:
        return float(np.real(self.rho[-1, -1]))

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.rho)))

    def validate(self, tol: float = 1e-10) -> None:
        if np.max(np.abs(self.rho - self.rho.conj().T)) > tol:
            raise NumericalError("density matrix is not Hermitian")
        if not (0.0 <= self.trace <= 1.0 + tol):
            raise PositivityViolation(f"trace {self.trace} outside [0, 1]")
        diag = np.real(np.diag(self.rho))
        if diag.min() < -tol or diag.max() > 1.0 + tol:
            raise PositivityViolation("diagonal entries outside [0, 1]")


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    t_max: float = 500.0
    convergence_tol: float = 1e-9
    method: str = "DOP853"
    sample_dt: float = 0.1
    max_step: float = math.inf

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "t_max", "convergence_tol", "sample_dt", "max_step"):
            value = getattr(self, name)
            if not value > 0:
                raise ConfigurationError(f"integrator {name} must be > 0, got {value}")
        if self.method not in _SUPPORTED_METHODS:
            raise ConfigurationError(
                f"integrator method must be one of {_SUPPORTED_METHODS}, got {self.method!r}"
            )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rel_tol": self.rel_tol,
            "abs_tol": self.abs_tol,
            "t_max": self.t_max,
            "convergence_tol": self.convergence_tol,
            "method": self.method,
            "sample_dt": self.sample_dt,
            "max_step": self.max_step,
        }


@dataclass(frozen=True)
class TransferRecord:
    """Sampled populations of one propagation."""
    times: np.ndarray
    site_populations: np.ndarray
    sink_population: np.ndarray
    loss: np.ndarray
    asymptotic_sink: float
    termination: Termination
    states: Optional[np.ndarray] = None

    @property
    def n_sites(self) -> int:
        return self.site_populations.shape[1]

    @property
    def final_time(self) -> float:
        return float(self.times[-1])

    def trace_residual(self) -> float:
        """max |sum P_n + P_sink + loss - 1| over the samples."""
        total = self.site_populations.sum(axis=1) + self.sink_population + self.loss
        return float(np.max(np.abs(total - 1.0)))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_sites": self.n_sites,
            "samples": len(self.times),
            "final_time": self.final_time,
            "asymptotic_sink": self.asymptotic_sink,
            "termination": self.termination.value,
        }


def _apply_rhs(
    rho: np.ndarray,
    h: np.ndarray,
    decay: np.ndarray,
    ch: ChannelSpec,
) -> np.ndarray:
    n = rho.shape[0] - 1
    drho = 1j * (rho @ h - h @ rho) - decay * rho
    # Strided views of the site diagonal (sink excluded).
    site_diag = slice(0, n * (n + 2), n + 2)
    drho.reshape(-1)[site_diag] += 4.0 * ch.gamma_deph * rho.reshape(-1)[site_diag]
    drho[n, n] += 2.0 * ch.gamma_sink * rho[n - 1, n - 1]
    return drho


def lindblad_rhs(rho: QuantumState, H: HamiltonianSnapshot, ch: ChannelSpec) -> np.ndarray:
    """d rho / dt for the full master equation at one instant."""
    if rho.n_sites != H.n_sites:
        raise DimensionMismatch(
            f"state has {rho.n_sites} sites, Hamiltonian has {H.n_sites}"
        )
    ch.check(H.n_sites)
    k = ch.decay_rates()
    return _apply_rhs(rho.rho, H.matrix(with_sink=True), k[:, None] + k[None, :], ch)


def sample_grid(cfg: IntegratorConfig, sample_times: Optional[Sequence[float]]) -> np.ndarray:
    if sample_times is not None:
        grid = np.asarray(sample_times, dtype=float)
        if grid.ndim != 1 or len(grid) == 0:
            raise ConfigurationError("sample_times must be a non-empty 1-D sequence")
        if np.any(np.diff(grid) <= 0) or grid[0] < 0 or grid[-1] > cfg.t_max:
            raise ConfigurationError("sample_times must increase within [0, t_max]")
        return grid
    count = int(math.floor(cfg.t_max / cfg.sample_dt + 1e-9))
    grid = np.minimum(cfg.sample_dt * np.arange(count + 1), cfg.t_max)
    if grid[-1] < cfg.t_max:
        grid = np.append(grid, cfg.t_max)
    return grid


def propagate(
    spec: ChainSpec,
    profile: MotionProfile,
    vib: VibronicCoupling,
    ch: ChannelSpec,
    cfg: IntegratorConfig,
    initial: int = 1,
    sample_times: Optional[Sequence[float]] = None,
    store_states: bool = False,
) -> TransferRecord:
    """
    Integrate from |initial><initial| until the sites hold less than
    convergence_tol in total or t_max is reached.

    Populations are checked against -100 * abs_tol at every accepted step,
    not only at the output samples.
    """
    profile.check(spec)
    ch.check(spec.n_sites)
    rho0 = QuantumState.localized(spec.n_sites, initial).rho
    if vib.enabled:
        bond_extensions(profile, spec, 0.0)

    m = spec.n_sites + 1
    k = ch.decay_rates()
    decay = k[:, None] + k[None, :]
    gammas = 2.0 * np.array(ch.gamma_n)
    sites = np.arange(spec.n_sites)
    upper = (sites[:-1], sites[1:])
    lower = (sites[1:], sites[:-1])
    energies = spec.energies()

    # Allocated once; moving profiles overwrite couplings (and detunings) per call.
    h = hamiltonian_at(profile, spec, vib, 0.0).matrix(with_sink=True)
    update_h: Optional[Callable[[float], None]] = None
    if not isinstance(profile, StaticProfile):
        ratio = distance_ratio_function(profile, spec)
        j0 = spec.j0
        detuning = vib.chi * spec.d0 if vib.enabled else 0.0

        def overwrite_couplings(t: float) -> None:
            r = ratio(t)
            j = j0 / (r * r * r)
            h[upper] = j
            h[lower] = j
            if detuning:
                ext = r - 1.0
                h[sites, sites] = energies + detuning * np.append(ext, ext[-1])

        update_h = overwrite_couplings

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        if update_h is not None:
            update_h(t)
        rho = y[:-1].reshape(m, m)
        drho = _apply_rhs(rho, h, decay, ch)
        dloss = gammas @ rho.diagonal()[:-1].real
        return np.append(drho.ravel(), dloss)

    floor = -100.0 * cfg.abs_tol

    def converged(t: float, y: np.ndarray) -> float:
        rho = y[:-1].reshape(m, m)
        return float(rho[sites, sites].real.sum()) - cfg.convergence_tol

    def negative_population(t: float, y: np.ndarray) -> float:
        return float(y[:-1].reshape(m, m).diagonal().real.min()) - floor

    converged.terminal = True
    converged.direction = -1
    negative_population.terminal = True
    negative_population.direction = -1

    grid = sample_grid(cfg, sample_times)
    max_step = min(cfg.max_step, shortest_period(profile, spec))
    y0 = np.append(rho0.ravel(), 0.0).astype(complex)

    sol = solve_ivp(
        rhs,
        (0.0, cfg.t_max),
        y0,
        method=cfg.method,
        t_eval=grid,
        events=(converged, negative_population),
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        max_step=max_step,
    )
    if sol.status == -1:
        raise StepSizeUnderflow(f"integration stalled: {sol.message}")
    if len(sol.t_events[1]):
        t_bad = float(sol.t_events[1][0])
        diag = sol.y_events[1][0][:-1].reshape(m, m).diagonal().real
        j = int(np.argmin(diag))
        raise PositivityViolation(
            f"population of basis state {j + 1} fell below {floor:.3g} at t={t_bad:.6g}"
        )

    times = sol.t
    ys = sol.y
    if sol.status == 1:
        termination = Termination.CONVERGED
        t_event = sol.t_events[0][0]
        if len(times) == 0 or t_event > times[-1]:
            times = np.append(times, t_event)
            ys = np.column_stack([ys, sol.y_events[0][0]])
    else:
        termination = Termination.TIME_CAPPED

    rhos = ys[:-1].T.reshape(len(times), m, m)
    diag = np.real(np.diagonal(rhos, axis1=1, axis2=2))
    if diag.min() < floor:
        i, j = np.unravel_index(int(np.argmin(diag)), diag.shape)
        raise PositivityViolation(
            f"population of basis state {j + 1} reached {diag[i, j]:.3g} at t={times[i]:.6g}"
        )

    record = TransferRecord(
        times=np.asarray(times, dtype=float),
        site_populations=diag[:, :-1],
        sink_population=diag[:, -1],
        loss=np.real(ys[-1]),
        asymptotic_sink=float(diag[-1, -1]),
        termination=termination,
        states=rhos if store_states else None,
    )
    logger.debug(
        "propagate N=%d %s: %s at t=%.4g, P_sink=%.8f",
        spec.n_sites, profile.kind.value, termination.value,
        record.final_time, record.asymptotic_sink,
    )
    return record


def static_sink_population_numeric(
    spec: ChainSpec,
    scale: Union[float, Sequence[float]],
    ch: ChannelSpec,
    cfg: IntegratorConfig,
    initial: int = 1,
) -> float:
    """Asymptotic sink population of the resting chain with couplings J0 * scale."""
    if np.isscalar(scale):
        profile = StaticProfile(scale=float(scale))
    else:
        profile = StaticProfile(bond_scales=tuple(scale))
    return propagate(spec, profile, VibronicCoupling(enabled=False), ch, cfg, initial).asymptotic_sink


__all__ = [
    "Termination", "ChannelSpec", "QuantumState", "IntegratorConfig", "TransferRecord",
    "lindblad_rhs", "propagate", "sample_grid", "static_sink_population_numeric",
]

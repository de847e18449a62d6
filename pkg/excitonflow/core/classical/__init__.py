"""
ExcitonFlow Classical Transfer Engine

Incoherent nearest-neighbour hopping (Foerster-type rate equation) on the
same moving chain. Hopping rates follow the coupling squared, k_n = c J_n^2,
and the loss and sink rates are the population rates of the quantum model
(2 gamma_n and 2 gamma_sink), so both models see identical channels.

A faster or stronger hop never lowers the classical sink yield, so a moving
chain cannot beat the static chain held at its maximal couplings.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import partial
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from excitonflow.core.dynamics import (
    ChannelSpec,
    IntegratorConfig,
    Termination,
    TransferRecord,
    sample_grid,
)
from excitonflow.core.enhancement import EnhancementPoint, ReferenceKind
from excitonflow.core.errors import (
    ConfigurationError,
    DomainError,
    NotApplicable,
    PositivityViolation,
    StepSizeUnderflow,
)
from excitonflow.core.model import (
    ChainSpec,
    MotionProfile,
    NormalMode,
    PairwiseSinusoid,
    StaticProfile,
    couplings_at,
    distance_ratio_function,
    max_coupling_scales,
    shortest_period,
)
from excitonflow.core.parallel import map_grid

logger = logging.getLogger(__name__)

_RATE_SAMPLES = 4096


@dataclass(frozen=True)
class RateModel:
    """Hopping scale plus the population loss and sink rates."""
    hop_scale: float = 1.0
    loss_rates: Tuple[float, ...] = ()
    sink_rate: float = 0.0
    detailed_balance: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.hop_scale) and self.hop_scale > 0):
            raise ConfigurationError(f"hop_scale must be > 0, got {self.hop_scale}")
        rates = tuple(float(r) for r in self.loss_rates)
        if any(r < 0 for r in rates) or self.sink_rate < 0:
            raise ConfigurationError("classical loss and sink rates must be >= 0")
        if not self.detailed_balance:
            raise ConfigurationError("only symmetric (detailed-balance) hopping is supported")
        object.__setattr__(self, "loss_rates", rates)

    @classmethod
    def from_channels(cls, ch: ChannelSpec, hop_scale: float = 1.0) -> "RateModel":
        return cls(
            hop_scale=hop_scale,
            loss_rates=tuple(2.0 * g for g in ch.gamma_n),
            sink_rate=2.0 * ch.gamma_sink,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "hop_scale": self.hop_scale,
            "loss_rates": list(self.loss_rates),
            "sink_rate": self.sink_rate,
            "detailed_balance": self.detailed_balance,
        }


def hopping_rate(J: float, c: float = 1.0) -> float:
    """k = c J^2."""
    if J < 0:
        raise DomainError(f"coupling must be >= 0, got {J}")
    if c <= 0:
        raise DomainError(f"hop scale must be > 0, got {c}")
    return c * J * J


def rate_matrix(
    spec: ChainSpec, profile: MotionProfile, model: RateModel, t: float
) -> np.ndarray:
    """Generator M of dP/dt = M P over sites 1..N and the sink (last index)."""
    n = spec.n_sites
    if len(model.loss_rates) != n:
        raise ConfigurationError(f"{len(model.loss_rates)} loss rates given for {n} sites")
    k = model.hop_scale * couplings_at(profile, spec, t) ** 2
    m = _channel_generator(n, model)
    bonds = np.arange(n - 1)
    m[bonds, bonds + 1] = k
    m[bonds + 1, bonds] = k
    m[bonds, bonds] -= k
    m[bonds + 1, bonds + 1] -= k
    return m


def _channel_generator(n: int, model: RateModel) -> np.ndarray:
    """Loss and sink part of the generator."""
    m = np.zeros((n + 1, n + 1))
    m[np.arange(n), np.arange(n)] -= np.array(model.loss_rates)
    m[n - 1, n - 1] -= model.sink_rate
    m[n, n - 1] += model.sink_rate
    return m


def propagate_classical(
    spec: ChainSpec,
    profile: MotionProfile,
    ch: ChannelSpec,
    c: float,
    cfg: IntegratorConfig,
    initial: int = 1,
    sample_times: Optional[Sequence[float]] = None,
) -> TransferRecord:
    """Integrate the rate equation from a full population on site `initial`."""
    profile.check(spec)
    ch.check(spec.n_sites)
    if not 1 <= initial <= spec.n_sites:
        raise ConfigurationError(f"initial site {initial} outside 1..{spec.n_sites}")
    model = RateModel.from_channels(ch, c)
    n = spec.n_sites
    losses = np.array(model.loss_rates)

    channels_only = _channel_generator(n, model)
    hop_scale_j0_sq = model.hop_scale * spec.j0 ** 2
    ratio = distance_ratio_function(profile, spec)

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        r = ratio(t)
        k = hop_scale_j0_sq / r ** 6
        p = y[:-1]
        dp = channels_only @ p
        flux = k * (p[1:n] - p[: n - 1])
        dp[: n - 1] += flux
        dp[1:n] -= flux
        return np.append(dp, losses @ p[:n])

    def converged(t: float, y: np.ndarray) -> float:
        return float(y[:n].sum()) - cfg.convergence_tol

    converged.terminal = True
    converged.direction = -1

    grid = sample_grid(cfg, sample_times)
    y0 = np.zeros(n + 2)
    y0[initial - 1] = 1.0
    sol = solve_ivp(
        rhs,
        (0.0, cfg.t_max),
        y0,
        method=cfg.method,
        t_eval=grid,
        events=converged,
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        max_step=min(cfg.max_step, shortest_period(profile, spec)),
    )
    if sol.status == -1:
        raise StepSizeUnderflow(f"classical integration stalled: {sol.message}")

    times, ys = sol.t, sol.y
    termination = Termination.TIME_CAPPED
    if sol.status == 1:
        termination = Termination.CONVERGED
        t_event = sol.t_events[0][0]
        if len(times) == 0 or t_event > times[-1]:
            times = np.append(times, t_event)
            ys = np.column_stack([ys, sol.y_events[0][0]])

    pops = ys[:-1].T
    if pops.min() < -100.0 * cfg.abs_tol:
        i, j = np.unravel_index(int(np.argmin(pops)), pops.shape)
        raise PositivityViolation(
            f"classical population {j + 1} reached {pops[i, j]:.3g} at t={times[i]:.6g}"
        )
    record = TransferRecord(
        times=np.asarray(times, dtype=float),
        site_populations=pops[:, :n],
        sink_population=pops[:, n],
        loss=ys[-1],
        asymptotic_sink=float(pops[-1, n]),
        termination=termination,
    )
    logger.debug(
        "classical N=%d %s: %s at t=%.4g, P_sink=%.8f",
        n, profile.kind.value, termination.value, record.final_time, record.asymptotic_sink,
    )
    return record


def mean_square_coupling_scales(profile: MotionProfile, spec: ChainSpec) -> np.ndarray:
    """Per-bond sqrt(<J_n^2>) / J0, the static couplings with the period-averaged hopping rate."""
    if isinstance(profile, StaticProfile):
        return profile.scales(spec)
    if isinstance(profile, PairwiseSinusoid):
        sampled = profile.with_frequency(1.0)
        period = 2.0 * math.pi
    elif isinstance(profile, NormalMode):
        sampled = profile
        period = profile.longest_active_period()
        if not math.isfinite(period):
            return np.ones(spec.n_bonds)
    else:
        raise NotApplicable("a travelling pulse has no period-averaged rate")
    times = np.linspace(0.0, period, _RATE_SAMPLES, endpoint=False)
    scales = np.array([couplings_at(sampled, spec, t) for t in times]) / spec.j0
    return np.sqrt((scales ** 2).mean(axis=0))


def _classical_point(
    omega: float,
    *,
    spec: ChainSpec,
    profile: MotionProfile,
    ch: ChannelSpec,
    c: float,
    cfg: IntegratorConfig,
    initial: int,
) -> float:
    moving = profile.with_frequency(omega)
    return propagate_classical(spec, moving, ch, c, cfg, initial).asymptotic_sink


def classical_enhancement(
    spec: ChainSpec,
    profile: MotionProfile,
    ch: ChannelSpec,
    c: float,
    omega_grid: Sequence[float],
    cfg: Optional[IntegratorConfig] = None,
    initial: int = 1,
    workers: int = 1,
) -> List[EnhancementPoint]:
    """
    Delta_cl(omega) against the classical static chain at the maximal
    couplings of the motion. omega is the drive (PairwiseSinusoid) or
    omega0 (NormalMode).
    """
    if not isinstance(profile, (PairwiseSinusoid, NormalMode)):
        raise NotApplicable(f"classical enhancement needs an oscillating profile, got {profile.kind.value}")
    if len(omega_grid) == 0:
        raise ConfigurationError("omega grid is empty")
    cfg = cfg or IntegratorConfig()
    baseline_profile = StaticProfile(bond_scales=tuple(max_coupling_scales(profile, spec)))
    baseline = propagate_classical(spec, baseline_profile, ch, c, cfg, initial).asymptotic_sink
    job = partial(_classical_point, spec=spec, profile=profile, ch=ch, c=c, cfg=cfg, initial=initial)
    values = map_grid(job, [float(w) for w in omega_grid], workers, label="omega")
    points = [
        EnhancementPoint(param=float(w), p_sink=p, p_static_ref=baseline, baseline_kind=ReferenceKind.J_MAX)
        for w, p in zip(omega_grid, values)
    ]
    logger.info(
        "classical sweep: %d points, max delta_cl=%.3g", len(points), max(p.delta for p in points)
    )
    return points


__all__ = [
    "RateModel", "hopping_rate", "rate_matrix", "propagate_classical",
    "mean_square_coupling_scales", "classical_enhancement",
]

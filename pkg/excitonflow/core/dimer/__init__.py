"""
ExcitonFlow Dimer Engine

Closed-form results for two sites with a pairwise sinusoidal distance.

Under the symmetric-decay condition gamma1 == gamma2 + gamma_sink (called
Gamma) with equal site energies, the populations follow a single phase
integral of the coupling:

    P1 = cos^2(theta) exp(-2 Gamma t),  P2 = sin^2(theta) exp(-2 Gamma t),
    theta(t) = int_0^t J(t') dt'.

The extremal frequency estimates are approximations, not ground truth.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Tuple

from scipy.integrate import quad

from excitonflow.core.errors import ConfigurationError, DomainError, GammaConditionViolated
from excitonflow.core.model import time_averaged_coupling

logger = logging.getLogger(__name__)

_QUAD_OPTS = {"epsabs": 1e-12, "epsrel": 1e-10, "limit": 400}


class ExtremumKind(str, Enum):
    MAX = "max"
    MIN = "min"


@dataclass(frozen=True)
class DimerParams:
    """Driven dimer: J(t) = j0 / (1 - 2a sin(omega t + phi))^3."""
    j0: float = 1.0
    a: float = 0.25
    omega: float = 4.54
    phi: float = math.pi / 2
    gamma1: float = 0.6
    gamma2: float = 0.1
    gamma_sink: float = 0.5
    epsilon1: float = 0.0
    epsilon2: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.a < 0.5):
            raise ConfigurationError(f"dimer amplitude a={self.a} violates 0 <= a < 1/2")
        if not self.j0 > 0:
            raise ConfigurationError(f"j0 must be > 0, got {self.j0}")
        if self.omega < 0:
            raise ConfigurationError(f"omega must be >= 0, got {self.omega}")
        for name in ("gamma1", "gamma2", "gamma_sink"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be >= 0, got {getattr(self, name)}")

    @property
    def gamma(self) -> float:
        """Gamma, the common decay rate of both sites under the condition."""
        return self.gamma1

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega if self.omega > 0 else math.inf

    def satisfies_gamma_condition(self, tol: float = 1e-12) -> bool:
        scale = max(1.0, abs(self.gamma1))
        return (
            abs(self.gamma1 - self.gamma2 - self.gamma_sink) <= tol * scale
            and self.epsilon1 == self.epsilon2
        )

    def require_gamma_condition(self) -> None:
        if not self.satisfies_gamma_condition():
            raise GammaConditionViolated(
                f"closed form needs gamma1 == gamma2 + gamma_sink and equal site energies "
                f"(gamma1={self.gamma1}, gamma2={self.gamma2}, gamma_sink={self.gamma_sink}, "
                f"epsilon=({self.epsilon1}, {self.epsilon2}))"
            )

    def coupling(self, t: float) -> float:
        return self.j0 / (1.0 - 2.0 * self.a * math.sin(self.omega * t + self.phi)) ** 3

    def to_dict(self) -> Dict[str, Any]:
        return {
            "j0": self.j0, "a": self.a, "omega": self.omega, "phi": self.phi,
            "gamma1": self.gamma1, "gamma2": self.gamma2, "gamma_sink": self.gamma_sink,
            "epsilon1": self.epsilon1, "epsilon2": self.epsilon2,
        }


def static_sink_population(J: float, gamma: float, gamma_sink: float) -> float:
    """
    Asymptotic sink population of a resting dimer with both sites dissipating
    at gamma: gamma_S J^2 / [(2 gamma + gamma_S)(gamma (gamma + gamma_S) + J^2)].
    """
    if J < 0 or gamma < 0 or gamma_sink < 0:
        raise DomainError(f"need J, gamma, gamma_sink >= 0, got ({J}, {gamma}, {gamma_sink})")
    if 2.0 * gamma + gamma_sink == 0.0:
        raise DomainError("static sink population undefined when 2*gamma + gamma_sink == 0")
    if J == 0.0:
        return 0.0
    return gamma_sink * J * J / ((2.0 * gamma + gamma_sink) * (gamma * (gamma + gamma_sink) + J * J))


def static_sink_population_gamma_condition(J: float, Gamma: float, gamma_sink: float) -> float:
    """Long-time limit of the analytic sink population for constant J: gamma_S J^2 / (2 Gamma (Gamma^2 + J^2))."""
    if J < 0 or Gamma <= 0 or gamma_sink < 0:
        raise DomainError(f"need J >= 0, Gamma > 0, gamma_sink >= 0, got ({J}, {Gamma}, {gamma_sink})")
    return gamma_sink * J * J / (2.0 * Gamma * (Gamma * Gamma + J * J))


def phase_integral(params: DimerParams, t: float) -> float:
    """theta(t) = int_0^t J dt'. Whole periods contribute T * J_avg each."""
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if params.omega == 0.0 or params.a == 0.0:
        return params.coupling(0.0) * t
    period = params.period
    whole = math.floor(t / period)
    remainder = t - whole * period
    value = whole * period * time_averaged_coupling(params.a, params.j0)
    if remainder > 0.0:
        value += quad(params.coupling, 0.0, remainder, **_QUAD_OPTS)[0]
    return value


def dimer_populations(params: DimerParams, t: float) -> Tuple[float, float]:
    """(P1, P2) at time t from the closed form."""
    params.require_gamma_condition()
    theta = phase_integral(params, t)
    envelope = math.exp(-2.0 * params.gamma * t)
    return math.cos(theta) ** 2 * envelope, math.sin(theta) ** 2 * envelope


def analytic_sink_population(params: DimerParams, t: float) -> float:
    """P_sink(t) = 2 gamma_S int_0^t P2 dt'."""
    params.require_gamma_condition()
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if t == 0.0 or params.gamma_sink == 0.0:
        return 0.0

    def p2(s: float) -> float:
        return dimer_populations(params, s)[1]

    # Split at period boundaries so quad sees smooth pieces.
    edges = [0.0]
    if math.isfinite(params.period):
        step = params.period
        while edges[-1] + step < t:
            edges.append(edges[-1] + step)
    edges.append(t)
    total = sum(quad(p2, lo, hi, **_QUAD_OPTS)[0] for lo, hi in zip(edges[:-1], edges[1:]))
    return 2.0 * params.gamma_sink * total


def extremal_frequencies(a: float, kind: ExtremumKind, m: int, j0: float = 1.0) -> float:
    """
    Estimated drive frequency of the m-th sink-population maximum
    (2 J_avg / (2m + 1)) or minimum (J_avg / m).
    """
    kind = ExtremumKind(kind)
    if int(m) != m or m < 0:
        raise DomainError(f"harmonic index m must be a non-negative integer, got {m}")
    j_avg = time_averaged_coupling(a, j0)
    if kind is ExtremumKind.MAX:
        return 2.0 * j_avg / (2 * m + 1)
    if m == 0:
        raise DomainError("minima start at m = 1")
    return j_avg / m


__all__ = [
    "ExtremumKind", "DimerParams",
    "static_sink_population", "static_sink_population_gamma_condition",
    "phase_integral", "dimer_populations", "analytic_sink_population",
    "extremal_frequencies",
]

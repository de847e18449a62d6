"""
ExcitonFlow Chain Model

Chain geometry, time-dependent inter-site distances and couplings, and the
instantaneous tight-binding Hamiltonian with optional exciton-vibration
detuning. Lengths are in units of d0, energies and frequencies in units of J0.

Bond index n (1..N-1) joins sites n and n+1. Public operations take 1-based
site/bond indices; the vectorized helpers return 0-based arrays.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Callable, ClassVar, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from excitonflow.core.errors import (
    ConfigurationError,
    DimensionMismatch,
    DomainError,
    NotApplicable,
    PositivityViolation,
)

logger = logging.getLogger(__name__)

# Samples per period for positivity checks and sampled coupling extrema.
_PERIOD_SAMPLES = 4096


class MotionKind(str, Enum):
    """Time-dependence of the chain geometry."""
    STATIC = "static"
    PAIRWISE = "pairwise"
    NORMAL_MODE = "normal_mode"
    PULSE = "pulse"


class Boundary(str, Enum):
    """Boundary condition of the spring chain."""
    CONFINED = "confined"
    OPEN = "open"


def _as_tuple(values: Sequence[float]) -> Tuple[float, ...]:
    return tuple(float(v) for v in values)


@dataclass(frozen=True)
class ChainSpec:
    """Static chain description."""
    n_sites: int
    d0: float = 1.0
    site_energies: Tuple[float, ...] = ()
    j0: float = 1.0

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 2:
            raise ConfigurationError(f"n_sites must be an integer >= 2, got {self.n_sites}")
        object.__setattr__(self, "n_sites", int(self.n_sites))
        if not (math.isfinite(self.d0) and self.d0 > 0):
            raise ConfigurationError(f"d0 must be > 0, got {self.d0}")
        if not (math.isfinite(self.j0) and self.j0 > 0):
            raise ConfigurationError(f"j0 must be > 0, got {self.j0}")

        energies = _as_tuple(self.site_energies) or (0.0,) * self.n_sites
        if len(energies) != self.n_sites:
            raise DimensionMismatch(
                f"site_energies has {len(energies)} entries, chain has {self.n_sites} sites"
            )
        if not all(math.isfinite(e) for e in energies):
            raise ConfigurationError("site_energies must be finite")
        object.__setattr__(self, "site_energies", energies)

    @classmethod
    def uniform(
        cls, n_sites: int, epsilon: float = 0.0, d0: float = 1.0, j0: float = 1.0
    ) -> "ChainSpec":
        return cls(n_sites=n_sites, d0=d0, site_energies=(epsilon,) * n_sites, j0=j0)

    @property
    def n_bonds(self) -> int:
        return self.n_sites - 1

    def energies(self) -> np.ndarray:
        return np.array(self.site_energies, dtype=float)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_sites": self.n_sites,
            "d0": self.d0,
            "site_energies": list(self.site_energies),
            "j0": self.j0,
        }


# Motion profiles

@dataclass(frozen=True)
class StaticProfile:
    """
    Resting chain.

    Carries coupling multipliers rather than distances: `scale` applies to
    every bond unless per-bond `bond_scales` are given.
    """
    scale: float = 1.0
    bond_scales: Optional[Tuple[float, ...]] = None

    kind: ClassVar[MotionKind] = MotionKind.STATIC

    def __post_init__(self):
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise ConfigurationError(f"static scale must be > 0, got {self.scale}")
        if self.bond_scales is not None:
            scales = _as_tuple(self.bond_scales)
            if not all(math.isfinite(s) and s > 0 for s in scales):
                raise ConfigurationError("static bond_scales must all be > 0")
            object.__setattr__(self, "bond_scales", scales)

    def scales(self, spec: ChainSpec) -> np.ndarray:
        self.check(spec)
        if self.bond_scales is None:
            return np.full(spec.n_bonds, self.scale)
        return np.array(self.bond_scales)

    def check(self, spec: ChainSpec) -> None:
        if self.bond_scales is not None and len(self.bond_scales) != spec.n_bonds:
            raise DimensionMismatch(
                f"bond_scales has {len(self.bond_scales)} entries, chain has {spec.n_bonds} bonds"
            )

    def with_frequency(self, omega: float) -> "StaticProfile":
        raise NotApplicable("static chain has no frequency")

    def with_phase(self, phi: float) -> "StaticProfile":
        raise NotApplicable("static chain has no phase")

    def with_amplitude(self, a: float) -> "StaticProfile":
        raise NotApplicable("static chain has no amplitude")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "scale": self.scale,
            "bond_scales": None if self.bond_scales is None else list(self.bond_scales),
        }


@dataclass(frozen=True)
class PairwiseSinusoid:
    """Each bond oscillates independently: d_n = d0 [1 - 2 a_n sin(w t + phi_n)]."""
    amplitudes: Tuple[float, ...]
    omega: float
    phases: Tuple[float, ...]

    kind: ClassVar[MotionKind] = MotionKind.PAIRWISE

    def __post_init__(self):
        amplitudes = _as_tuple(self.amplitudes)
        phases = _as_tuple(self.phases)
        if len(amplitudes) != len(phases):
            raise DimensionMismatch(
                f"{len(amplitudes)} amplitudes but {len(phases)} phases"
            )
        for n, a in enumerate(amplitudes, start=1):
            if not (0.0 <= a < 0.5):
                raise ConfigurationError(
                    f"pairwise amplitude a_{n}={a} violates 0 <= a < 1/2 (distance must stay positive)"
                )
        if not (math.isfinite(self.omega) and self.omega >= 0):
            raise ConfigurationError(f"omega must be finite and >= 0, got {self.omega}")
        if not all(math.isfinite(p) for p in phases):
            raise ConfigurationError("phases must be finite")
        object.__setattr__(self, "amplitudes", amplitudes)
        object.__setattr__(self, "phases", phases)

    @classmethod
    def uniform(cls, n_bonds: int, a: float, omega: float, phi: float) -> "PairwiseSinusoid":
        return cls(amplitudes=(a,) * n_bonds, omega=omega, phases=(phi,) * n_bonds)

    def check(self, spec: ChainSpec) -> None:
        if len(self.amplitudes) != spec.n_bonds:
            raise DimensionMismatch(
                f"pairwise profile has {len(self.amplitudes)} bonds, chain has {spec.n_bonds}"
            )

    def with_frequency(self, omega: float) -> "PairwiseSinusoid":
        return replace(self, omega=omega)

    def with_phase(self, phi: float) -> "PairwiseSinusoid":
        return replace(self, phases=(phi,) * len(self.phases))

    def with_amplitude(self, a: float) -> "PairwiseSinusoid":
        return replace(self, amplitudes=(a,) * len(self.amplitudes))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "amplitudes": list(self.amplitudes),
            "omega": self.omega,
            "phases": list(self.phases),
        }


@dataclass(frozen=True)
class NormalMode:
    """
    Superposition of normal modes of the spring chain.

    Confined chains have virtual fixed sites 0 and N+1; open chains have free
    ends. The N mode amplitudes a_q are relative to d0.
    """
    boundary: Boundary
    omega0: float
    mode_amplitudes: Tuple[float, ...]
    mode_phases: Tuple[float, ...]

    kind: ClassVar[MotionKind] = MotionKind.NORMAL_MODE

    # (N, N) array: row q-1 holds a_q * shape_q(n) / normalization_q
    _weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "boundary", Boundary(self.boundary))
        amplitudes = _as_tuple(self.mode_amplitudes)
        phases = _as_tuple(self.mode_phases)
        if len(amplitudes) != len(phases):
            raise DimensionMismatch(f"{len(amplitudes)} mode amplitudes but {len(phases)} phases")
        if len(amplitudes) < 2:
            raise DimensionMismatch("normal modes need at least 2 sites")
        if not (math.isfinite(self.omega0) and self.omega0 > 0):
            raise ConfigurationError(f"omega0 must be > 0, got {self.omega0}")
        if not all(math.isfinite(a) for a in amplitudes):
            raise ConfigurationError("mode amplitudes must be finite")
        n = len(amplitudes)
        if self.boundary is Boundary.OPEN and amplitudes[-1] != 0.0:
            raise ConfigurationError(f"open chain mode q={n} has a null shape; its amplitude must be 0")
        object.__setattr__(self, "mode_amplitudes", amplitudes)
        object.__setattr__(self, "mode_phases", phases)
        object.__setattr__(self, "_weights", self._mode_weights())
        self._check_positive_geometry()

    @classmethod
    def single(
        cls,
        n_sites: int,
        q: int,
        a: float,
        boundary: Union[Boundary, str] = Boundary.OPEN,
        omega0: float = 1.0,
        phi: float = 0.0,
    ) -> "NormalMode":
        """Only mode q is excited."""
        if not 1 <= q <= n_sites:
            raise ConfigurationError(f"mode index q={q} outside 1..{n_sites}")
        amplitudes = [0.0] * n_sites
        phases = [0.0] * n_sites
        amplitudes[q - 1] = a
        phases[q - 1] = phi
        return cls(
            boundary=Boundary(boundary),
            omega0=omega0,
            mode_amplitudes=tuple(amplitudes),
            mode_phases=tuple(phases),
        )

    @property
    def n_sites(self) -> int:
        return len(self.mode_amplitudes)

    @property
    def active_modes(self) -> Tuple[int, ...]:
        """1-based indices of modes with nonzero amplitude."""
        return tuple(q for q, a in enumerate(self.mode_amplitudes, start=1) if a != 0.0)

    def mode_frequencies(self) -> np.ndarray:
        q = np.arange(1, self.n_sites + 1)
        if self.boundary is Boundary.CONFINED:
            return 2.0 * self.omega0 * np.sin(q * np.pi / (2.0 * (self.n_sites + 1)))
        return 2.0 * self.omega0 * np.sin(q * np.pi / (2.0 * self.n_sites))

    def _mode_weights(self) -> np.ndarray:
        n_sites = self.n_sites
        q = np.arange(1, n_sites + 1)[:, None]
        n = np.arange(1, n_sites + 1)[None, :]
        a = np.array(self.mode_amplitudes)[:, None]
        if self.boundary is Boundary.CONFINED:
            shape = np.sin(q * np.pi * n / (n_sites + 1))
            norm = np.sin(q * np.pi / (n_sites + 1))
        else:
            shape = np.cos(q * np.pi / n_sites * (n - 0.5))
            norm = np.cos(q * np.pi / (2.0 * n_sites))
        weights = np.zeros((n_sites, n_sites))
        active = a[:, 0] != 0.0
        weights[active] = (a * shape / norm)[active]
        return weights

    def relative_displacements(self, t: float) -> np.ndarray:
        """u_n(t) / d0 for n = 1..N."""
        drive = np.sin(self.mode_frequencies() * t + np.array(self.mode_phases))
        return drive @ self._weights

    def bond_amplitudes(self) -> np.ndarray:
        """Per-mode relative bond extension amplitudes, shape (N, N-1)."""
        return self._weights[:, 1:] - self._weights[:, :-1]

    def longest_active_period(self) -> float:
        freqs = self.mode_frequencies()
        active = [freqs[q - 1] for q in self.active_modes]
        return 2.0 * np.pi / min(active) if active else math.inf

    def _check_positive_geometry(self) -> None:
        bond_amp = np.abs(self.bond_amplitudes())
        if bond_amp.max(axis=1).sum() < 1.0:
            return
        period = self.longest_active_period()
        for t in np.linspace(0.0, period, _PERIOD_SAMPLES, endpoint=False):
            u = self.relative_displacements(t)
            rel = 1.0 + (u[1:] - u[:-1])
            if rel.min() <= 0.0:
                bond = int(np.argmin(rel)) + 1
                raise PositivityViolation(
                    f"normal-mode geometry collapses bond {bond} at t={t:.6g} "
                    f"(d/d0={rel.min():.6g}); reduce the mode amplitudes"
                )

    def check(self, spec: ChainSpec) -> None:
        if self.n_sites != spec.n_sites:
            raise DimensionMismatch(
                f"normal-mode profile has {self.n_sites} sites, chain has {spec.n_sites}"
            )

    def with_frequency(self, omega: float) -> "NormalMode":
        return replace(self, omega0=omega)

    def with_mode_frequency(self, q: int, omega_q: float) -> "NormalMode":
        """Copy whose omega0 gives mode q the frequency omega_q."""
        if self.boundary is Boundary.CONFINED:
            factor = 2.0 * math.sin(q * math.pi / (2.0 * (self.n_sites + 1)))
        else:
            factor = 2.0 * math.sin(q * math.pi / (2.0 * self.n_sites))
        return replace(self, omega0=omega_q / factor)

    def with_phase(self, phi: float) -> "NormalMode":
        phases = [phi if a != 0.0 else p for a, p in zip(self.mode_amplitudes, self.mode_phases)]
        return replace(self, mode_phases=tuple(phases))

    def with_amplitude(self, a: float) -> "NormalMode":
        if not self.active_modes:
            raise ConfigurationError("no active mode to rescale")
        amplitudes = [a if x != 0.0 else 0.0 for x in self.mode_amplitudes]
        return replace(self, mode_amplitudes=tuple(amplitudes))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "boundary": self.boundary.value,
            "omega0": self.omega0,
            "mode_amplitudes": list(self.mode_amplitudes),
            "mode_phases": list(self.mode_phases),
        }


@dataclass(frozen=True)
class GaussianPulse:
    """Compression pulse travelling along the chain, centered on bond 1 at t=0."""
    strength: float
    width: float
    speed: float

    kind: ClassVar[MotionKind] = MotionKind.PULSE

    def __post_init__(self):
        if not (0.0 <= self.strength < 1.0):
            raise ConfigurationError(f"pulse strength A={self.strength} violates 0 <= A < 1")
        if not (math.isfinite(self.width) and self.width > 0):
            raise ConfigurationError(f"pulse width sigma must be > 0, got {self.width}")
        if not (math.isfinite(self.speed) and self.speed >= 0):
            raise ConfigurationError(f"pulse speed v must be >= 0, got {self.speed}")

    def check(self, spec: ChainSpec) -> None:
        return None

    def with_frequency(self, omega: float) -> "GaussianPulse":
        raise NotApplicable("a pulse has no oscillation frequency")

    def with_phase(self, phi: float) -> "GaussianPulse":
        raise NotApplicable("a pulse has no phase")

    def with_amplitude(self, a: float) -> "GaussianPulse":
        return replace(self, strength=a)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "strength": self.strength,
            "width": self.width,
            "speed": self.speed,
        }


MotionProfile = Union[StaticProfile, PairwiseSinusoid, NormalMode, GaussianPulse]


@dataclass(frozen=True)
class VibronicCoupling:
    """Exciton-vibration detuning chi * (u_{n+1} - u_n) on site n."""
    chi: float = 10.0
    enabled: bool = False

    def __post_init__(self):
        if not math.isfinite(self.chi):
            raise ConfigurationError(f"chi must be finite, got {self.chi}")

    def to_dict(self) -> Dict[str, Any]:
        return {"chi": self.chi, "enabled": self.enabled}


@dataclass(frozen=True)
class HamiltonianSnapshot:
    """Real symmetric tridiagonal single-excitation Hamiltonian at one instant."""
    diagonal: np.ndarray
    couplings: np.ndarray

    def __post_init__(self):
        if len(self.couplings) != len(self.diagonal) - 1:
            raise DimensionMismatch(
                f"{len(self.diagonal)} site energies need {len(self.diagonal) - 1} couplings"
            )
        if not np.all(self.couplings > 0):
            raise PositivityViolation("couplings must all be > 0")

    @property
    def n_sites(self) -> int:
        return len(self.diagonal)

    def matrix(self, with_sink: bool = False) -> np.ndarray:
        """Dense matrix; the optional sink row/column is zero."""
        n = self.n_sites
        dim = n + 1 if with_sink else n
        h = np.zeros((dim, dim))
        h[np.arange(n), np.arange(n)] = self.diagonal
        h[np.arange(n - 1), np.arange(1, n)] = self.couplings
        h[np.arange(1, n), np.arange(n - 1)] = self.couplings
        return h


# Geometry

def _check_site(spec: ChainSpec, n: int) -> None:
    if not 1 <= n <= spec.n_sites:
        raise ConfigurationError(f"site index {n} outside 1..{spec.n_sites}")


def _check_bond(spec: ChainSpec, n: int) -> None:
    if not 1 <= n <= spec.n_bonds:
        raise ConfigurationError(f"bond index {n} outside 1..{spec.n_bonds}")


def displacements(profile: MotionProfile, spec: ChainSpec, t: float) -> np.ndarray:
    """Per-site displacements u_n(t), n = 1..N (normal modes only)."""
    if not isinstance(profile, NormalMode):
        raise NotApplicable(
            f"{profile.kind.value} geometry is defined per bond, not per site"
        )
    profile.check(spec)
    return spec.d0 * profile.relative_displacements(t)


def displacement_at(profile: MotionProfile, spec: ChainSpec, n: int, t: float) -> float:
    """u_n(t) of site n for a normal-mode profile."""
    _check_site(spec, n)
    return float(displacements(profile, spec, t)[n - 1])


def bond_extensions(profile: MotionProfile, spec: ChainSpec, t: float) -> np.ndarray:
    """u_{n+1}(t) - u_n(t) = d_n(t) - d0 for every bond."""
    profile.check(spec)
    if isinstance(profile, PairwiseSinusoid):
        a = np.array(profile.amplitudes)
        return -2.0 * a * spec.d0 * np.sin(profile.omega * t + np.array(profile.phases))
    if isinstance(profile, NormalMode):
        u = displacements(profile, spec, t)
        return u[1:] - u[:-1]
    raise NotApplicable(f"{profile.kind.value} profile provides no site displacements")


def pair_distances(profile: MotionProfile, spec: ChainSpec, t: float) -> np.ndarray:
    """d_n(t) for every bond n = 1..N-1."""
    profile.check(spec)
    if isinstance(profile, StaticProfile):
        d = spec.d0 * profile.scales(spec) ** (-1.0 / 3.0)
    elif isinstance(profile, (PairwiseSinusoid, NormalMode)):
        d = spec.d0 + bond_extensions(profile, spec, t)
    elif isinstance(profile, GaussianPulse):
        x = np.arange(spec.n_bonds) * spec.d0
        bump = np.exp(-((x - profile.speed * t) ** 2) / (2.0 * profile.width ** 2))
        d = spec.d0 - profile.strength * spec.d0 * bump
    else:
        raise NotApplicable(f"unknown motion profile {type(profile).__name__}")

    if np.any(d <= 0.0):
        bond = int(np.argmin(d)) + 1
        raise PositivityViolation(f"bond {bond} distance {d[bond - 1]:.6g} <= 0 at t={t:.6g}")
    return d


def pair_distance(profile: MotionProfile, spec: ChainSpec, n: int, t: float) -> float:
    """Distance between sites n and n+1 at time t."""
    _check_bond(spec, n)
    return float(pair_distances(profile, spec, t)[n - 1])


def couplings_at(profile: MotionProfile, spec: ChainSpec, t: float) -> np.ndarray:
    """J_n(t) = J0 (d0 / d_n(t))^3 for every bond."""
    if isinstance(profile, StaticProfile):
        return spec.j0 * profile.scales(spec)
    return spec.j0 * (spec.d0 / pair_distances(profile, spec, t)) ** 3


def coupling_at(profile: MotionProfile, spec: ChainSpec, n: int, t: float) -> float:
    _check_bond(spec, n)
    return float(couplings_at(profile, spec, t)[n - 1])


def distance_ratio_function(profile: MotionProfile, spec: ChainSpec) -> Callable[[float], np.ndarray]:
    """
    Compiled d_n(t) / d0 for every bond.

    Checks and per-profile constants are resolved once, so the returned
    callable is cheap enough for the propagator's right-hand side. It still
    raises PositivityViolation when a bond collapses.
    """
    profile.check(spec)
    if isinstance(profile, StaticProfile):
        fixed = profile.scales(spec) ** (-1.0 / 3.0)

        def ratio(t: float) -> np.ndarray:
            return fixed

        return ratio

    if isinstance(profile, PairwiseSinusoid):
        two_a = 2.0 * np.array(profile.amplitudes)
        phases = np.array(profile.phases)
        omega = profile.omega

        def raw(t: float) -> np.ndarray:
            return 1.0 - two_a * np.sin(omega * t + phases)

    elif isinstance(profile, NormalMode):
        rows = [q - 1 for q in profile.active_modes]
        freqs = profile.mode_frequencies()[rows]
        phases = np.array(profile.mode_phases)[rows]
        bond_amp = profile.bond_amplitudes()[rows]

        def raw(t: float) -> np.ndarray:
            return 1.0 + np.sin(freqs * t + phases) @ bond_amp

    elif isinstance(profile, GaussianPulse):
        x = np.arange(spec.n_bonds) * spec.d0
        strength, speed = profile.strength, profile.speed
        two_sigma_sq = 2.0 * profile.width ** 2

        def raw(t: float) -> np.ndarray:
            return 1.0 - strength * np.exp(-((x - speed * t) ** 2) / two_sigma_sq)

    else:
        raise NotApplicable(f"unknown motion profile {type(profile).__name__}")

    def ratio(t: float) -> np.ndarray:
        r = raw(t)
        if r.min() <= 0.0:
            bond = int(np.argmin(r)) + 1
            raise PositivityViolation(
                f"bond {bond} distance {spec.d0 * r[bond - 1]:.6g} <= 0 at t={t:.6g}"
            )
        return r

    return ratio


def hamiltonian_at(
    profile: MotionProfile,
    spec: ChainSpec,
    vib: VibronicCoupling,
    t: float,
) -> HamiltonianSnapshot:
    """
    Instantaneous Hamiltonian.

    With vibronic coupling on, site n < N is detuned by chi (u_{n+1} - u_n);
    site N reuses the last bond, chi (u_N - u_{N-1}).
    """
    diagonal = spec.energies()
    if vib.enabled:
        ext = bond_extensions(profile, spec, t)
        diagonal = diagonal + vib.chi * np.append(ext, ext[-1])
    return HamiltonianSnapshot(diagonal=diagonal, couplings=couplings_at(profile, spec, t))


# Coupling statistics

def time_averaged_coupling(a: float, j0: float = 1.0) -> float:
    """Period average of J0 / (1 - 2a sin)^3: J0 (1 + 2a^2) / (1 - 4a^2)^(5/2)."""
    if not (0.0 <= a < 0.5):
        raise DomainError(f"time-averaged coupling needs 0 <= a < 1/2, got a={a}")
    return j0 * (1.0 + 2.0 * a * a) / (1.0 - 4.0 * a * a) ** 2.5


def mode_frequency(profile: NormalMode, q: int) -> float:
    """omega_q of normal mode q (1-based)."""
    if not 1 <= q <= profile.n_sites:
        raise ConfigurationError(f"mode index q={q} outside 1..{profile.n_sites}")
    return float(profile.mode_frequencies()[q - 1])


def _sampled_couplings(profile: MotionProfile, spec: ChainSpec, period: float, periods: int) -> np.ndarray:
    times = np.linspace(0.0, periods * period, periods * _PERIOD_SAMPLES, endpoint=False)
    return np.array([couplings_at(profile, spec, t) for t in times]) / spec.j0


def max_coupling_scales(profile: MotionProfile, spec: ChainSpec) -> np.ndarray:
    """Per-bond J_{n,max} / J0 over the motion."""
    profile.check(spec)
    if isinstance(profile, StaticProfile):
        return profile.scales(spec)
    if isinstance(profile, PairwiseSinusoid):
        return 1.0 / (1.0 - 2.0 * np.array(profile.amplitudes)) ** 3
    if isinstance(profile, GaussianPulse):
        return np.full(spec.n_bonds, 1.0 / (1.0 - profile.strength) ** 3)
    active = profile.active_modes
    if not active:
        return np.ones(spec.n_bonds)
    if len(active) == 1:
        c = np.abs(profile.bond_amplitudes()[active[0] - 1])
        return 1.0 / (1.0 - c) ** 3
    return _sampled_couplings(profile, spec, profile.longest_active_period(), 1).max(axis=0)


def average_coupling_scales(profile: MotionProfile, spec: ChainSpec) -> np.ndarray:
    """Per-bond time-averaged J_n / J0."""
    profile.check(spec)
    if isinstance(profile, StaticProfile):
        return profile.scales(spec)
    if isinstance(profile, PairwiseSinusoid):
        return np.array([time_averaged_coupling(a) for a in profile.amplitudes])
    if isinstance(profile, GaussianPulse):
        raise NotApplicable("a travelling pulse has no time-averaged coupling")
    active = profile.active_modes
    if not active:
        return np.ones(spec.n_bonds)
    if len(active) == 1:
        c = np.abs(profile.bond_amplitudes()[active[0] - 1])
        return np.array([time_averaged_coupling(x / 2.0) for x in c])
    # Incommensurate superpositions: long-window average.
    return _sampled_couplings(profile, spec, profile.longest_active_period(), 64).mean(axis=0)


def shortest_period(profile: MotionProfile, spec: ChainSpec) -> float:
    """Fastest time scale of the geometry (inf when static)."""
    if isinstance(profile, PairwiseSinusoid):
        return 2.0 * math.pi / profile.omega if profile.omega > 0 else math.inf
    if isinstance(profile, NormalMode):
        freqs = profile.mode_frequencies()
        active = [freqs[q - 1] for q in profile.active_modes]
        return 2.0 * math.pi / max(active) if active else math.inf
    if isinstance(profile, GaussianPulse):
        return profile.width / profile.speed if profile.speed > 0 else math.inf
    return math.inf


__all__ = [
    "ChainSpec", "MotionKind", "Boundary", "MotionProfile",
    "StaticProfile", "PairwiseSinusoid", "NormalMode", "GaussianPulse",
    "VibronicCoupling", "HamiltonianSnapshot",
    "displacements", "displacement_at", "bond_extensions",
    "pair_distances", "pair_distance", "couplings_at", "coupling_at",
    "distance_ratio_function", "hamiltonian_at", "time_averaged_coupling", "mode_frequency",
    "max_coupling_scales", "average_coupling_scales", "shortest_period",
]

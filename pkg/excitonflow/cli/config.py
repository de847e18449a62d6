"""
Experiment configuration.

One pydantic model with a section per concern. Every section rejects
unknown keys. Files are flat `section.key = value` text (arrays as
comma-separated values), nested YAML, or a run manifest, which carries the
resolved flat config under `config`.
"""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Mapping, Optional, Sequence

import yaml
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, ValidationError, field_validator

from excitonflow.core.dynamics import ChannelSpec, IntegratorConfig
from excitonflow.core.errors import ConfigurationError, ExcitonFlowError
from excitonflow.core.model import (
    Boundary,
    ChainSpec,
    GaussianPulse,
    MotionProfile,
    NormalMode,
    PairwiseSinusoid,
    StaticProfile,
    VibronicCoupling,
)
from excitonflow.core.sweeps import FrequencyAxis, ReferenceKind, Scenario

logger = logging.getLogger(__name__)

PRESETS_PATH = Path(__file__).resolve().parent.parent / "configs" / "presets.yaml"
WORKERS_ENV = "EXCITON_WORKERS"

NonNegative = Annotated[float, Field(ge=0)]

EXPERIMENTS = (
    "dimer-sweep",
    "dimer-phase-ensemble",
    "dimer-amplitude",
    "chain-modes",
    "chain-length-scan",
    "dephasing-scan",
    "pulse-grid",
    "pulse-dephasing",
    "classical-compare",
    "trajectory",
)


def _split(value: Any) -> Any:
    """'1, 2,3' -> ['1', '2', '3']; '' -> None."""
    if isinstance(value, str):
        parts = [p.strip() for p in value.split(",")]
        parts = [p for p in parts if p]
        return parts or None
    return value


FloatList = Annotated[List[float], BeforeValidator(_split)]
RateList = Annotated[List[NonNegative], BeforeValidator(_split)]
SizeList = Annotated[List[Annotated[int, Field(ge=2)]], BeforeValidator(_split)]
ModeList = Annotated[List[Annotated[int, Field(ge=1)]], BeforeValidator(_split)]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ChainSection(_Section):
    n_sites: int = Field(default=2, ge=2)
    d0: float = Field(default=1.0, gt=0)
    j0: float = Field(default=1.0, gt=0)
    epsilon: FloatList = Field(default_factory=lambda: [0.0])


class ChannelsSection(_Section):
    gamma: RateList = Field(default_factory=lambda: [0.1])
    gamma_sink: float = Field(default=0.5, ge=0)
    gamma_deph: float = Field(default=0.0, ge=0)


class MotionSection(_Section):
    kind: Literal["static", "pairwise", "normal_mode", "pulse"] = "pairwise"
    scale: float = Field(default=1.0, gt=0)
    bond_scales: Optional[FloatList] = None
    a: float = Field(default=0.25, ge=0)
    omega: float = Field(default=4.54, ge=0)
    phi: float = 1.5707963267948966
    boundary: Literal["confined", "open"] = "open"
    omega0: float = Field(default=1.0, gt=0)
    mode: int = Field(default=1, ge=1)
    mode_amplitudes: Optional[FloatList] = None
    mode_phases: Optional[FloatList] = None
    strength: float = Field(default=1.0 / 6.0, ge=0)
    width: float = Field(default=1.0, gt=0)
    speed: float = Field(default=2.53, ge=0)


class VibronicSection(_Section):
    enabled: bool = False
    chi: float = 10.0


class IntegratorSection(_Section):
    rel_tol: float = Field(default=1e-8, gt=0)
    abs_tol: float = Field(default=1e-10, gt=0)
    t_max: float = Field(default=500.0, gt=0)
    convergence_tol: float = Field(default=1e-9, gt=0)
    method: Literal["RK45", "DOP853"] = "DOP853"
    sample_dt: float = Field(default=0.1, gt=0)
    max_step: float = Field(default=float("inf"), gt=0)


class SweepSection(_Section):
    omega_min: float = Field(default=0.5, ge=0)
    omega_max: float = Field(default=20.0, gt=0)
    omega_step: float = Field(default=0.02, gt=0)
    opt_step: float = Field(default=0.1, gt=0)
    reference: Literal["j_max", "j_avg", "j0"] = "j_max"
    axis: Literal["drive", "mode"] = "drive"
    n_phases: int = Field(default=50, ge=1)
    phase_offset: float = 0.0
    amplitudes: RateList = Field(
        default_factory=lambda: [0.02, 0.05, 0.1, 0.15, 0.2, 0.25]
    )


class ScanSection(_Section):
    n_sites: SizeList = Field(default_factory=lambda: list(range(4, 14)))
    a_per_site: float = Field(default=1.0 / 48.0, ge=0)
    critical_dephasing: bool = False
    modes: ModeList = Field(default_factory=lambda: [1, 2, 13])
    gamma_grid: RateList = Field(default_factory=lambda: [0.0, 0.05, 0.1, 0.2, 0.5, 1.0])
    gamma_max: float = Field(default=10.0, gt=0)


class PulseSection(_Section):
    v_min: float = Field(default=0.0, ge=0)
    v_max: float = Field(default=6.0, ge=0)
    v_step: float = Field(default=0.25, gt=0)
    sigma_min: float = Field(default=0.5, gt=0)
    sigma_max: float = Field(default=6.0, gt=0)
    sigma_step: float = Field(default=0.5, gt=0)
    refine: bool = True
    rounds: int = Field(default=3, ge=0)


class ClassicalSection(_Section):
    hop_scale: float = Field(default=1.0, gt=0)


class TrajectorySection(_Section):
    model: Literal["quantum", "classical"] = "quantum"


_SECTIONS = (
    "chain", "channels", "motion", "vibronic", "integrator",
    "sweep", "scan", "pulse", "classical", "trajectory",
)


class ExperimentConfig(_Section):
    """Resolved parameters of one run."""
    experiment: Optional[Literal[EXPERIMENTS]] = None
    output: Optional[str] = None
    workers: int = Field(default=1, ge=1)

    chain: ChainSection = Field(default_factory=ChainSection)
    channels: ChannelsSection = Field(default_factory=ChannelsSection)
    motion: MotionSection = Field(default_factory=MotionSection)
    vibronic: VibronicSection = Field(default_factory=VibronicSection)
    integrator: IntegratorSection = Field(default_factory=IntegratorSection)
    sweep: SweepSection = Field(default_factory=SweepSection)
    scan: ScanSection = Field(default_factory=ScanSection)
    pulse: PulseSection = Field(default_factory=PulseSection)
    classical: ClassicalSection = Field(default_factory=ClassicalSection)
    trajectory: TrajectorySection = Field(default_factory=TrajectorySection)

    @field_validator("output", mode="before")
    @classmethod
    def _empty_output(cls, value: Any) -> Any:
        return None if value == "" else value

    def to_flat(self) -> Dict[str, str]:
        """Dotted keys to text values; from_flat restores an equal config."""
        flat = {}
        for key in ("experiment", "output", "workers"):
            flat[key] = _format_value(getattr(self, key))
        for section in _SECTIONS:
            for key, value in getattr(self, section).model_dump().items():
                flat[f"{section}.{key}"] = _format_value(value)
        return flat

    @classmethod
    def from_flat(cls, flat: Mapping[str, Any]) -> "ExperimentConfig":
        return cls.model_validate(unflatten(flat))


def _format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(_format_value(v) for v in value)
    return str(value)


def unflatten(flat: Mapping[str, Any]) -> Dict[str, Any]:
    """{'chain.n_sites': '2'} -> {'chain': {'n_sites': '2'}}; '' means unset."""
    nested: Dict[str, Any] = {}
    for key, value in flat.items():
        if value == "":
            continue
        parts = key.split(".")
        if len(parts) > 2:
            raise ConfigurationError(f"config key {key!r} nests too deeply")
        if len(parts) == 2:
            section = nested.setdefault(parts[0], {})
            if not isinstance(section, dict):
                raise ConfigurationError(f"config key {key!r} conflicts with {parts[0]!r}")
            section[parts[1]] = value
        else:
            nested[key] = value
    return nested


def flatten(data: Mapping[str, Any], prefix: str = "") -> Dict[str, str]:
    """Nested mapping -> dotted keys with text values."""
    flat = {}
    for key, value in data.items():
        name = f"{prefix}{key}"
        if isinstance(value, Mapping):
            flat.update(flatten(value, f"{name}."))
        else:
            flat[name] = _format_value(value)
    return flat


def parse_flat_text(text: str, source: str = "<config>") -> Dict[str, str]:
    flat = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = line.split("=", 1)
        flat[key.strip()] = value.strip()
    return flat


def load_config_file(path: str) -> Dict[str, str]:
    """Flat dotted config from a text file, YAML file or run manifest."""
    p = Path(path)
    if not p.is_file():
        raise ConfigurationError(f"config file not found: {path}")
    content = p.read_text()
    if p.suffix in (".yaml", ".yml"):
        data = yaml.safe_load(content) or {}
        if not isinstance(data, Mapping):
            raise ConfigurationError(f"{path}: expected a mapping at top level")
        if isinstance(data.get("config"), Mapping) and "outputs" in data:
            return {k: "" if v is None else str(v) for k, v in data["config"].items()}
        return flatten(data)
    return parse_flat_text(content, str(p))


def load_presets(path: Path = PRESETS_PATH) -> Dict[str, Dict[str, Any]]:
    with open(path, "r") as f:
        return yaml.safe_load(f) or {}


def parse_override(item: str) -> tuple:
    if "=" not in item:
        raise ConfigurationError(f"--set expects key=value, got {item!r}")
    key, value = item.split("=", 1)
    return key.strip(), value.strip()


def resolve_config(
    experiment: str,
    config_path: Optional[str] = None,
    overrides: Sequence[str] = (),
    out: Optional[str] = None,
    workers: Optional[int] = None,
) -> ExperimentConfig:
    """Preset <- config file <- --set overrides <- flags."""
    presets = load_presets()
    if experiment not in presets:
        raise ConfigurationError(
            f"unknown experiment {experiment!r}; choose one of {', '.join(EXPERIMENTS)}"
        )
    flat: Dict[str, str] = {}
    env_workers = os.environ.get(WORKERS_ENV)
    if env_workers:
        flat["workers"] = env_workers
    flat.update(flatten(presets[experiment] or {}))
    if config_path:
        flat.update(load_config_file(config_path))
    for item in overrides:
        key, value = parse_override(item)
        flat[key] = value
    flat["experiment"] = experiment
    if out is not None:
        flat["output"] = out
    if workers is not None:
        flat["workers"] = str(workers)
    return ExperimentConfig.from_flat(flat)


# Domain objects

def build_chain(cfg: ExperimentConfig) -> ChainSpec:
    section = cfg.chain
    energies = section.epsilon
    if len(energies) == 1:
        energies = energies * section.n_sites
    return ChainSpec(section.n_sites, section.d0, tuple(energies), section.j0)


def build_channels(cfg: ExperimentConfig) -> ChannelSpec:
    gammas = cfg.channels.gamma
    if len(gammas) == 1:
        gammas = gammas * cfg.chain.n_sites
    return ChannelSpec(tuple(gammas), cfg.channels.gamma_sink, cfg.channels.gamma_deph)


def build_motion(cfg: ExperimentConfig) -> MotionProfile:
    m = cfg.motion
    n = cfg.chain.n_sites
    if m.kind == "static":
        return StaticProfile(scale=m.scale, bond_scales=None if m.bond_scales is None else tuple(m.bond_scales))
    if m.kind == "pairwise":
        return PairwiseSinusoid.uniform(n - 1, m.a, m.omega, m.phi)
    if m.kind == "normal_mode":
        if m.mode_amplitudes is not None:
            phases = m.mode_phases if m.mode_phases is not None else [0.0] * len(m.mode_amplitudes)
            return NormalMode(Boundary(m.boundary), m.omega0, tuple(m.mode_amplitudes), tuple(phases))
        return NormalMode.single(n, m.mode, m.a, Boundary(m.boundary), m.omega0, m.phi)
    return GaussianPulse(strength=m.strength, width=m.width, speed=m.speed)


def build_integrator(cfg: ExperimentConfig) -> IntegratorConfig:
    return IntegratorConfig(**cfg.integrator.model_dump())


def build_scenario(cfg: ExperimentConfig) -> Scenario:
    return Scenario(
        chain=build_chain(cfg),
        motion=build_motion(cfg),
        channels=build_channels(cfg),
        vibronic=VibronicCoupling(chi=cfg.vibronic.chi, enabled=cfg.vibronic.enabled),
        integrator=build_integrator(cfg),
    )


def reference_kind(cfg: ExperimentConfig) -> ReferenceKind:
    return ReferenceKind(cfg.sweep.reference)


def frequency_axis(cfg: ExperimentConfig) -> FrequencyAxis:
    return FrequencyAxis(cfg.sweep.axis)


def diagnose(flat: Mapping[str, Any]) -> List[str]:
    """Every problem found in a flat config, without running anything."""
    try:
        cfg = ExperimentConfig.from_flat(flat)
    except ValidationError as exc:
        return [
            f"{'.'.join(str(part) for part in err['loc'])}: {err['msg']}"
            for err in exc.errors()
        ]
    except ConfigurationError as exc:
        return [str(exc)]

    problems = []
    for name, builder in [
        ("chain", build_chain),
        ("channels", build_channels),
        ("motion", build_motion),
        ("integrator", build_integrator),
    ]:
        try:
            builder(cfg)
        except ExcitonFlowError as exc:
            problems.append(f"{name}: {exc}")
    if not problems:
        try:
            build_scenario(cfg)
        except ExcitonFlowError as exc:
            problems.append(f"scenario: {exc}")
    if cfg.sweep.omega_max < cfg.sweep.omega_min:
        problems.append("sweep: omega_max must not be below omega_min")
    if cfg.pulse.v_max < cfg.pulse.v_min or cfg.pulse.sigma_max < cfg.pulse.sigma_min:
        problems.append("pulse: grid maxima must not be below minima")
    return problems


__all__ = [
    "EXPERIMENTS", "ExperimentConfig", "flatten", "unflatten", "parse_flat_text",
    "load_config_file", "load_presets", "resolve_config",
    "build_chain", "build_channels", "build_motion", "build_integrator", "build_scenario",
    "reference_kind", "frequency_axis", "diagnose",
]

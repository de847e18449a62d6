"""
ExcitonFlow Provenance

Run manifests with SHA-256 hashes of the resolved configuration and of
every emitted file, plus an environment fingerprint.
"""
from __future__ import annotations

import hashlib
import json
import platform
import subprocess
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Optional

import yaml


def _canon(obj: Any) -> str:
    """Canonical JSON serialization for deterministic hashing."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def sha256_hex(s: str) -> str:
    return hashlib.sha256(s.encode("utf-8")).hexdigest()


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def config_hash(flat_config: Dict[str, str]) -> str:
    return sha256_hex(_canon(flat_config))


def utc_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def try_git_head() -> Optional[str]:
    """Current Git HEAD, or None outside a checkout."""
    try:
        out = subprocess.check_output(
            ["git", "rev-parse", "HEAD"], stderr=subprocess.DEVNULL
        )
        return out.decode("utf-8").strip()
    except Exception:
        return None


def env_fingerprint() -> Dict[str, Any]:
    import numpy
    import scipy

    return {
        "python": sys.version.split()[0],
        "platform": platform.platform(),
        "numpy": numpy.__version__,
        "scipy": scipy.__version__,
        "git_head": try_git_head(),
    }


@dataclass
class RunManifest:
    """Everything needed to re-run an experiment and check its outputs."""
    experiment: str
    config: Dict[str, str]
    version: str
    started_utc: str = field(default_factory=utc_iso)
    wall_time_s: float = 0.0
    outputs: Dict[str, str] = field(default_factory=dict)
    env: Dict[str, Any] = field(default_factory=env_fingerprint)

    @property
    def config_hash(self) -> str:
        return config_hash(self.config)

    @property
    def run_id(self) -> str:
        return sha256_hex(
            _canon(
                {
                    "experiment": self.experiment,
                    "config_hash": self.config_hash,
                    "started_utc": self.started_utc,
                }
            )
        )[:16]

    def add_output(self, path: Path) -> None:
        self.outputs[Path(path).name] = sha256_file(Path(path))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "experiment": self.experiment,
            "run_id": self.run_id,
            "version": self.version,
            "started_utc": self.started_utc,
            "wall_time_s": round(self.wall_time_s, 3),
            "config_hash": self.config_hash,
            "config": dict(self.config),
            "outputs": dict(self.outputs),
            "env": self.env,
        }

    def write(self, path: Path) -> Path:
        with open(path, "w") as f:
            yaml.safe_dump(self.to_dict(), f, sort_keys=False, default_flow_style=False)
        return Path(path)


__all__ = ["sha256_hex", "sha256_file", "config_hash", "utc_iso", "env_fingerprint", "RunManifest"]

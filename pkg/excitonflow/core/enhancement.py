"""Enhancement metrics shared by the quantum and classical sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Sequence


class ReferenceKind(str, Enum):
    """Static chain a moving chain is compared against."""
    J_MAX = "j_max"
    J_AVG = "j_avg"
    J0 = "j0"


@dataclass(frozen=True)
class EnhancementPoint:
    """One swept parameter value: delta = p_sink - p_static_ref."""
    param: float
    p_sink: float
    p_static_ref: float
    baseline_kind: ReferenceKind

    @property
    def delta(self) -> float:
        return self.p_sink - self.p_static_ref

    @property
    def gain_ratio(self) -> float:
        if self.p_static_ref == 0.0:
            return math.inf if self.p_sink > 0 else math.nan
        return self.p_sink / self.p_static_ref

    def to_dict(self) -> Dict[str, Any]:
        return {
            "param": self.param,
            "p_sink": self.p_sink,
            "baseline_kind": self.baseline_kind.value,
            "baseline_value": self.p_static_ref,
            "delta": self.delta,
        }


def best_point(points: Sequence[EnhancementPoint]) -> EnhancementPoint:
    """Point with the largest delta (first one on ties)."""
    if not points:
        raise ValueError("no points")
    return max(points, key=lambda p: p.delta)


__all__ = ["ReferenceKind", "EnhancementPoint", "best_point"]

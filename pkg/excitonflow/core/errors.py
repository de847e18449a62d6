"""
ExcitonFlow error hierarchy.

Configuration problems derive from ValueError, numerical failures from
RuntimeError, so callers that only know the builtins still catch them.
"""

from __future__ import annotations

from typing import Any


class ExcitonFlowError(Exception):
    """Root of all excitonflow errors."""


class ConfigurationError(ExcitonFlowError, ValueError):
    """Invalid parameters for a domain type or operation."""


class DomainError(ConfigurationError):
    """Argument outside the domain of a closed-form expression."""


class DimensionMismatch(ConfigurationError):
    """Array length inconsistent with the chain size."""


class GammaConditionViolated(ConfigurationError):
    """Dimer closed forms need gamma1 == gamma2 + gamma_sink and equal site energies."""


class NotApplicable(ConfigurationError):
    """Operation undefined for this motion profile variant."""


class NumericalError(ExcitonFlowError, RuntimeError):
    """Failure while computing."""


class PositivityViolation(NumericalError):
    """A distance or population left its admissible range."""


class StepSizeUnderflow(NumericalError):
    """Adaptive step control stalled."""


class NoMaximumInBracket(NumericalError):
    """Coarse grid maximum sits on the bracket edge."""


class NoSignChange(NumericalError):
    """Root bracket does not change sign."""


class GridPointError(NumericalError):
    """A numerical failure at one point of a sweep grid."""

    def __init__(self, label: str, value: Any, cause: BaseException):
        self.label = label
        self.value = value
        self.cause = cause
        super().__init__(f"{label}={value}: {type(cause).__name__}: {cause}")

    def __reduce__(self):
        # Survives the trip back from a pool worker.
        return (type(self), (self.label, self.value, self.cause))


__all__ = [
    "ExcitonFlowError", "ConfigurationError", "DomainError", "DimensionMismatch",
    "GammaConditionViolated", "NotApplicable", "NumericalError",
    "PositivityViolation", "StepSizeUnderflow", "NoMaximumInBracket",
    "NoSignChange", "GridPointError",
]

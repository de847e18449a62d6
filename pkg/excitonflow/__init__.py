"""
ExcitonFlow - Exciton Transfer on Moving Molecular Chains

Propagates a single excitation along a chain of mechanically driven
molecules under a time-dependent Lindblad master equation and measures how
much the motion raises the efficiency of delivery into a sink, against
static and classical hopping baselines.
"""

__version__ = "1.0.0"
__license__ = "Apache-2.0"

from excitonflow.core.model import (
    ChainSpec,
    NormalMode,
    PairwiseSinusoid,
    GaussianPulse,
    StaticProfile,
    VibronicCoupling,
)
from excitonflow.core.dynamics import ChannelSpec, IntegratorConfig, propagate
from excitonflow.core.sweeps import Scenario, frequency_sweep

__all__ = [
    "ChainSpec",
    "NormalMode",
    "PairwiseSinusoid",
    "GaussianPulse",
    "StaticProfile",
    "VibronicCoupling",
    "ChannelSpec",
    "IntegratorConfig",
    "propagate",
    "Scenario",
    "frequency_sweep",
]

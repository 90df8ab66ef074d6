"""
smcdma Models Package

Domain types shared by the services: signal-model values, receiver and
estimator state, bound state, experiment configuration and reports.

Key Models:
- SpreadingCode, ConvolutionMatrix, ChannelState, SymbolRecord: signal model
- ReceiverWeights, ApState, BeaconState, RlsState, UpdateOutcome: receivers
- BoundState, EstimatorState: bound controllers and interference tracker
- AlgorithmSpec, ExperimentConfig: experiment configuration
- StabilityReport, RunArtifact, RunResult: reports and per-run results
"""

from .config import AlgorithmSpec, ExperimentConfig
from .errors import (
    ConfigError,
    DegenerateEstimateError,
    DegenerateInputError,
    DimensionError,
    EmptyWindowError,
    IllConditionedWindowError,
    NumericalError,
    SmCdmaError,
    StateCorruptionError,
    UndefinedSinrError,
    UnsupportedDegreeError,
)
from .filters import ApState, BeaconState, ReceiverWeights, RlsState, UpdateOutcome
from .reports import RunArtifact, StabilityReport
from .results import RunResult
from .signal import ChannelState, ConvolutionMatrix, SpreadingCode, SymbolRecord
from .tracking import BoundState, EstimatorState

__all__ = [
    "AlgorithmSpec",
    "ExperimentConfig",
    "ConfigError",
    "DegenerateEstimateError",
    "DegenerateInputError",
    "DimensionError",
    "EmptyWindowError",
    "IllConditionedWindowError",
    "NumericalError",
    "SmCdmaError",
    "StateCorruptionError",
    "UndefinedSinrError",
    "UnsupportedDegreeError",
    "ApState",
    "BeaconState",
    "ReceiverWeights",
    "RlsState",
    "UpdateOutcome",
    "RunArtifact",
    "RunResult",
    "StabilityReport",
    "ChannelState",
    "ConvolutionMatrix",
    "SpreadingCode",
    "SymbolRecord",
    "BoundState",
    "EstimatorState",
]

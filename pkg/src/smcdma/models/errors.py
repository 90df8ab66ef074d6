"""
Error Hierarchy - Exceptions Raised by the smcdma Library

All library failures derive from SmCdmaError. Numerical failures (degenerate
inputs, lost positive-definiteness, undefined metrics) additionally derive from
NumericalError so the CLI can map them to a dedicated exit status.
"""


class SmCdmaError(Exception):
    """Base class for every error raised by the library."""


class ConfigError(SmCdmaError):
    """Invalid experiment configuration or algorithm/parameter combination."""


class NumericalError(SmCdmaError):
    """Base class for runtime numerical failures."""


class UnsupportedDegreeError(NumericalError, ValueError):
    """Shift-register degree without a known preferred pair."""


class DimensionError(NumericalError, ValueError):
    """Inputs with inconsistent shapes (e.g. mismatched number of users)."""


class DegenerateInputError(NumericalError):
    """Zero-energy observation vector where an update was required."""


class IllConditionedWindowError(NumericalError):
    """Affine-projection window matrix too close to singular."""


class StateCorruptionError(NumericalError):
    """Inverse-correlation matrix lost positive-definiteness."""


class DegenerateEstimateError(NumericalError):
    """Zero RAKE vector or zero spreading code."""


class UndefinedSinrError(NumericalError):
    """SINR requested with a non-positive interference denominator."""


class EmptyWindowError(NumericalError, ValueError):
    """Metric requested over an empty symbol window."""

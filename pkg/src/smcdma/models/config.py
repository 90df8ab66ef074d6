"""
Experiment Configuration Models

Pydantic models describing a Monte-Carlo experiment: the scenario, the DS-CDMA
system parameters, the sweep grids and the list of adaptive algorithms with
their tuning constants. Defaults follow the simulation setup the library was
built to reproduce (Gold codes of length 31, three-path channels at 0/-3/-6 dB,
200 training symbols, 1500-symbol packets, 100 runs).

Key Features:
- Flat TOML configuration files (one ``key = value`` per line)
- Compact algorithm strings, e.g. ``"sm-ap:pidb(P=3, alpha=5)"``
- Precedence: defaults < config file < explicit overrides (CLI flags)
- Full effective-parameter echo for run manifests
"""

import re

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from .errors import ConfigError

Scenario = Literal[
    "interference-tracking",
    "sinr-convergence",
    "ber-vs-snr",
    "ber-vs-users",
    "ber-vs-doppler",
]
Family = Literal["nlms", "ap", "rls", "sm-nlms", "sm-ap", "beacon"]
BoundKind = Literal["none", "fixed", "pdb", "pidb"]

BASELINE_FAMILIES = {"nlms", "ap", "rls"}
SET_MEMBERSHIP_FAMILIES = {"sm-nlms", "sm-ap", "beacon"}

_ALGO_PATTERN = re.compile(
    r"^\s*(?P<family>[a-z\-]+)\s*(?::\s*(?P<bound>[a-z]+))?\s*(?:\((?P<params>[^)]*)\))?\s*$"
)

# Algorithm sets of the SINR convergence comparisons, keyed by family.
SINR_FAMILIES: Dict[str, Dict[str, Any]] = {
    "nlms": {
        "algorithms": ["nlms", "sm-nlms:fixed", "sm-nlms:pdb", "sm-nlms:pidb"],
        "alpha": 8.0,
        "tau": 2.0,
    },
    "ap": {
        "algorithms": ["ap", "sm-ap:fixed", "sm-ap:pdb", "sm-ap:pidb"],
        "alpha": 8.0,
        "tau": 2.0,
    },
    "beacon": {
        "algorithms": ["rls", "beacon:fixed", "beacon:pdb", "beacon:pidb"],
        "alpha": 5.0,
        "tau": 1.5,
    },
}

DEFAULT_ALGORITHMS: Dict[str, List[str]] = {
    "interference-tracking": ["sm-nlms:pidb"],
    "sinr-convergence": SINR_FAMILIES["nlms"]["algorithms"],
    "ber-vs-snr": ["ap", "sm-ap:fixed", "sm-ap:pdb", "sm-ap:pidb"],
    "ber-vs-users": ["ap", "sm-ap:fixed", "sm-ap:pdb", "sm-ap:pidb"],
    "ber-vs-doppler": ["rls", "beacon:fixed", "beacon:pdb", "beacon:pidb"],
}


class AlgorithmSpec(BaseModel):
    """
    One adaptive receiver configuration.

    Attributes:
        family: Algorithm family
        bound: Error-bound controller ('none' for the baselines)
        mu: Step size of NLMS / AP
        P: Projection order of AP / SM-AP
        delta: Regularisation of AP / SM-AP
        lam: RLS forgetting factor
        epsilon: Initial P matrix is I / epsilon (RLS, BEACON)
        gamma0: Initial/fixed bound; None selects sqrt(5 sigma^2 ||w[0]||^2)
        alpha, beta, tau: Bound recursion constants
    """

    family: Family
    bound: BoundKind = "none"
    mu: float = Field(0.05, gt=0.0)
    P: int = Field(3, ge=1)
    delta: float = Field(1e-6, ge=0.0)
    lam: float = Field(0.997, gt=0.0, le=1.0)
    epsilon: float = Field(0.01, gt=0.0)
    gamma0: Optional[float] = Field(None, ge=0.0)
    alpha: float = Field(8.0, gt=0.0)
    beta: float = Field(0.05, gt=0.0, le=1.0)
    tau: float = Field(2.0, ge=0.0)

    @model_validator(mode="after")
    def _check_bound(self) -> "AlgorithmSpec":
        if self.family in BASELINE_FAMILIES and self.bound != "none":
            raise ValueError(f"{self.family} does not use an error bound (got '{self.bound}')")
        if self.family in SET_MEMBERSHIP_FAMILIES and self.bound == "none":
            raise ValueError(f"{self.family} requires a bound: fixed, pdb or pidb")
        return self

    @property
    def label(self) -> str:
        """Display name, e.g. SM-AP-PIDB."""
        name = self.family.upper()
        if self.bound == "none":
            return name
        return f"{name}-{self.bound.upper()}"

    @classmethod
    def parse(cls, text: str, defaults: Optional[Dict[str, Any]] = None) -> "AlgorithmSpec":
        """
        Parse an algorithm string.

        Args:
            text (str): ``family[:bound][(key=value, ...)]``
            defaults (dict, optional): Shared parameters from the experiment

        Returns:
            AlgorithmSpec: Validated specification

        Raises:
            ConfigError: If the string or a parameter is invalid
        """
        match = _ALGO_PATTERN.match(text)
        if not match:
            raise ConfigError(f"Malformed algorithm specification: '{text}'")

        values: Dict[str, Any] = dict(defaults or {})
        values["family"] = match.group("family")
        values["bound"] = match.group("bound") or "none"

        params = match.group("params")
        if params:
            for item in params.split(","):
                if not item.strip():
                    continue
                if "=" not in item:
                    raise ConfigError(f"Malformed parameter '{item}' in '{text}'")
                key, raw = (part.strip() for part in item.split("=", 1))
                values[key] = _coerce(raw)

        try:
            return cls(**values)
        except ValidationError as e:
            raise ConfigError(f"Invalid algorithm '{text}': {_describe(e)}") from e


class ExperimentConfig(BaseModel):
    """
    Complete description of one experiment.

    Every field has a default; ``effective()`` returns the filled-in values for
    the run manifest.
    """

    scenario: Scenario = "sinr-convergence"
    family: Optional[Literal["nlms", "ap", "beacon"]] = None

    # System
    K: int = Field(10, ge=1, le=33)
    gold_degree: int = 5
    desired_user: int = Field(0, ge=0)
    n_paths: int = Field(3, ge=1)
    path_powers_db: List[float] = Field(default_factory=lambda: [0.0, -3.0, -6.0])
    channel_span: int = Field(6, ge=1)
    fdT: float = Field(1e-4, ge=0.0)
    ebn0_db: float = 15.0
    amplitude_spread_db: float = Field(3.0, ge=0.0)
    n_sinusoids: int = Field(32, ge=1)

    # Sweep grids
    ebn0_grid: List[float] = Field(default_factory=lambda: [0.0, 3.0, 6.0, 9.0, 12.0, 15.0, 18.0])
    K_grid: List[int] = Field(default_factory=lambda: [4, 8, 12, 16])
    fdT_grid: List[float] = Field(default_factory=lambda: [1e-5, 5e-5, 1e-4, 5e-4, 1e-3])

    # Algorithms and shared tuning
    algorithms: List[str] = Field(default_factory=list)
    mu: float = Field(0.05, gt=0.0)
    P: int = Field(3, ge=1)
    delta: float = Field(1e-6, ge=0.0)
    lam: float = Field(0.997, gt=0.0, le=1.0)
    epsilon: float = Field(0.01, gt=0.0)
    gamma0: Optional[float] = Field(None, ge=0.0)
    alpha: float = Field(8.0, gt=0.0)
    beta: float = Field(0.05, gt=0.0, le=1.0)
    tau: float = Field(2.0, ge=0.0)
    mu_h_scale: float = Field(0.25, gt=0.0)
    mu_A_scale: float = Field(0.25, gt=0.0)

    # Run control
    training: int = Field(200, ge=0)
    packet: int = Field(1500, ge=1)
    runs: int = Field(100, ge=1)
    seed: int = Field(0, ge=0)
    workers: int = Field(1, ge=1)
    ber_threshold: float = Field(2e-2, gt=0.0, lt=1.0)
    trace: bool = False

    @field_validator("gold_degree")
    @classmethod
    def _check_degree(cls, value: int) -> int:
        if value not in (5, 6, 7):
            raise ValueError("gold_degree must be 5, 6 or 7")
        return value

    @model_validator(mode="after")
    def _check_consistency(self) -> "ExperimentConfig":
        if len(self.path_powers_db) != self.n_paths:
            raise ValueError("path_powers_db must list one power per path")
        if self.desired_user >= self.K:
            raise ValueError("desired_user must be smaller than K")
        # Consecutive paths are 1 or 2 chips apart.
        if self.channel_span < 2 * (self.n_paths - 1) + 1:
            raise ValueError("channel_span too short for the path spacing")
        if self.channel_span > self.N:
            raise ValueError("channel_span must not exceed the processing gain")
        if self.training > self.packet:
            raise ValueError("training must not exceed packet length")
        if self.scenario == "ber-vs-users" and max(self.K_grid) > 2 ** self.gold_degree + 1:
            raise ValueError("K_grid exceeds the Gold family size")
        return self

    @property
    def N(self) -> int:
        return 2 ** self.gold_degree - 1

    def shared_parameters(self) -> Dict[str, Any]:
        """Tuning constants inherited by every algorithm."""
        shared = {
            key: getattr(self, key)
            for key in ("mu", "P", "delta", "lam", "epsilon", "gamma0", "alpha", "beta", "tau")
        }
        if self.scenario == "sinr-convergence" and self.family is not None:
            preset = SINR_FAMILIES[self.family]
            for key in ("alpha", "tau"):
                if key not in self.model_fields_set:
                    shared[key] = preset[key]
        return shared

    def algorithm_names(self) -> List[str]:
        if self.algorithms:
            return list(self.algorithms)
        if self.scenario == "sinr-convergence" and self.family is not None:
            return list(SINR_FAMILIES[self.family]["algorithms"])
        return list(DEFAULT_ALGORITHMS[self.scenario])

    def algorithm_specs(self) -> List[AlgorithmSpec]:
        """Parse and validate the algorithm list."""
        shared = self.shared_parameters()
        specs = [AlgorithmSpec.parse(name, shared) for name in self.algorithm_names()]
        labels = [spec.label for spec in specs]
        duplicates = {label for label in labels if labels.count(label) > 1}
        if duplicates:
            raise ConfigError(f"Duplicate algorithms: {', '.join(sorted(duplicates))}")
        return specs

    def effective(self) -> Dict[str, Any]:
        """All parameters with defaults filled in, plus the parsed algorithms."""
        data = self.model_dump()
        data["N"] = self.N
        data["algorithms"] = self.algorithm_names()
        data["algorithm_parameters"] = {
            spec.label: spec.model_dump() for spec in self.algorithm_specs()
        }
        return data

    @classmethod
    def build(cls, values: Dict[str, Any]) -> "ExperimentConfig":
        """Validate raw values, wrapping pydantic errors in ConfigError."""
        try:
            config = cls(**values)
        except ValidationError as e:
            raise ConfigError(f"Invalid configuration: {_describe(e)}") from e
        config.algorithm_specs()
        return config

    @classmethod
    def from_file(cls, path: Path, overrides: Optional[Dict[str, Any]] = None) -> "ExperimentConfig":
        """
        Load a flat TOML configuration file and apply overrides.

        Args:
            path (Path): Configuration file
            overrides (dict, optional): Values taking precedence over the file

        Returns:
            ExperimentConfig: Validated configuration

        Raises:
            ConfigError: If the file is unreadable, nested or invalid
        """
        try:
            with open(path, "rb") as handle:
                values = tomllib.load(handle)
        except (OSError, tomllib.TOMLDecodeError) as e:
            raise ConfigError(f"Cannot read configuration {path}: {e}") from e

        nested = [key for key, value in values.items() if isinstance(value, dict)]
        if nested:
            raise ConfigError(f"Configuration must be flat; found tables: {', '.join(nested)}")

        values.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls.build(values)


def _coerce(raw: str) -> Any:
    """Convert an inline parameter value to int, float or string."""
    for convert in (int, float):
        try:
            return convert(raw)
        except ValueError:
            continue
    if raw.lower() in ("none", "null"):
        return None
    return raw


def _describe(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "config"
        parts.append(f"{location}: {item['msg']}")
    return "; ".join(parts)

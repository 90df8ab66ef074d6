"""
Bound and Estimator State Types

Scalar state of the time-varying error-bound controllers and the state of the
channel / amplitude estimators that drive the RAKE-based interference tracker.
"""

from dataclasses import dataclass
from typing import Any, Dict

import numpy as np


@dataclass(frozen=True)
class BoundState:
    """
    State of an error-bound controller.

    Attributes:
        gamma (float): Current bound gamma[i]
        v_hat (float): Tracked interference power
        alpha (float): Weight of the parameter-dependent noise term
        beta (float): Forgetting factor of the recursions
        tau (float): Weight of the interference term
        sigma2_v (float): Noise power, known at the receiver
    """

    gamma: float
    v_hat: float
    alpha: float = 8.0
    beta: float = 0.05
    tau: float = 2.0
    sigma2_v: float = 0.0

    def __post_init__(self):
        if self.gamma < 0 or self.v_hat < 0:
            raise ValueError("Bound and interference power must be non-negative")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.tau < 0 or self.sigma2_v < 0:
            raise ValueError("tau and sigma2_v must be non-negative")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "gamma": self.gamma,
            "v_hat": self.v_hat,
            "alpha": self.alpha,
            "beta": self.beta,
            "tau": self.tau,
            "sigma2_v": self.sigma2_v,
        }


@dataclass(frozen=True)
class EstimatorState:
    """
    Channel and amplitude estimates of the desired user.

    ``f_rake`` is derived from ``h_hat`` on construction, so every state that
    carries a new channel estimate carries the matching RAKE vector.

    Attributes:
        h_hat (np.ndarray): Chip-spaced channel estimate (length L)
        A_hat (float): Amplitude estimate, kept real and non-negative
        mu_h (float): Channel step size
        mu_A (float): Amplitude step size
        f_rake (np.ndarray): Normalised RAKE vector C h_hat / ||C h_hat||^2
    """

    h_hat: np.ndarray
    A_hat: float
    mu_h: float
    mu_A: float
    f_rake: np.ndarray

    def __post_init__(self):
        if self.mu_h <= 0 or self.mu_A <= 0:
            raise ValueError("Estimator step sizes must be positive")
        if self.A_hat < 0:
            raise ValueError("Amplitude estimate must be non-negative")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "h_hat": [complex(v) for v in self.h_hat],
            "A_hat": self.A_hat,
            "mu_h": self.mu_h,
            "mu_A": self.mu_A,
        }

    def channel_error(self, h: np.ndarray) -> float:
        return float(np.linalg.norm(self.h_hat - h))

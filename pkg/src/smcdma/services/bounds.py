"""
Bounds Service - Time-Varying Error Bounds for Set-Membership Receivers

This service computes the error bound gamma used by the set-membership
receivers. Three controllers are provided: a fixed bound, a
parameter-dependent bound (PDB) driven by the receiver norm and the noise
power, and a parameter-and-interference-dependent bound (PIDB) which also
follows the interference power tracked at the RAKE output.

All recursions share the form gamma <- (1 - beta) gamma + beta Po, where Po is
the drive term of the chosen controller.

Key Features:
- Pure state-transition functions on BoundState
- BoundController: one ``step`` per received symbol with trajectory log
- General scalar recursion used by the convergence analysis
"""

import logging
import math
from dataclasses import replace
from typing import Dict, List, Optional

import numpy as np

from ..models.errors import StateCorruptionError
from ..models.tracking import BoundState

logger = logging.getLogger(__name__)


def _check_beta(beta: float) -> None:
    if not 0.0 < beta <= 1.0:
        raise ValueError(f"beta must lie in (0, 1], got {beta}")


def _weights_norm2(w) -> float:
    w = getattr(w, "w", w)
    return float(np.vdot(w, w).real)


def bound_recursion_step(gamma: float, drive: float, beta: float) -> float:
    """One step of gamma <- (1 - beta) gamma + beta Po, for any beta."""
    return (1.0 - beta) * gamma + beta * drive


def pdb_drive(state: BoundState, w) -> float:
    """Parameter-dependent drive sqrt(alpha ||w||^2 sigma^2)."""
    return math.sqrt(state.alpha * _weights_norm2(w) * state.sigma2_v)


def pidb_drive(state: BoundState, w) -> float:
    """
    Parameter-and-interference drive sqrt(tau v_hat^2) + sqrt(alpha ||w||^2 sigma^2).

    sqrt(tau v_hat^2) is evaluated as sqrt(tau) v_hat (v_hat >= 0), which does
    not overflow for any finite v_hat.
    """
    return math.sqrt(state.tau) * state.v_hat + pdb_drive(state, w)


def initial_gamma(sigma2: float, w_norm2: float = 1.0) -> float:
    """Default starting bound sqrt(5 sigma^2 ||w||^2), the noise level at the receiver output."""
    return math.sqrt(5.0 * sigma2 * w_norm2)


def fixed_bound(gamma0: float, sigma2_v: float = 0.0) -> BoundState:
    """
    Constant bound state.

    Args:
        gamma0 (float): Bound value (>= 0)
        sigma2_v (float): Noise power used as the tracker's starting point

    Returns:
        BoundState: State whose gamma never changes
    """
    if gamma0 < 0:
        raise ValueError("gamma0 must be non-negative")
    return BoundState(gamma=float(gamma0), v_hat=float(sigma2_v), sigma2_v=float(sigma2_v))


def pdb_step(state: BoundState, w) -> BoundState:
    """
    Parameter-dependent bound update.

    gamma <- (1 - beta) gamma + beta sqrt(alpha ||w||^2 sigma^2)
    """
    _check_beta(state.beta)
    gamma = bound_recursion_step(state.gamma, pdb_drive(state, w), state.beta)
    return replace(state, gamma=max(gamma, 0.0))


def interference_track_step(state: BoundState, d: complex) -> BoundState:
    """v_hat <- (1 - beta) v_hat + beta |d|^2."""
    _check_beta(state.beta)
    v_hat = bound_recursion_step(state.v_hat, abs(d) ** 2, state.beta)
    return replace(state, v_hat=max(v_hat, 0.0))


def pidb_step(state: BoundState, w) -> BoundState:
    """
    Parameter-and-interference-dependent bound update.

    gamma <- (1 - beta) gamma + beta (sqrt(tau v_hat^2) + sqrt(alpha ||w||^2 sigma^2))

    ``interference_track_step`` is expected to have been applied for the
    current symbol.
    """
    _check_beta(state.beta)
    gamma = bound_recursion_step(state.gamma, pidb_drive(state, w), state.beta)
    return replace(state, gamma=max(gamma, 0.0))


class BoundController:
    """
    Per-symbol bound controller for one receiver.

    ``kind`` is 'fixed', 'pdb' or 'pidb'. The interference power is tracked for
    every kind so that traces are comparable; only PIDB feeds it back into
    gamma. The bound is stepped once per symbol whether or not the receiver
    updated.
    """

    KINDS = ("fixed", "pdb", "pidb")

    def __init__(self, kind: str, state: BoundState, keep_history: bool = False):
        if kind not in self.KINDS:
            raise ValueError(f"Unknown bound kind '{kind}'")
        if kind != "fixed":
            _check_beta(state.beta)
        self.kind = kind
        self.state = state
        self.keep_history = keep_history
        self.history: List[Dict[str, float]] = []

    @classmethod
    def create(cls, kind: str, sigma2_v: float, gamma0: Optional[float] = None,
               alpha: float = 8.0, beta: float = 0.05, tau: float = 2.0,
               keep_history: bool = False) -> "BoundController":
        """
        Build a controller with the default cold start.

        gamma starts at ``gamma0`` (sqrt(5 sigma^2) when None) and v_hat at the
        noise floor sigma^2.
        """
        gamma = initial_gamma(sigma2_v) if gamma0 is None else gamma0
        state = BoundState(gamma=float(gamma), v_hat=float(sigma2_v), alpha=alpha,
                           beta=beta, tau=tau, sigma2_v=float(sigma2_v))
        return cls(kind, state, keep_history=keep_history)

    @property
    def gamma(self) -> float:
        return self.state.gamma

    @property
    def v_hat(self) -> float:
        return self.state.v_hat

    def step(self, w, d: complex) -> BoundState:
        """
        Track |d|^2 and advance gamma using the pre-update weights w.

        Raises:
            StateCorruptionError: If gamma or v_hat is no longer finite
        """
        self.state = interference_track_step(self.state, d)
        if self.kind == "pdb":
            self.state = pdb_step(self.state, w)
        elif self.kind == "pidb":
            self.state = pidb_step(self.state, w)
        if not (math.isfinite(self.state.gamma) and math.isfinite(self.state.v_hat)):
            raise StateCorruptionError(
                f"{self.kind} bound became non-finite (gamma={self.state.gamma}, v_hat={self.state.v_hat})"
            )
        if self.keep_history:
            self.history.append({"gamma": self.state.gamma, "v_hat": self.state.v_hat})
        return self.state

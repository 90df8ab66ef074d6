"""
Estimators Service - Channel, Amplitude and Interference Estimation

This service runs the desired user's estimation chain: stochastic-gradient
estimates of the multipath channel and of the amplitude, the RAKE receiver
built from them, and the interference sample d = x - A_hat b_hat obtained by
removing the estimated desired signal from the RAKE output. |d|^2 feeds the
interference tracker of the PIDB bound.

Key Features:
- SG channel update with the amplitude inside the residual
- SG amplitude update kept real and non-negative
- Joint on-line step with steps capped at the current stability limits and
  the channel estimate held at unit norm
- RAKE vector normalised so its gain on C h_hat is one
"""

import logging
from dataclasses import replace
from typing import Optional, Tuple

import numpy as np

from ..models.errors import DegenerateEstimateError, StateCorruptionError
from ..models.signal import ConvolutionMatrix
from ..models.tracking import EstimatorState

logger = logging.getLogger(__name__)

# Largest loop gain mu * curvature allowed per estimator in the joint update.
MAX_LOOP_GAIN = 0.9


def rake_vector(C: ConvolutionMatrix, h_hat: np.ndarray) -> np.ndarray:
    """
    RAKE vector f = C h_hat / ||C h_hat||^2.

    A zero effective signature yields the zero vector; ``rake_output``
    rejects it.
    """
    signature = np.asarray(C.apply(h_hat), dtype=complex)
    energy = float(np.vdot(signature, signature).real)
    if energy == 0.0:
        return np.zeros_like(signature)
    return signature / energy


def make_estimator_state(C: ConvolutionMatrix, h_hat: np.ndarray, A_hat: float,
                         mu_h: float, mu_A: float) -> EstimatorState:
    """Estimator state with the RAKE vector matching h_hat."""
    h_hat = np.asarray(h_hat, dtype=complex)
    if h_hat.shape != (C.L,):
        raise ValueError(f"h_hat must have length {C.L}, got {h_hat.shape}")
    return EstimatorState(h_hat=h_hat, A_hat=float(A_hat), mu_h=mu_h, mu_A=mu_A,
                          f_rake=rake_vector(C, h_hat))


def initial_estimator_state(C: ConvolutionMatrix, mu_h: float, mu_A: float,
                            A_hat: float = 1.0) -> EstimatorState:
    """Cold start: all channel energy on the first tap, unit amplitude."""
    h_hat = np.zeros(C.L, dtype=complex)
    h_hat[0] = 1.0
    return make_estimator_state(C, h_hat, A_hat, mu_h, mu_A)


def _residual(state: EstimatorState, C: ConvolutionMatrix, b: complex, r: np.ndarray) -> np.ndarray:
    """A_hat b C h_hat - r."""
    return state.A_hat * b * C.apply(state.h_hat) - r


def _channel_gradient(state: EstimatorState, C: ConvolutionMatrix, b: complex,
                      residual: np.ndarray) -> np.ndarray:
    return state.A_hat * np.conj(b) * C.adjoint(residual)


def _amplitude_gradient(state: EstimatorState, C: ConvolutionMatrix, b: complex,
                        residual: np.ndarray) -> float:
    return float(np.real(np.conj(b) * np.vdot(C.apply(state.h_hat), residual)))


def channel_sg_step(state: EstimatorState, C: ConvolutionMatrix, b: complex,
                    r: np.ndarray) -> EstimatorState:
    """
    Stochastic-gradient channel update.

    h_hat <- h_hat - mu_h A_hat b* C^H (A_hat b C h_hat - r)

    Args:
        state (EstimatorState): Current estimates
        C (ConvolutionMatrix): Desired user's convolution matrix
        b (complex): Training or detected symbol
        r (np.ndarray): Received vector

    Returns:
        EstimatorState: State with the new channel estimate and RAKE vector
    """
    residual = _residual(state, C, b, r)
    h_hat = state.h_hat - state.mu_h * _channel_gradient(state, C, b, residual)
    return replace(state, h_hat=h_hat, f_rake=rake_vector(C, h_hat))


def amplitude_sg_step(state: EstimatorState, C: ConvolutionMatrix, b: complex,
                      r: np.ndarray) -> EstimatorState:
    """
    Stochastic-gradient amplitude update.

    A_hat <- A_hat - mu_A Re(b* h_hat^H C^H (A_hat b C h_hat - r)), clamped at 0.
    """
    residual = _residual(state, C, b, r)
    A_hat = max(state.A_hat - state.mu_A * _amplitude_gradient(state, C, b, residual), 0.0)
    return replace(state, A_hat=A_hat)


def effective_steps(state: EstimatorState, C: ConvolutionMatrix) -> Tuple[float, float]:
    """
    Step sizes used by the joint update at the current estimates.

    The stability limits 2 / (A_hat^2 lambda_max) and 2 / ||C h_hat||^2 move
    with the estimates; each configured step is capped so that its loop gain
    mu * curvature stays at or below ``MAX_LOOP_GAIN``, keeping the sum of the
    two gains below 2.
    """
    mu_h, mu_A = state.mu_h, state.mu_A
    channel_curvature = state.A_hat ** 2 * C.lambda_max
    if channel_curvature > 0.0:
        mu_h = min(mu_h, MAX_LOOP_GAIN / channel_curvature)
    signature = C.apply(state.h_hat)
    amplitude_curvature = float(np.vdot(signature, signature).real)
    if amplitude_curvature > 0.0:
        mu_A = min(mu_A, MAX_LOOP_GAIN / amplitude_curvature)
    return mu_h, mu_A


def estimator_step(state: EstimatorState, C: ConvolutionMatrix, b: complex,
                   r: np.ndarray) -> EstimatorState:
    """
    Joint on-line update of channel and amplitude.

    Both gradients are evaluated at the current (h_hat, A_hat) with the steps
    of ``effective_steps``. Only the product A_hat h_hat is identifiable, so
    the new pair is brought back to ||h_hat|| = 1 and A_hat >= 0 without
    changing the product: a negative amplitude flips the sign of the channel
    estimate instead of being clamped.

    Raises:
        DegenerateEstimateError: If the channel estimate collapses to zero
        StateCorruptionError: If the estimates become non-finite
    """
    mu_h, mu_A = effective_steps(state, C)
    residual = _residual(state, C, b, r)
    h_hat = state.h_hat - mu_h * _channel_gradient(state, C, b, residual)
    A_hat = state.A_hat - mu_A * _amplitude_gradient(state, C, b, residual)

    norm = float(np.linalg.norm(h_hat))
    if not (np.isfinite(norm) and np.isfinite(A_hat)):
        raise StateCorruptionError("Channel or amplitude estimate became non-finite")
    if norm == 0.0:
        raise DegenerateEstimateError("Channel estimate collapsed to zero")
    if A_hat < 0.0:
        h_hat, A_hat = -h_hat, -A_hat
    h_hat = h_hat / norm
    return replace(state, h_hat=h_hat, A_hat=A_hat * norm, f_rake=rake_vector(C, h_hat))


def rake_output(state: EstimatorState, r: np.ndarray) -> complex:
    """
    RAKE output x = f^H r.

    Raises:
        DegenerateEstimateError: If the RAKE vector is zero
    """
    if not np.any(state.f_rake):
        raise DegenerateEstimateError("RAKE vector is zero; channel estimate collapsed")
    return complex(np.vdot(state.f_rake, r))


def interference_sample(state: EstimatorState, x: complex, b_detected: complex) -> complex:
    """Interference sample d = x - A_hat b_hat."""
    return complex(x - state.A_hat * b_detected)


def rake_interference_power(state: EstimatorState, disturbance: np.ndarray) -> float:
    """Genie power |f^H (MAI + ISI + noise)|^2 at the RAKE output."""
    return float(abs(np.vdot(state.f_rake, disturbance)) ** 2)


def run_estimators(state: EstimatorState, C: ConvolutionMatrix, symbols: np.ndarray,
                   received: np.ndarray, h_true: Optional[np.ndarray] = None):
    """
    Run the estimators over a block with known symbols.

    Args:
        state (EstimatorState): Starting estimates
        C (ConvolutionMatrix): Desired user's convolution matrix
        symbols (np.ndarray): Symbols b[i], shape (n,)
        received (np.ndarray): Received vectors, shape (n, M)
        h_true (np.ndarray, optional): True channel for the error trace

    Returns:
        tuple: Final state, per-symbol ||h_hat - h||^2 (empty without h_true)
            and per-symbol A_hat
    """
    errors = []
    amplitudes = []
    for b, r in zip(symbols, received):
        state = estimator_step(state, C, b, r)
        if h_true is not None:
            errors.append(state.channel_error(h_true) ** 2)
        amplitudes.append(state.A_hat)
    return state, np.asarray(errors), np.asarray(amplitudes)

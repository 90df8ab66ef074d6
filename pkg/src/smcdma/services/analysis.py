"""
Analysis Service - Closed-Form Convergence Oracles

Step-size stability limits and mean-square error recursions for the channel
estimator, the amplitude estimator and the time-varying bound. These are used
to pick default step sizes and to cross-check the simulation.

Key Features:
- Stability limits from the eigenvalues of C^H C
- Channel-error covariance recursion and its Lyapunov fixed point
- Amplitude and bound MSE recursions with closed-form fixed points
- Per-symbol arithmetic cost model of the receivers
"""

import logging
from typing import Dict, Optional, Tuple

import numpy as np
from scipy import linalg

from ..models.errors import DegenerateEstimateError
from ..models.reports import StabilityReport
from ..models.signal import ConvolutionMatrix

logger = logging.getLogger(__name__)


def largest_eigenvalue(C: ConvolutionMatrix) -> float:
    """lambda_max of C^H C."""
    return float(linalg.eigvalsh(C.gram)[-1])


def step_bounds(C: ConvolutionMatrix, sigma_b2: float = 1.0, sigma_A2: float = 1.0,
                h_hat: Optional[np.ndarray] = None) -> StabilityReport:
    """
    Step-size limits of the SG estimators.

    mu_h_max = 2 / (sigma_b^2 sigma_A^2 lambda_max(C^H C))
    mu_A_max = 2 / (sigma_b^2 ||C h_hat||^2)

    Args:
        C (ConvolutionMatrix): Desired user's convolution matrix
        sigma_b2 (float): Symbol power
        sigma_A2 (float): Amplitude power
        h_hat (np.ndarray, optional): Channel estimate; first-tap unit vector if None

    Returns:
        StabilityReport: Limits and lambda_max; beta range (0, 2)

    Raises:
        DegenerateEstimateError: If the code or the effective signature is zero
    """
    if sigma_b2 <= 0 or sigma_A2 <= 0:
        raise ValueError("sigma_b2 and sigma_A2 must be positive")

    lambda_max = largest_eigenvalue(C)
    if lambda_max <= 0.0:
        raise DegenerateEstimateError("C^H C is zero; code carries no energy")

    if h_hat is None:
        h_hat = np.zeros(C.L)
        h_hat[0] = 1.0
    signature = C.apply(np.asarray(h_hat))
    energy = float(np.vdot(signature, signature).real)
    if energy <= 0.0:
        raise DegenerateEstimateError("Effective signature C h_hat is zero")

    return StabilityReport(
        mu_h_max=2.0 / (sigma_b2 * sigma_A2 * lambda_max),
        mu_A_max=2.0 / (sigma_b2 * energy),
        beta_range=(0.0, 2.0),
        lambda_max=lambda_max,
    )


def _covariance_terms(C: ConvolutionMatrix, mu_h: float, sigma_A2: float, sigma_b2: float,
                      mse_min: float) -> Tuple[np.ndarray, np.ndarray]:
    """Transition B = I - mu sigma_A^2 sigma_b^2 C^H C and drive Q of the covariance recursion."""
    gram = C.gram
    gain = mu_h * sigma_A2 * sigma_b2
    B = np.eye(C.L) - gain * gram
    # ||C^H C||^2 read as the squared spectral norm.
    lambda_max = largest_eigenvalue(C)
    Q = mu_h * gain * lambda_max ** 2 * mse_min * np.eye(C.L)
    return B, Q


def predict_channel_covariance(K0: np.ndarray, C: ConvolutionMatrix, mu_h: float,
                               sigma_A2: float = 1.0, sigma_b2: float = 1.0,
                               mse_min: float = 0.0, n_steps: int = 1000) -> np.ndarray:
    """
    Iterate the channel-error covariance recursion.

    K[i+1] = B K[i] B + mu_h^2 sigma_A^2 sigma_b^2 ||C^H C||^2 MSE_min I

    Returns:
        np.ndarray: tr(K[i]) for i = 0..n_steps
    """
    B, Q = _covariance_terms(C, mu_h, sigma_A2, sigma_b2, mse_min)
    K = np.asarray(K0, dtype=complex)
    traces = np.empty(n_steps + 1)
    traces[0] = float(np.trace(K).real)
    for i in range(1, n_steps + 1):
        K = B @ K @ B + Q
        traces[i] = float(np.trace(K).real)
    return traces


def channel_covariance_fixed_point(C: ConvolutionMatrix, mu_h: float, sigma_A2: float = 1.0,
                                   sigma_b2: float = 1.0, mse_min: float = 0.0) -> np.ndarray:
    """Steady-state covariance, solving K = B K B + Q as a discrete Lyapunov equation."""
    B, Q = _covariance_terms(C, mu_h, sigma_A2, sigma_b2, mse_min)
    return linalg.solve_discrete_lyapunov(B, Q)


def measured_mse_min(C: ConvolutionMatrix, residuals: np.ndarray) -> float:
    """
    MSE_min from residuals at the optimum, e = r - A b C h.

    Normalised so that the isotropic drive of the covariance recursion has the
    trace of the measured E||C^H e||^2.

    Args:
        C (ConvolutionMatrix): Desired user's convolution matrix
        residuals (np.ndarray): (n, M) optimal residual vectors

    Returns:
        float: E||C^H e||^2 / (L lambda_max^2)
    """
    residuals = np.atleast_2d(residuals)
    projected = residuals @ C.entries
    power = float(np.mean(np.sum(np.abs(projected) ** 2, axis=1)))
    return power / (C.L * largest_eigenvalue(C) ** 2)


def predict_amplitude_mse(K0: float, mu_A: float, sigma_b2: float, hCnorm2: float,
                          mse_A_min: float, n_steps: int) -> Tuple[np.ndarray, float]:
    """
    Iterate the amplitude-estimator MSE recursion.

    K[i+1] = (1 - mu_A sigma_b^2 ||h^H C^H||^2)^2 K[i] + mu_A^2 sigma_b^2 ||h^H C^H||^2 MSE_A,min

    The squared norm is the plug-in value of the current channel estimate.

    Returns:
        tuple: Trajectory K[0..n_steps] and the fixed point (inf when unstable)
    """
    contraction = (1.0 - mu_A * sigma_b2 * hCnorm2) ** 2
    drive = mu_A ** 2 * sigma_b2 * hCnorm2 * mse_A_min
    trajectory = _scalar_mse(K0, contraction, drive, n_steps)
    fixed_point = drive / (1.0 - contraction) if contraction < 1.0 else float("inf")
    return trajectory, fixed_point


def predict_gamma_mse(K0: float, beta: float, e_opt2: float, n_steps: int) -> np.ndarray:
    """
    Iterate the bound MSE recursion K[i+1] = (1 - beta)^2 K[i] + beta^2 e_opt2.

    Returns:
        np.ndarray: K[i] for i = 0..n_steps
    """
    return _scalar_mse(K0, (1.0 - beta) ** 2, beta ** 2 * e_opt2, n_steps)


def gamma_mse_fixed_point(beta: float, e_opt2: float) -> float:
    """beta e_opt2 / (2 - beta), defined for 0 < beta < 2."""
    if not 0.0 < beta < 2.0:
        raise ValueError(f"No finite fixed point for beta={beta}")
    return beta * e_opt2 / (2.0 - beta)


def _scalar_mse(K0: float, contraction: float, drive: float, n_steps: int) -> np.ndarray:
    values = np.empty(n_steps + 1)
    values[0] = K0
    for i in range(1, n_steps + 1):
        values[i] = contraction * values[i - 1] + drive
    return values


def complexity_per_symbol(family: str, M: int, P: int = 1, update_rate: float = 1.0) -> Dict[str, float]:
    """
    Arithmetic cost (complex multiplications) per received symbol.

    Every receiver pays the M multiplications of the a priori error each
    symbol; the update cost is paid with probability ``update_rate``.
    Baselines always update.

    Args:
        family (str): Algorithm family
        M (int): Receiver length
        P (int): Projection order (AP family)
        update_rate (float): Fraction of updating symbols

    Returns:
        dict: error-check cost, update cost and expected total per symbol
    """
    if family in ("nlms", "sm-nlms"):
        update = 2.0 * M
    elif family in ("ap", "sm-ap"):
        # P x M error vector plus about 2 P^3 for solving the P x P system.
        update = P * M + 2.0 * P ** 3
    elif family in ("rls", "beacon"):
        update = 3.0 * M ** 2 + 2.0 * M
    else:
        raise ValueError(f"Unknown algorithm family: {family}")

    rate = update_rate if family.startswith("sm-") or family == "beacon" else 1.0
    check = float(M)
    return {"check": check, "update": update, "total": check + rate * update}

"""
Set-Membership Filters Service - Data-Selective Receiver Adaptation

This service implements the per-symbol weight updates of the linear multiuser
receiver z = w^H r. The set-membership algorithms only move the weights when
the a priori error exceeds the current bound gamma, and then move them just far
enough to land on the bound. The non-selective baselines update every symbol.

Key Features:
- SM-NLMS, SM-AP and BEACON with time-varying bounds
- NLMS, AP and exponentially weighted RLS baselines
- Receiver objects with a uniform ``update(r, b, gamma)`` interface
- Hard decisions with a documented tie-break
"""

import logging
from typing import Optional, Tuple

import numpy as np

from ..models.config import AlgorithmSpec
from ..models.errors import (
    DegenerateInputError,
    IllConditionedWindowError,
    StateCorruptionError,
)
from ..models.filters import ApState, BeaconState, ReceiverWeights, RlsState, UpdateOutcome
from ..models.signal import ConvolutionMatrix

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e12


def _prior_error(w: np.ndarray, r: np.ndarray, b: complex) -> complex:
    """e = b - w^H r."""
    return complex(b - np.vdot(w, r))


def _project(w: np.ndarray, r: np.ndarray, e: complex, mu: float, delta: float) -> Tuple[np.ndarray, float]:
    """
    Normalised projection step w + mu e* r / (delta + r^H r).

    Shared by every order-one update so that order-one affine projection and
    NLMS produce bit-identical trajectories and outcomes. Returns the new
    weights and the applied step mu / (delta + r^H r).
    """
    energy = float(np.vdot(r, r).real) + delta
    if energy <= 0.0:
        raise DegenerateInputError("Observation vector has zero energy")
    step = mu * np.conj(e) / energy
    return w + step * r, mu / energy


def sm_nlms_update(state: ReceiverWeights, r: np.ndarray, b: complex, gamma: float) -> UpdateOutcome:
    """
    Set-membership NLMS update with bound gamma.

    Args:
        state (ReceiverWeights): Weights, updated in place
        r (np.ndarray): Observation vector
        b (complex): Desired symbol
        gamma (float): Error bound (>= 0)

    Returns:
        UpdateOutcome: updated flag, a priori error and step mu

    Raises:
        DegenerateInputError: If r is zero while an update is required
    """
    e = _prior_error(state.w, r, b)
    magnitude = abs(e)
    if magnitude <= gamma:
        return UpdateOutcome.skipped(e)

    state.w, step = _project(state.w, r, e, 1.0 - gamma / magnitude, 0.0)
    return UpdateOutcome(updated=True, prior_error=e, step_or_lambda=step)


def _ap_direction(window: ApState, rhs: np.ndarray) -> np.ndarray:
    """Solve (Y^H Y + delta I) t = rhs on the active columns and return Y t."""
    Y = window.active()
    gram = Y.conj().T @ Y + window.delta * np.eye(Y.shape[1])
    if np.linalg.cond(gram) > CONDITION_LIMIT:
        raise IllConditionedWindowError(
            f"Window matrix condition number exceeds {CONDITION_LIMIT:g}"
        )
    return Y @ np.linalg.solve(gram, rhs)


def sm_ap_update(state: ReceiverWeights, window: ApState, b: complex, gamma: float) -> UpdateOutcome:
    """
    Set-membership affine-projection update.

    Only the newest error is driven onto the bound; the a posteriori errors of
    the older observations in the window are kept unchanged.

    Args:
        state (ReceiverWeights): Weights, updated in place
        window (ApState): Data window whose newest column is r[i]
        b (complex): Desired symbol for r[i]
        gamma (float): Error bound (>= 0)

    Returns:
        UpdateOutcome: updated flag, a priori error and step mu

    Raises:
        IllConditionedWindowError: If Y^H Y + delta I is numerically singular
    """
    if window.filled == 0:
        raise ValueError("Affine-projection window is empty")

    r = window.Y[:, 0]
    e = _prior_error(state.w, r, b)
    magnitude = abs(e)
    if magnitude <= gamma:
        return UpdateOutcome.skipped(e)

    mu = 1.0 - gamma / magnitude
    if window.filled == 1:
        state.w, step = _project(state.w, r, e, mu, window.delta)
        return UpdateOutcome(updated=True, prior_error=e, step_or_lambda=step)

    rhs = np.zeros(window.filled, dtype=complex)
    rhs[0] = mu * np.conj(e)
    state.w = state.w + _ap_direction(window, rhs)
    return UpdateOutcome(updated=True, prior_error=e, step_or_lambda=mu)


def beacon_update(state: BeaconState, r: np.ndarray, b: complex, gamma: float) -> UpdateOutcome:
    """
    BEACON update with time-varying bound.

    The multiplier lambda = (|xi|/gamma - 1) / t acts as innovation check; an
    update places the a posteriori error exactly on the bound.

    Args:
        state (BeaconState): Weights and P matrix, updated in place
        r (np.ndarray): Observation vector
        b (complex): Desired symbol
        gamma (float): Error bound

    Returns:
        UpdateOutcome: updated flag, prediction error xi and lambda

    Raises:
        StateCorruptionError: If r^H P r <= 0
        DegenerateInputError: If gamma is zero while the error is not
    """
    xi = _prior_error(state.w, r, b)
    Pr = state.P_mat @ r
    t = float(np.vdot(r, Pr).real)
    if t <= 0.0:
        raise StateCorruptionError(f"r^H P r = {t:.3e}; P lost positive-definiteness")

    magnitude = abs(xi)
    if magnitude <= gamma:
        return UpdateOutcome.skipped(xi)
    if gamma <= 0.0:
        raise DegenerateInputError("BEACON requires a positive bound when the error is non-zero")

    lam = (magnitude / gamma - 1.0) / t
    P_new = state.P_mat - (lam / (1.0 + lam * t)) * np.outer(Pr, Pr.conj())
    P_new = 0.5 * (P_new + P_new.conj().T)
    state.P_mat = P_new
    state.w = state.w + lam * np.conj(xi) * (P_new @ r)
    return UpdateOutcome(updated=True, prior_error=xi, step_or_lambda=lam)


def nlms_update(state: ReceiverWeights, r: np.ndarray, b: complex, mu: float = 0.05,
                delta: float = 0.0) -> UpdateOutcome:
    """NLMS update w += mu e* r / (delta + r^H r); updates every symbol."""
    e = _prior_error(state.w, r, b)
    state.w, step = _project(state.w, r, e, mu, delta)
    return UpdateOutcome(updated=True, prior_error=e, step_or_lambda=step)


def ap_update(state: ReceiverWeights, window: ApState, b: complex, mu: float = 0.05) -> UpdateOutcome:
    """
    Affine-projection update on the full error vector of the window.

    w += mu Y (Y^H Y + delta I)^{-1} e, with e = b* - Y^H w over the window.
    """
    if window.filled == 0:
        raise ValueError("Affine-projection window is empty")

    r = window.Y[:, 0]
    e = _prior_error(state.w, r, b)
    if window.filled == 1:
        state.w, step = _project(state.w, r, e, mu, window.delta)
        return UpdateOutcome(updated=True, prior_error=e, step_or_lambda=step)

    Y = window.active()
    desired = window.desired[: window.filled].copy()
    desired[0] = b
    errors = np.conj(desired) - Y.conj().T @ state.w
    state.w = state.w + _ap_direction(window, mu * errors)
    return UpdateOutcome(updated=True, prior_error=e, step_or_lambda=mu)


def rls_update(state: RlsState, r: np.ndarray, b: complex) -> UpdateOutcome:
    """Exponentially weighted RLS update; updates every symbol."""
    e = _prior_error(state.w, r, b)
    Pr = state.P_mat @ r
    denominator = state.lam + float(np.vdot(r, Pr).real)
    if denominator <= 0.0:
        raise StateCorruptionError("RLS gain denominator is not positive")

    gain = Pr / denominator
    state.w = state.w + gain * np.conj(e)
    P_new = (state.P_mat - np.outer(gain, Pr.conj())) / state.lam
    state.P_mat = 0.5 * (P_new + P_new.conj().T)
    return UpdateOutcome(updated=True, prior_error=e, step_or_lambda=1.0 / denominator)


def detect(w: np.ndarray, r: np.ndarray) -> Tuple[float, complex]:
    """
    Hard decision sgn(Re(w^H r)) and soft output z = w^H r.

    A zero real part decides +1.
    """
    z = complex(np.vdot(w, r))
    return (1.0 if z.real >= 0.0 else -1.0), z


def matched_filter_init(C: ConvolutionMatrix, h_hat: np.ndarray) -> np.ndarray:
    """Initial weights C h_hat / N (scaled RAKE direction)."""
    N = C.M - C.L + 1
    return np.asarray(C.apply(h_hat), dtype=complex) / N


class AdaptiveReceiver:
    """
    Base class of the stateful receivers used by the simulation pipeline.

    Subclasses implement ``update``; baselines ignore ``gamma``.
    """

    def __init__(self, spec: AlgorithmSpec, w0: np.ndarray):
        self.spec = spec
        self.reset(w0)

    @property
    def name(self) -> str:
        return self.spec.label

    @property
    def weights(self) -> np.ndarray:
        return self._weights.w

    def reset(self, w0: np.ndarray) -> None:
        self._weights = ReceiverWeights(np.array(w0, dtype=complex))

    def output(self, r: np.ndarray) -> complex:
        return complex(np.vdot(self.weights, r))

    def update(self, r: np.ndarray, b: complex, gamma: float) -> UpdateOutcome:
        raise NotImplementedError


class NlmsReceiver(AdaptiveReceiver):
    def update(self, r, b, gamma):
        return nlms_update(self._weights, r, b, mu=self.spec.mu)


class SmNlmsReceiver(AdaptiveReceiver):
    def update(self, r, b, gamma):
        return sm_nlms_update(self._weights, r, b, gamma)


class ApReceiver(AdaptiveReceiver):
    """Affine projection; SM-AP when ``selective`` is set."""

    def __init__(self, spec: AlgorithmSpec, w0: np.ndarray, selective: bool):
        self.selective = selective
        super().__init__(spec, w0)

    def reset(self, w0):
        super().reset(w0)
        self.window = ApState.empty(len(w0), self.spec.P, self.spec.delta)

    def update(self, r, b, gamma):
        self.window.push(r, b)
        if self.selective:
            return sm_ap_update(self._weights, self.window, b, gamma)
        return ap_update(self._weights, self.window, b, mu=self.spec.mu)


class RlsReceiver(AdaptiveReceiver):
    def reset(self, w0):
        self.state = RlsState.initial(w0, lam=self.spec.lam, epsilon=self.spec.epsilon)

    @property
    def weights(self):
        return self.state.w

    def update(self, r, b, gamma):
        return rls_update(self.state, r, b)


class BeaconReceiver(AdaptiveReceiver):
    def reset(self, w0):
        self.state = BeaconState.initial(w0, epsilon=self.spec.epsilon)

    @property
    def weights(self):
        return self.state.w

    def update(self, r, b, gamma):
        return beacon_update(self.state, r, b, gamma)


def make_filter(spec: AlgorithmSpec, w0: np.ndarray) -> AdaptiveReceiver:
    """
    Create the receiver object for an algorithm specification.

    Args:
        spec (AlgorithmSpec): Validated algorithm
        w0 (np.ndarray): Initial weights

    Returns:
        AdaptiveReceiver: Receiver ready for ``update``
    """
    if spec.family == "nlms":
        return NlmsReceiver(spec, w0)
    if spec.family == "sm-nlms":
        return SmNlmsReceiver(spec, w0)
    if spec.family in ("ap", "sm-ap"):
        return ApReceiver(spec, w0, selective=spec.family == "sm-ap")
    if spec.family == "rls":
        return RlsReceiver(spec, w0)
    if spec.family == "beacon":
        return BeaconReceiver(spec, w0)
    raise ValueError(f"Unknown algorithm family: {spec.family}")

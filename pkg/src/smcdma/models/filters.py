"""
Adaptive Receiver State Types

State holders for the linear multiuser receiver and its adaptation algorithms:
the weight vector, the affine-projection data window, the inverse-correlation
matrices of BEACON and RLS, and the outcome reported by every update.
"""

from dataclasses import dataclass
from typing import Any, Dict

import numpy as np


@dataclass
class ReceiverWeights:
    """
    Complex M-vector w of the linear receiver, z = w^H r.

    Attributes:
        w (np.ndarray): Receiver coefficients
    """

    w: np.ndarray

    def __post_init__(self):
        self.w = np.array(self.w, dtype=complex)

    @property
    def M(self) -> int:
        return int(self.w.size)

    def squared_norm(self) -> float:
        return float(np.vdot(self.w, self.w).real)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.w)))

    def copy(self) -> "ReceiverWeights":
        return ReceiverWeights(self.w.copy())


@dataclass
class ApState:
    """
    Sliding data window of the affine-projection family.

    Column 0 of ``Y`` is the newest observation r[i]; column j holds r[i-j].
    Before ``filled`` reaches P the remaining columns stay zero.

    Attributes:
        Y (np.ndarray): (M, P) observation matrix
        desired (np.ndarray): b[i], ..., b[i-P+1]
        delta (float): Regularisation added to Y^H Y
        filled (int): Number of observations pushed so far, capped at P
    """

    Y: np.ndarray
    desired: np.ndarray
    delta: float = 1e-6
    filled: int = 0

    @classmethod
    def empty(cls, M: int, P: int, delta: float = 1e-6) -> "ApState":
        if P < 1:
            raise ValueError("Projection order P must be at least 1")
        if delta < 0:
            raise ValueError("Regularisation delta must be non-negative")
        return cls(
            Y=np.zeros((M, P), dtype=complex),
            desired=np.zeros(P, dtype=complex),
            delta=float(delta),
        )

    @property
    def P(self) -> int:
        return int(self.Y.shape[1])

    def push(self, r: np.ndarray, b: complex) -> None:
        """Shift the window by one and insert (r, b) as the newest pair."""
        self.Y[:, 1:] = self.Y[:, :-1]
        self.Y[:, 0] = r
        self.desired[1:] = self.desired[:-1]
        self.desired[0] = b
        self.filled = min(self.filled + 1, self.P)

    def active(self) -> np.ndarray:
        """Columns holding real observations."""
        return self.Y[:, : self.filled]


@dataclass
class BeaconState:
    """
    BEACON receiver state: weights plus the Hermitian matrix P.

    Attributes:
        w (np.ndarray): Receiver coefficients
        P_mat (np.ndarray): (M, M) Hermitian positive-definite matrix
    """

    w: np.ndarray
    P_mat: np.ndarray

    @classmethod
    def initial(cls, w0: np.ndarray, epsilon: float = 0.01) -> "BeaconState":
        M = len(w0)
        return cls(w=np.array(w0, dtype=complex), P_mat=np.eye(M, dtype=complex) / epsilon)

    def hermitian_defect(self) -> float:
        return float(np.max(np.abs(self.P_mat - self.P_mat.conj().T)))


@dataclass
class RlsState:
    """
    Exponentially weighted RLS state.

    Attributes:
        w (np.ndarray): Receiver coefficients
        P_mat (np.ndarray): Inverse of the weighted input correlation matrix
        lam (float): Forgetting factor in (0, 1]
    """

    w: np.ndarray
    P_mat: np.ndarray
    lam: float = 0.997

    @classmethod
    def initial(cls, w0: np.ndarray, lam: float = 0.997, epsilon: float = 0.01) -> "RlsState":
        if not 0.0 < lam <= 1.0:
            raise ValueError("Forgetting factor must lie in (0, 1]")
        M = len(w0)
        return cls(w=np.array(w0, dtype=complex), P_mat=np.eye(M, dtype=complex) / epsilon, lam=lam)


@dataclass(frozen=True)
class UpdateOutcome:
    """
    Result of one adaptation step.

    Attributes:
        updated (bool): Whether the weights changed
        prior_error (complex): Error b - w^H r before the update
        step_or_lambda (float): Step applied to e* r for order-one updates
            (NLMS, SM-NLMS, AP windows holding one column), mu for wider AP
            windows, 1 / (lambda + r^H P r) for RLS or the multiplier lambda
            for BEACON; zero exactly when no update happened
    """

    updated: bool
    prior_error: complex
    step_or_lambda: float

    def __post_init__(self):
        if self.step_or_lambda < 0:
            raise ValueError("Step size must be non-negative")
        if not self.updated and self.step_or_lambda != 0.0:
            raise ValueError("A skipped update must report a zero step")

    @classmethod
    def skipped(cls, prior_error: complex) -> "UpdateOutcome":
        return cls(updated=False, prior_error=complex(prior_error), step_or_lambda=0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "updated": self.updated,
            "prior_error_magnitude": abs(self.prior_error),
            "step_or_lambda": self.step_or_lambda,
        }

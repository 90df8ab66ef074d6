"""
Signal Model Types - Spreading Codes, Channels and Per-Symbol Records

This module defines the value types of the DS-CDMA downlink model: the binary
spreading code of a user, its convolution (code-shift) matrix, the fading
channel state with its sum-of-sinusoids oscillator bank, and the per-symbol
record that keeps the simulation truth needed by genie metrics.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, Optional

import numpy as np


@dataclass(frozen=True)
class SpreadingCode:
    """
    Binary signature sequence of one user.

    Attributes:
        chips (np.ndarray): Length-N vector of +1/-1 chips
        user_index (int): Index of the code inside its family
    """

    chips: np.ndarray
    user_index: int = 0

    def __post_init__(self):
        chips = np.asarray(self.chips, dtype=np.int8)
        if chips.ndim != 1 or chips.size == 0:
            raise ValueError("Spreading code must be a non-empty 1-D sequence")
        if not np.all(np.abs(chips) == 1):
            raise ValueError("Spreading code chips must be +1 or -1")
        chips.setflags(write=False)
        object.__setattr__(self, "chips", chips)

    @property
    def N(self) -> int:
        """Processing gain (code length in chips)."""
        return int(self.chips.size)

    def __repr__(self) -> str:
        return f"<SpreadingCode(user={self.user_index}, N={self.N})>"


@dataclass(frozen=True)
class ConvolutionMatrix:
    """
    M x L matrix whose column j is the spreading code shifted down by j chips.

    Attributes:
        entries (np.ndarray): Real (M, L) matrix, M = N + L - 1
        code (SpreadingCode): Code the matrix was built from
    """

    entries: np.ndarray
    code: SpreadingCode

    @property
    def M(self) -> int:
        return int(self.entries.shape[0])

    @property
    def L(self) -> int:
        return int(self.entries.shape[1])

    @property
    def gram(self) -> np.ndarray:
        """C^H C (real symmetric L x L)."""
        return self.entries.T @ self.entries

    @cached_property
    def lambda_max(self) -> float:
        """Largest eigenvalue of C^H C."""
        return float(np.linalg.eigvalsh(self.gram)[-1])

    def apply(self, h: np.ndarray) -> np.ndarray:
        """Effective signature C h for a chip-spaced channel vector h."""
        return self.entries @ h

    def adjoint(self, v: np.ndarray) -> np.ndarray:
        """C^H v."""
        return self.entries.T @ v


@dataclass(frozen=True)
class ChannelState:
    """
    Multipath fading channel realised with a sum-of-sinusoids Clarke model.

    The path gains are constant during one symbol and advance one symbol
    interval per call of ``evolve_channel``.

    Attributes:
        taps (np.ndarray): Complex gains h_0..h_{Lp-1} of the propagation paths
        relative_powers_db (np.ndarray): Relative path powers in dB
        tap_delays_chips (np.ndarray): Path delays in chips (first path at 0)
        frequencies (np.ndarray): (Lp, n_sinusoids) Doppler shifts, cycles/symbol
        phases (np.ndarray): (Lp, n_sinusoids) initial oscillator phases
        fdT (float): Normalised Doppler frequency (cycles/symbol)
        span (int): Length of the chip-spaced impulse response
        symbol_index (int): Symbol interval the taps belong to
    """

    taps: np.ndarray
    relative_powers_db: np.ndarray
    tap_delays_chips: np.ndarray
    frequencies: np.ndarray
    phases: np.ndarray
    fdT: float
    span: int
    symbol_index: int = 0

    @property
    def n_paths(self) -> int:
        return int(self.taps.size)

    @property
    def path_scales(self) -> np.ndarray:
        """Amplitude scale per path; powers normalised to unit total power."""
        linear = 10.0 ** (np.asarray(self.relative_powers_db, dtype=float) / 10.0)
        return np.sqrt(linear / linear.sum())

    def impulse_response(self) -> np.ndarray:
        """Chip-spaced channel vector h (length ``span``) with taps at their delays."""
        h = np.zeros(self.span, dtype=complex)
        np.add.at(h, np.asarray(self.tap_delays_chips, dtype=int), self.taps)
        return h

    def to_dict(self) -> Dict[str, Any]:
        return {
            "symbol_index": self.symbol_index,
            "fdT": self.fdT,
            "span": self.span,
            "tap_delays_chips": [int(d) for d in self.tap_delays_chips],
            "relative_powers_db": [float(p) for p in self.relative_powers_db],
            "taps": [complex(t) for t in self.taps],
        }


@dataclass
class SymbolRecord:
    """
    Simulation truth for one received symbol interval.

    ``received`` is assembled as desired + interference + noise, so the
    decomposition holds to arithmetic precision. The interference component is
    additionally split into multiple-access (other users, current symbol) and
    intersymbol (all users, neighbour symbols) parts.
    """

    received: np.ndarray
    symbols: np.ndarray
    amplitudes: np.ndarray
    channel_snapshot: np.ndarray
    desired_component: np.ndarray
    interference_component: np.ndarray
    noise_component: np.ndarray
    mai_component: Optional[np.ndarray] = None
    isi_component: Optional[np.ndarray] = None
    desired_user: int = 0
    extras: Dict[str, Any] = field(default_factory=dict)

    @property
    def disturbance(self) -> np.ndarray:
        """Interference plus noise seen by the desired user."""
        return self.interference_component + self.noise_component

    @property
    def desired_symbol(self) -> complex:
        return self.symbols[self.desired_user]

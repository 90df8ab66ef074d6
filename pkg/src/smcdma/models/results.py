"""
Per-Run Simulation Results
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np


@dataclass
class RunResult:
    """
    Per-iteration measurements of one Monte-Carlo run.

    Arrays indexed by algorithm have shape (n_algorithms, n_symbols), in the
    order of ``labels``. Power terms are the instantaneous quadratic forms
    |w^H s|^2 of the desired signal and of interference plus noise, with w the
    weights used for the decision at that symbol.

    Attributes:
        run_index (int): Run counter the seed was derived from
        labels (list): Algorithm labels
        signal_power (np.ndarray): |w^H desired|^2
        interference_power (np.ndarray): |w^H (MAI + ISI + noise)|^2
        gamma (np.ndarray): Bound in force at each symbol
        v_hat (np.ndarray): Tracked interference power after each symbol
        genie_power (np.ndarray): True interference power at the RAKE output
        channel_error (np.ndarray): ||h_hat - h||^2 before each estimator step
        A_hat (np.ndarray): Amplitude estimate before each estimator step
        bit_errors (np.ndarray): Post-training decision errors per algorithm
        updates (np.ndarray): Weight updates per algorithm
        bits (int): Post-training symbols
        symbols (int): Symbols in the packet
        traces (dict): Optional detailed traces (filter, channel)
    """

    run_index: int
    labels: List[str]
    signal_power: np.ndarray
    interference_power: np.ndarray
    gamma: np.ndarray
    v_hat: np.ndarray
    genie_power: np.ndarray
    channel_error: np.ndarray
    A_hat: np.ndarray
    bit_errors: np.ndarray
    updates: np.ndarray
    bits: int
    symbols: int
    traces: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def allocate(cls, run_index: int, labels: List[str], n_symbols: int, bits: int) -> "RunResult":
        shape = (len(labels), n_symbols)
        return cls(
            run_index=run_index,
            labels=list(labels),
            signal_power=np.zeros(shape),
            interference_power=np.zeros(shape),
            gamma=np.zeros(shape),
            v_hat=np.zeros(shape),
            genie_power=np.zeros(shape),
            channel_error=np.zeros(shape),
            A_hat=np.zeros(shape),
            bit_errors=np.zeros(len(labels), dtype=int),
            updates=np.zeros(len(labels), dtype=int),
            bits=bits,
            symbols=n_symbols,
        )

    def update_rates(self) -> Dict[str, float]:
        return {label: float(self.updates[a]) / self.symbols for a, label in enumerate(self.labels)}

"""
Metrics Service - Output SINR, Bit Error Rate and Update Rate

Genie-aided performance measures of the adaptive receivers. The output SINR
uses the desired and interference-plus-noise components kept in every
SymbolRecord; the signal and interference correlation matrices are estimated
by averaging over Monte-Carlo runs at each iteration.

Key Features:
- SINR of a weight vector over an ensemble of records
- BER over the post-training part of a packet
- MetricAccumulator: associative merge of per-run results
- User capacity at a BER threshold
"""

import logging
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Union

import numpy as np

from ..models.errors import EmptyWindowError, UndefinedSinrError
from ..models.filters import ReceiverWeights, UpdateOutcome
from ..models.results import RunResult
from ..models.signal import SymbolRecord

logger = logging.getLogger(__name__)


def _weights(w: Union[ReceiverWeights, np.ndarray]) -> np.ndarray:
    return np.asarray(getattr(w, "w", w))


def sinr_at(w: Union[ReceiverWeights, np.ndarray],
            records: Union[SymbolRecord, Sequence[SymbolRecord]]) -> float:
    """
    Output SINR (w^H R_s w) / (w^H R_I w), linear scale.

    R_s and R_I are the sample averages of the desired and of the
    interference-plus-noise outer products over ``records``.

    Args:
        w: Receiver weights
        records: One record or an ensemble (runs at the same iteration)

    Returns:
        float: Linear SINR

    Raises:
        UndefinedSinrError: If w^H R_I w is not positive
    """
    if isinstance(records, SymbolRecord):
        records = [records]
    if not records:
        raise EmptyWindowError("No records to evaluate the SINR on")

    w = _weights(w)
    signal = np.mean([abs(np.vdot(w, record.desired_component)) ** 2 for record in records])
    interference = np.mean([abs(np.vdot(w, record.disturbance)) ** 2 for record in records])
    if interference <= 0.0:
        raise UndefinedSinrError("Interference-plus-noise power at the receiver output is zero")
    return float(signal / interference)


def sinr_db(value: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """10 log10 of a linear SINR."""
    return 10.0 * np.log10(value)


def ber(decisions: Sequence[float], truth: Sequence[float], skip_training: int = 0) -> float:
    """
    Fraction of wrong decisions after the training prefix.

    Raises:
        ValueError: If the sequences differ in length
        EmptyWindowError: If nothing remains after the training prefix
    """
    decisions = np.asarray(decisions)
    truth = np.asarray(truth)
    if decisions.shape != truth.shape:
        raise ValueError(f"decisions {decisions.shape} and truth {truth.shape} differ")
    window = slice(skip_training, None)
    if decisions[window].size == 0:
        raise EmptyWindowError(f"No symbols after the {skip_training}-symbol training prefix")
    return float(np.mean(decisions[window] != truth[window]))


def update_rate(outcomes: Iterable[UpdateOutcome]) -> float:
    """Fraction of symbols at which the weights were updated."""
    flags = [outcome.updated for outcome in outcomes]
    if not flags:
        raise EmptyWindowError("No update outcomes")
    return sum(flags) / len(flags)


def capacity_at(ber_by_K: Mapping[int, float], threshold: float) -> int:
    """
    Largest number of users supported before the BER first exceeds ``threshold``.

    User counts are scanned in increasing order; a load that passes only
    after a smaller one failed does not count. Returns 0 if the smallest
    load already fails.
    """
    capacity = 0
    for K in sorted(ber_by_K):
        if ber_by_K[K] > threshold:
            break
        capacity = K
    return capacity


class MetricAccumulator:
    """
    Cross-run sums of per-iteration measurements.

    Runs are added with ``add``; partial accumulators are combined with
    ``merge``. The harness merges in run-index order so that reductions are
    reproducible bit for bit.
    """

    TRACES = ("signal_power", "interference_power", "gamma", "v_hat",
              "genie_power", "channel_error", "A_hat")

    def __init__(self, labels: Sequence[str], n_iterations: int):
        self.labels: List[str] = list(labels)
        self.n_iterations = n_iterations
        shape = (len(self.labels), n_iterations)
        self.sums: Dict[str, np.ndarray] = {name: np.zeros(shape) for name in self.TRACES}
        self.bit_errors = np.zeros(len(self.labels), dtype=np.int64)
        self.updates = np.zeros(len(self.labels), dtype=np.int64)
        self.bits = 0
        self.symbols = 0
        self.runs = 0

    def _index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"Unknown algorithm '{label}'") from None

    def add(self, result: RunResult) -> None:
        """Add one run."""
        if result.labels != self.labels or result.symbols != self.n_iterations:
            raise ValueError("Run result does not match the accumulator layout")
        for name in self.TRACES:
            self.sums[name] += getattr(result, name)
        self.bit_errors += result.bit_errors
        self.updates += result.updates
        self.bits += result.bits
        self.symbols += result.symbols
        self.runs += 1

    def merge(self, other: "MetricAccumulator") -> "MetricAccumulator":
        """Return a new accumulator holding both sets of runs."""
        if other.labels != self.labels or other.n_iterations != self.n_iterations:
            raise ValueError("Cannot merge accumulators with different layouts")
        merged = MetricAccumulator(self.labels, self.n_iterations)
        for name in self.TRACES:
            merged.sums[name] = self.sums[name] + other.sums[name]
        merged.bit_errors = self.bit_errors + other.bit_errors
        merged.updates = self.updates + other.updates
        merged.bits = self.bits + other.bits
        merged.symbols = self.symbols + other.symbols
        merged.runs = self.runs + other.runs
        return merged

    def mean_trace(self, name: str, label: str) -> np.ndarray:
        """Run-averaged per-iteration trace."""
        if self.runs == 0:
            raise EmptyWindowError("No runs accumulated")
        return self.sums[name][self._index(label)] / self.runs

    def sinr_curve(self, label: str) -> np.ndarray:
        """
        Per-iteration SINR in dB from the cross-run averages.

        Raises:
            UndefinedSinrError: If some iteration has no interference power
        """
        a = self._index(label)
        signal = self.sums["signal_power"][a]
        interference = self.sums["interference_power"][a]
        if self.runs == 0 or np.any(interference <= 0.0):
            raise UndefinedSinrError(f"SINR undefined for {label}: zero interference power")
        return sinr_db(signal / interference)

    def ber(self, label: str) -> float:
        if self.bits == 0:
            raise EmptyWindowError("No post-training symbols accumulated")
        return float(self.bit_errors[self._index(label)]) / self.bits

    def update_rate(self, label: str) -> float:
        if self.symbols == 0:
            raise EmptyWindowError("No symbols accumulated")
        return float(self.updates[self._index(label)]) / self.symbols

    def summary(self, sinr_iteration: Optional[int] = None) -> Dict[str, Dict[str, float]]:
        """Per-algorithm update rate, BER and (optionally) SINR at one iteration."""
        result = {}
        for label in self.labels:
            entry = {"ur": self.update_rate(label)}
            if self.bits:
                entry["ber"] = self.ber(label)
            if sinr_iteration is not None:
                entry["sinr_db"] = float(self.sinr_curve(label)[sinr_iteration])
            result[label] = entry
        return result


def merge_all(accumulators: Sequence[MetricAccumulator]) -> MetricAccumulator:
    """Left fold of ``merge`` in the given order."""
    if not accumulators:
        raise EmptyWindowError("Nothing to merge")
    merged = accumulators[0]
    for accumulator in accumulators[1:]:
        merged = merged.merge(accumulator)
    return merged

"""
CSV Export Utilities

pandas-based writers for every table the simulator emits: code families,
channel / filter / bound / estimator traces, and the scenario result tables
(sinr.csv, ber.csv, interference.csv). All numeric columns are written with a
fixed float format so repeated runs produce identical bytes.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Mapping, Sequence

import numpy as np
import pandas as pd

from ..models.signal import SpreadingCode

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.10g"


def write_table(frame: pd.DataFrame, path: Path, header: bool = True) -> Path:
    """Write a frame as CSV with the deterministic float format."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, header=header, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.debug(f"Wrote {len(frame)} rows to {path}")
    return path


def codes_frame(codes: Sequence[SpreadingCode]) -> pd.DataFrame:
    """One row per code, one column per chip."""
    return pd.DataFrame(np.stack([code.chips.astype(int) for code in codes]))


def write_codes(codes: Sequence[SpreadingCode], path: Path) -> Path:
    """Code family as a headerless +1/-1 matrix."""
    return write_table(codes_frame(codes), path, header=False)


def channel_trace_frame(taps: np.ndarray) -> pd.DataFrame:
    """Long format (symbol, tap, real, imag) of a (n_symbols, n_taps) gain array."""
    taps = np.atleast_2d(taps)
    n_symbols, n_taps = taps.shape
    return pd.DataFrame(
        {
            "symbol": np.repeat(np.arange(n_symbols), n_taps),
            "tap": np.tile(np.arange(n_taps), n_symbols),
            "real": taps.real.ravel(),
            "imag": taps.imag.ravel(),
        }
    )


def filter_trace_frame(rows: List[Dict[str, Any]]) -> pd.DataFrame:
    """Per-symbol filter trace: symbol, algorithm, |e|, gamma, updated, step."""
    columns = ["symbol", "algorithm", "error", "gamma", "updated", "step"]
    frame = pd.DataFrame(rows, columns=columns)
    frame["updated"] = frame["updated"].astype(int)
    return frame


def bound_trace_frame(labels: Sequence[str], gamma: np.ndarray, v_hat: np.ndarray) -> pd.DataFrame:
    """Bound trajectories: symbol, algorithm, gamma, v_hat."""
    return _long_frame(labels, {"gamma": gamma, "v_hat": v_hat})


def estimator_trace_frame(channel_error: np.ndarray, A_hat: np.ndarray, d_power: np.ndarray,
                          genie_power: np.ndarray) -> pd.DataFrame:
    """Estimator trace: symbol, ||h_hat - h||, A_hat, |d|^2, genie interference power."""
    return pd.DataFrame(
        {
            "symbol": np.arange(len(channel_error)),
            "channel_error": np.sqrt(channel_error),
            "A_hat": A_hat,
            "d_power": d_power,
            "genie_power": genie_power,
        }
    )


def sinr_frame(curves: Mapping[str, np.ndarray]) -> pd.DataFrame:
    """sinr.csv: iteration, algorithm, mean_sinr_db."""
    frames = [
        pd.DataFrame({"iteration": np.arange(len(curve)), "algorithm": label, "mean_sinr_db": curve})
        for label, curve in curves.items()
    ]
    return pd.concat(frames, ignore_index=True)


def ber_frame(rows: List[Dict[str, Any]]) -> pd.DataFrame:
    """ber.csv: x_value, algorithm, ber, ur."""
    return pd.DataFrame(rows, columns=["x_value", "algorithm", "ber", "ur"])


def interference_frame(v_hat: np.ndarray, genie_power: np.ndarray) -> pd.DataFrame:
    """interference.csv: iteration, v_hat, genie_power."""
    return pd.DataFrame(
        {"iteration": np.arange(len(v_hat)), "v_hat": v_hat, "genie_power": genie_power}
    )


def _long_frame(labels: Sequence[str], arrays: Mapping[str, np.ndarray]) -> pd.DataFrame:
    frames = []
    for a, label in enumerate(labels):
        data = {"symbol": None, "algorithm": label}
        data.update({name: values[a] for name, values in arrays.items()})
        n = len(next(iter(arrays.values()))[a])
        data["symbol"] = np.arange(n)
        frames.append(pd.DataFrame(data))
    return pd.concat(frames, ignore_index=True)

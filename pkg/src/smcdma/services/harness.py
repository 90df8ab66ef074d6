"""
Harness Service - Monte-Carlo Scenario Runner

This service executes a configured scenario: it expands the sweep grid into
points, runs the independent Monte-Carlo runs of each point (inline or on a
process pool), merges the per-run results in run-index order and writes the
CSV tables plus a manifest echoing every effective parameter.

Key Features:
- Five scenarios: interference tracking, SINR convergence, BER versus Eb/N0,
  number of users and Doppler
- Per-run seeds split from the master seed (order-independent runs)
- Byte-stable CSV output for a given configuration and seed
"""

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from itertools import repeat
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from .. import __version__
from ..models.config import ExperimentConfig
from ..models.errors import SmCdmaError
from ..models.reports import RunArtifact
from ..models.results import RunResult
from ..utils import export
from .analysis import complexity_per_symbol
from .metrics import MetricAccumulator, capacity_at
from .pipeline import simulate_run

logger = logging.getLogger(__name__)

# Sweep parameter and grid field of the BER scenarios.
SWEEPS: Dict[str, Tuple[str, str]] = {
    "ber-vs-snr": ("ebn0_db", "ebn0_grid"),
    "ber-vs-users": ("K", "K_grid"),
    "ber-vs-doppler": ("fdT", "fdT_grid"),
}

# Symbol after which the interference estimate is compared with the truth.
TRACKING_SETTLE = 300


def effective_workers(config: ExperimentConfig) -> int:
    """Pool size: the configuration value, else SMCDMA_WORKERS, else 1."""
    if "workers" in config.model_fields_set:
        return config.workers
    value = os.getenv("SMCDMA_WORKERS")
    return max(int(value), 1) if value else config.workers


def scenario_points(config: ExperimentConfig) -> List[Tuple[Optional[float], ExperimentConfig]]:
    """
    Expand the scenario into (x_value, configuration) points.

    Every point is validated again with its swept value in place.

    Raises:
        ConfigError: If a grid value is invalid for the configuration
    """
    if config.scenario not in SWEEPS:
        return [(None, config)]
    field, grid = SWEEPS[config.scenario]
    values = config.model_dump(exclude_unset=True)
    return [(value, ExperimentConfig.build({**values, field: value})) for value in getattr(config, grid)]


def run_point(config: ExperimentConfig, workers: int = 1,
              keep_traces: bool = False) -> Tuple[MetricAccumulator, Optional[RunResult]]:
    """
    Run all Monte-Carlo runs of one point.

    Args:
        config (ExperimentConfig): Point configuration
        workers (int): Process pool size; 1 runs inline
        keep_traces (bool): Keep the detailed traces of run 0

    Returns:
        tuple: Merged accumulator and run 0 (for its traces)
    """
    labels = [spec.label for spec in config.algorithm_specs()]
    accumulator = MetricAccumulator(labels, config.packet)
    indices = range(config.runs)
    traces = [keep_traces and index == 0 for index in indices]

    first: Optional[RunResult] = None
    if workers <= 1:
        results = map(simulate_run, repeat(config), indices, traces)
        for result in results:
            accumulator.add(result)
            first = first or result
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            # map() yields in submission order, which fixes the reduction order.
            for result in pool.map(simulate_run, repeat(config), indices, traces):
                accumulator.add(result)
                first = first or result
    return accumulator, first


def _manifest_text(config: ExperimentConfig, extra: Dict[str, object]) -> str:
    lines = [
        f"scenario = {json.dumps(config.scenario)}",
        f"seed = {config.seed}",
        f"version = {json.dumps(__version__)}",
    ]
    for key, value in sorted(config.effective().items()):
        lines.append(f"{key} = {json.dumps(value, sort_keys=True)}")
    for key, value in extra.items():
        lines.append(f"{key} = {json.dumps(value, sort_keys=True)}")
    return "\n".join(lines) + "\n"


def _write_traces(out_dir: Path, result: RunResult) -> List[Path]:
    traces = result.traces
    lane = 0
    return [
        export.write_table(export.filter_trace_frame(traces["filter"]), out_dir / "filter_trace.csv"),
        export.write_table(export.channel_trace_frame(traces["channel"]), out_dir / "channel_trace.csv"),
        export.write_table(
            export.estimator_trace_frame(result.channel_error[lane], result.A_hat[lane],
                                         traces["d_power"][lane], result.genie_power[lane]),
            out_dir / "estimator_trace.csv",
        ),
    ]


def _tracking_error(v_hat: np.ndarray, genie: np.ndarray) -> float:
    settle = min(TRACKING_SETTLE, len(v_hat) // 2)
    return float(np.mean(np.abs(v_hat[settle:] - genie[settle:]) / genie[settle:]))


def run_scenario(config: ExperimentConfig, out_dir: Path) -> RunArtifact:
    """
    Execute a scenario and write its outputs.

    Args:
        config (ExperimentConfig): Validated configuration
        out_dir (Path): Output directory (created if missing)

    Returns:
        RunArtifact: Written files, summary and manifest values

    Raises:
        ConfigError: If the algorithm list or a sweep point is invalid (before any run)
        NumericalError: If a run fails numerically
    """
    specs = config.algorithm_specs()
    labels = [spec.label for spec in specs]
    points = scenario_points(config)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    workers = effective_workers(config)
    logger.info(f"Running {config.scenario}: {', '.join(labels)} ({config.runs} runs, {workers} workers)")

    try:
        files: List[Path] = []
        summary: Dict[str, object] = {}
        extra: Dict[str, object] = {}
        rates: Dict[str, List[float]] = {label: [] for label in labels}

        if config.scenario in SWEEPS:
            rows = []
            ber_by_x: Dict[str, Dict[float, float]] = {label: {} for label in labels}
            for index, (x_value, point) in enumerate(points):
                accumulator, first = run_point(point, workers, keep_traces=config.trace and index == 0)
                for label in labels:
                    value, ur = accumulator.ber(label), accumulator.update_rate(label)
                    rows.append({"x_value": x_value, "algorithm": label, "ber": value, "ur": ur})
                    ber_by_x[label][x_value] = value
                    rates[label].append(ur)
                logger.info(f"{config.scenario} point {x_value}: done")
                if config.trace and index == 0:
                    files.extend(_write_traces(out_dir, first))
            files.append(export.write_table(export.ber_frame(rows), out_dir / "ber.csv"))

            for label in labels:
                mean_ber = float(np.mean(list(ber_by_x[label].values())))
                summary[label] = f"ber={mean_ber:.4g} ur={np.mean(rates[label]):.3f}"
                if config.scenario == "ber-vs-users":
                    by_K = {int(K): value for K, value in ber_by_x[label].items()}
                    capacity = capacity_at(by_K, config.ber_threshold)
                    summary[label] += f" capacity={capacity}"
                    extra[f"capacity[{label}]"] = capacity
        else:
            accumulator, first = run_point(config, workers, keep_traces=config.trace)
            if config.trace:
                files.extend(_write_traces(out_dir, first))

            gamma = np.array([accumulator.mean_trace("gamma", label) for label in labels])
            v_hat = np.array([accumulator.mean_trace("v_hat", label) for label in labels])
            files.append(export.write_table(export.bound_trace_frame(labels, gamma, v_hat),
                                            out_dir / "bounds.csv"))

            if config.scenario == "interference-tracking":
                genie = accumulator.mean_trace("genie_power", labels[0])
                files.append(export.write_table(export.interference_frame(v_hat[0], genie),
                                                out_dir / "interference.csv"))
                error = _tracking_error(v_hat[0], genie)
                summary["tracking_error"] = f"{error:.4f}"
                extra["tracking_error"] = error

            curves = {label: accumulator.sinr_curve(label) for label in labels}
            files.append(export.write_table(export.sinr_frame(curves), out_dir / "sinr.csv"))
            for label in labels:
                ur = accumulator.update_rate(label)
                rates[label].append(ur)
                summary[label] = f"sinr={curves[label][-1]:.2f}dB ur={ur:.3f}"

        M = config.N + config.channel_span - 1
        for spec in specs:
            extra[f"complexity[{spec.label}]"] = complexity_per_symbol(
                spec.family, M, spec.P, float(np.mean(rates[spec.label]))
            )

        manifest_path = out_dir / "manifest.txt"
        manifest_path.write_text(_manifest_text(config, extra))
        files.append(manifest_path)

        artifact = RunArtifact(scenario=config.scenario, out_dir=out_dir, files=files,
                               summary=summary, manifest=config.effective())
        logger.info(artifact.summary_line())
        return artifact

    except SmCdmaError:
        logger.error(f"{config.scenario} failed")
        raise
    except Exception as e:
        logger.error(f"{config.scenario} failed unexpectedly: {e}")
        raise

"""
Pipeline Service - One Monte-Carlo Run of the Receiver Chain

A run draws the channel, path delays, user amplitudes and data for one packet,
then processes it symbol by symbol. Every configured algorithm gets its own
receiver lane (adaptive filter, bound controller and channel/amplitude
estimators) fed with the same received vectors, so the algorithms are compared
on identical data.

Per symbol and lane:
1. decide with the current weights
2. pick the reference symbol (training symbol, then the decision)
3. form the RAKE output and the interference sample d
4. update the filter with the bound in force
5. step the bound controller
6. step the estimators
"""

import logging
from typing import Any, Dict, List, Optional

import numpy as np

from ..models.config import AlgorithmSpec, ExperimentConfig
from ..models.errors import StateCorruptionError
from ..models.results import RunResult
from ..models.signal import ConvolutionMatrix, SymbolRecord
from ..models.tracking import EstimatorState
from ..utils.seeding import run_generator
from .analysis import step_bounds
from .bounds import BoundController, initial_gamma
from .cdma_model import (
    build_convolution_matrix,
    create_channel,
    draw_amplitudes,
    draw_symbols,
    evolve_channel,
    gold_family,
    noise_variance,
    synthesize_symbol,
)
from .estimators import (
    estimator_step,
    initial_estimator_state,
    interference_sample,
    rake_interference_power,
    rake_output,
)
from .sm_filters import detect, make_filter, matched_filter_init

logger = logging.getLogger(__name__)


class ReceiverLane:
    """
    Receiver chain of one algorithm inside a run.

    Baselines carry a fixed bound controller as well; its gamma is ignored by
    the filter but its interference tracker keeps the traces comparable.
    """

    def __init__(self, spec: AlgorithmSpec, C: ConvolutionMatrix, estimator: EstimatorState,
                 sigma2: float, keep_trace: bool = False):
        self.spec = spec
        self.C = C
        self.estimator = estimator
        w0 = matched_filter_init(C, estimator.h_hat)
        self.receiver = make_filter(spec, w0)

        if spec.gamma0 is None:
            gamma0 = initial_gamma(sigma2, float(np.vdot(w0, w0).real))
        else:
            gamma0 = spec.gamma0
        kind = "fixed" if spec.bound == "none" else spec.bound
        self.bound = BoundController.create(kind, sigma2, gamma0=gamma0, alpha=spec.alpha,
                                            beta=spec.beta, tau=spec.tau)
        self.keep_trace = keep_trace
        self.trace: List[Dict[str, Any]] = []
        self.d_power: List[float] = []

    @property
    def label(self) -> str:
        return self.spec.label

    def step(self, i: int, record: SymbolRecord, reference: Optional[complex],
             h: np.ndarray, result: RunResult, a: int) -> float:
        """
        Process one symbol.

        Args:
            i (int): Symbol index
            record (SymbolRecord): Received vector and its components
            reference (complex, optional): Training symbol; None in decision-directed mode
            h (np.ndarray): True chip-spaced channel for the genie traces
            result (RunResult): Run result to write row ``a`` of
            a (int): Lane index

        Returns:
            float: Hard decision
        """
        r = record.received
        w = self.receiver.weights.copy()
        decision, _ = detect(w, r)
        b = decision if reference is None else reference

        x = rake_output(self.estimator, r)
        d = interference_sample(self.estimator, x, b)

        gamma = self.bound.gamma
        outcome = self.receiver.update(r, b, gamma)
        if not np.all(np.isfinite(self.receiver.weights)):
            raise StateCorruptionError(
                f"{self.label}: weights became non-finite at symbol {i} in run {result.run_index}"
            )
        self.bound.step(w, d)

        result.channel_error[a, i] = self.estimator.channel_error(h) ** 2
        result.A_hat[a, i] = self.estimator.A_hat
        result.genie_power[a, i] = rake_interference_power(self.estimator, record.disturbance)
        self.estimator = estimator_step(self.estimator, self.C, b, r)

        result.signal_power[a, i] = abs(np.vdot(w, record.desired_component)) ** 2
        result.interference_power[a, i] = abs(np.vdot(w, record.disturbance)) ** 2
        result.gamma[a, i] = gamma
        result.v_hat[a, i] = self.bound.v_hat
        if outcome.updated:
            result.updates[a] += 1

        if self.keep_trace:
            self.d_power.append(abs(d) ** 2)
            self.trace.append(
                {
                    "symbol": i,
                    "algorithm": self.label,
                    "error": abs(outcome.prior_error),
                    "gamma": gamma,
                    "updated": outcome.updated,
                    "step": outcome.step_or_lambda,
                }
            )
        return decision


def simulate_run(config: ExperimentConfig, run_index: int, keep_traces: bool = False) -> RunResult:
    """
    Simulate one packet for every configured algorithm.

    Args:
        config (ExperimentConfig): Validated configuration (one sweep point)
        run_index (int): Run counter; selects the run's random stream
        keep_traces (bool): Keep per-symbol filter, channel and estimator traces

    Returns:
        RunResult: Per-iteration measurements of all algorithms

    Raises:
        NumericalError: If a filter or estimator fails numerically
    """
    specs = config.algorithm_specs()
    rng = run_generator(config.seed, run_index)
    desired = config.desired_user

    codes = gold_family(config.gold_degree)[: config.K]
    channel = create_channel(rng, config.path_powers_db, config.fdT, config.channel_span,
                             config.n_sinusoids)
    amplitudes = draw_amplitudes(rng, config.K, desired, config.amplitude_spread_db)
    symbols = draw_symbols(rng, config.K, config.packet)
    sigma2 = noise_variance(config.ebn0_db, config.N, amplitudes[desired])

    C = build_convolution_matrix(codes[desired], config.channel_span)
    limits = step_bounds(C, sigma_b2=1.0, sigma_A2=amplitudes[desired] ** 2)
    estimator = initial_estimator_state(C, mu_h=config.mu_h_scale * limits.mu_h_max,
                                        mu_A=config.mu_A_scale * limits.mu_A_max)

    lanes = [ReceiverLane(spec, C, estimator, sigma2, keep_trace=keep_traces) for spec in specs]
    result = RunResult.allocate(run_index, [lane.label for lane in lanes], config.packet,
                                bits=config.packet - config.training)
    taps = []

    for i in range(config.packet):
        record = synthesize_symbol(codes, channel, amplitudes, symbols[:, i:i + 3], sigma2, rng,
                                   desired_user=desired)
        truth = record.desired_symbol
        reference = truth if i < config.training else None
        h = channel.impulse_response()
        if keep_traces:
            taps.append(channel.taps.copy())

        for a, lane in enumerate(lanes):
            decision = lane.step(i, record, reference, h, result, a)
            if reference is None and decision != truth:
                result.bit_errors[a] += 1

        channel = evolve_channel(channel)

    if np.any(result.bit_errors):
        # Wrong decisions are fed back to the estimators as reference symbols.
        logger.debug(
            f"Run {run_index}: decision errors fed back "
            + ", ".join(f"{label}={n}" for label, n in zip(result.labels, result.bit_errors))
        )

    if keep_traces:
        result.traces = {
            "filter": [row for lane in lanes for row in lane.trace],
            "channel": np.asarray(taps),
            "d_power": np.asarray([lane.d_power for lane in lanes]),
        }
    logger.debug(f"Run {run_index} finished: {result.update_rates()}")
    return result

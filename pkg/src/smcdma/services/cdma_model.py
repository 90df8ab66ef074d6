"""
CDMA Model Service - DS-CDMA Downlink Signal Synthesis

This service synthesises the chip-rate received vector of a symbol-synchronous
DS-CDMA downlink: every user's BPSK symbol spread by a Gold code, passed
through a common multipath fading channel, plus intersymbol interference from
the neighbouring symbols and circular complex Gaussian noise.

Key Features:
- Gold code families from preferred pairs of maximal-length sequences
- Banded convolution (code-shift) matrices
- Clarke fading realised as a bank of equal-power sinusoids per path
- Received vectors with separately stored desired / MAI / ISI / noise parts
"""

import logging
from dataclasses import replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..models.errors import DimensionError, UnsupportedDegreeError
from ..models.signal import ChannelState, ConvolutionMatrix, SpreadingCode, SymbolRecord

logger = logging.getLogger(__name__)

# Preferred pairs of primitive polynomials, given by their exponents (the
# constant term is implied). Degree 5: x^5+x^2+1 and x^5+x^4+x^3+x^2+1.
PREFERRED_PAIRS: Dict[int, Tuple[Tuple[int, ...], Tuple[int, ...]]] = {
    5: ((5, 2), (5, 4, 3, 2)),
    6: ((6, 1), (6, 5, 2, 1)),
    7: ((7, 3), (7, 3, 2, 1)),
}


def m_sequence(exponents: Sequence[int]) -> np.ndarray:
    """
    Generate one period of a maximal-length binary sequence.

    The recurrence is a[n+d] = XOR of a[n+t] over the polynomial exponents
    t < d (including t = 0), started from the all-ones state.

    Args:
        exponents (Sequence[int]): Polynomial exponents, highest first, without 0

    Returns:
        np.ndarray: 0/1 sequence of length 2^d - 1
    """
    degree = max(exponents)
    feedback = [t for t in exponents if t < degree] + [0]
    length = 2 ** degree - 1

    bits = np.zeros(length + degree, dtype=np.int8)
    bits[:degree] = 1
    for n in range(length):
        value = 0
        for t in feedback:
            value ^= bits[n + t]
        bits[n + degree] = value
    return bits[:length]


def gold_family(degree: int = 5) -> List[SpreadingCode]:
    """
    Build the Gold code family of a given shift-register degree.

    The family holds the two m-sequences of the preferred pair followed by
    their modulo-2 sums over every relative shift: 2^degree + 1 codes of
    length 2^degree - 1, mapped 0 -> +1 and 1 -> -1.

    Args:
        degree (int): Shift-register degree (5, 6 or 7)

    Returns:
        List[SpreadingCode]: Deterministic code family

    Raises:
        UnsupportedDegreeError: If no preferred pair is tabulated for degree
    """
    if degree not in PREFERRED_PAIRS:
        raise UnsupportedDegreeError(
            f"No preferred pair for degree {degree}; supported: {sorted(PREFERRED_PAIRS)}"
        )

    first, second = PREFERRED_PAIRS[degree]
    u = m_sequence(first)
    v = m_sequence(second)

    sequences = [u, v] + [u ^ np.roll(v, -shift) for shift in range(u.size)]
    codes = [
        SpreadingCode(chips=(1 - 2 * seq).astype(np.int8), user_index=index)
        for index, seq in enumerate(sequences)
    ]
    logger.debug(f"Generated {len(codes)} Gold codes of length {u.size}")
    return codes


def periodic_cross_correlation(a: SpreadingCode, b: SpreadingCode) -> np.ndarray:
    """Periodic cross-correlation of two codes over every cyclic shift."""
    x = a.chips.astype(int)
    y = b.chips.astype(int)
    return np.array([int(np.dot(x, np.roll(y, shift))) for shift in range(x.size)])


def build_convolution_matrix(code: SpreadingCode, L_p: int) -> ConvolutionMatrix:
    """
    Build the M x L_p matrix of one-chip shifted copies of a code.

    Args:
        code (SpreadingCode): Signature sequence of length N
        L_p (int): Number of chip-spaced channel taps

    Returns:
        ConvolutionMatrix: Matrix with M = N + L_p - 1 rows
    """
    if L_p < 1:
        raise ValueError("L_p must be at least 1")
    N = code.N
    entries = np.zeros((N + L_p - 1, L_p))
    for j in range(L_p):
        entries[j:j + N, j] = code.chips
    return ConvolutionMatrix(entries=entries, code=code)


def _oscillator_taps(
    frequencies: np.ndarray, phases: np.ndarray, scales: np.ndarray, t: np.ndarray
) -> np.ndarray:
    """Sum-of-sinusoids tap values at symbol times t, shape (len(t), n_paths)."""
    n_sinusoids = frequencies.shape[1]
    arg = 2.0 * np.pi * frequencies[None, :, :] * t[:, None, None] + phases[None, :, :]
    return scales[None, :] * np.exp(1j * arg).sum(axis=2) / np.sqrt(n_sinusoids)


def create_channel(
    rng: np.random.Generator,
    relative_powers_db: Sequence[float] = (0.0, -3.0, -6.0),
    fdT: float = 1e-4,
    span: int = 6,
    n_sinusoids: int = 32,
    delays: Optional[Sequence[int]] = None,
) -> ChannelState:
    """
    Draw a fading channel realisation for one run.

    Path delays are drawn once: the first path at 0 chips, each following
    path 1 or 2 chips after its predecessor. Each path gets a bank of
    equal-power sinusoids whose arrival angles are an equally spaced grid with
    a uniformly random rotation, and independent uniform phases.

    Args:
        rng (np.random.Generator): Run generator
        relative_powers_db (Sequence[float]): Path powers in dB
        fdT (float): Normalised Doppler frequency (cycles/symbol)
        span (int): Length of the chip-spaced impulse response
        n_sinusoids (int): Sinusoids per path
        delays (Sequence[int], optional): Fixed path delays instead of random ones

    Returns:
        ChannelState: Channel at symbol 0
    """
    if fdT < 0:
        raise ValueError("fdT must be non-negative")

    powers = np.asarray(relative_powers_db, dtype=float)
    n_paths = powers.size
    if delays is None:
        spacing = rng.integers(1, 3, size=n_paths - 1)
        delays = np.concatenate(([0], np.cumsum(spacing))).astype(int)
    delays = np.asarray(delays, dtype=int)
    if delays.size != n_paths or delays.max() >= span:
        raise DimensionError(f"Path delays {delays.tolist()} do not fit a span of {span}")

    rotation = rng.uniform(0.0, 2.0 * np.pi, size=(n_paths, 1))
    angles = 2.0 * np.pi * np.arange(n_sinusoids)[None, :] / n_sinusoids + rotation
    frequencies = fdT * np.cos(angles)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=(n_paths, n_sinusoids))

    state = ChannelState(
        taps=np.zeros(n_paths, dtype=complex),
        relative_powers_db=powers,
        tap_delays_chips=delays,
        frequencies=frequencies,
        phases=phases,
        fdT=float(fdT),
        span=int(span),
        symbol_index=0,
    )
    taps = _oscillator_taps(frequencies, phases, state.path_scales, np.array([0.0]))[0]
    return replace(state, taps=taps)


def static_channel(taps: Sequence[complex], delays: Optional[Sequence[int]] = None,
                   span: Optional[int] = None) -> ChannelState:
    """Time-invariant channel with given path gains (used by tests and oracles)."""
    taps = np.asarray(taps, dtype=complex)
    delays = np.arange(taps.size) if delays is None else np.asarray(delays, dtype=int)
    span = int(delays.max() + 1) if span is None else span
    return ChannelState(
        taps=taps,
        relative_powers_db=np.zeros(taps.size),
        tap_delays_chips=delays,
        frequencies=np.zeros((taps.size, 1)),
        phases=np.zeros((taps.size, 1)),
        fdT=0.0,
        span=span,
        symbol_index=0,
    )


def evolve_channel(state: ChannelState, rng: Optional[np.random.Generator] = None) -> ChannelState:
    """
    Advance the channel by one symbol interval.

    The oscillator bank is fixed per run, so ``rng`` is not consumed; it is
    accepted to keep the per-symbol pipeline signature uniform.

    Args:
        state (ChannelState): Channel at symbol i
        rng (np.random.Generator, optional): Unused

    Returns:
        ChannelState: Channel at symbol i + 1
    """
    index = state.symbol_index + 1
    if state.fdT == 0.0:
        return replace(state, symbol_index=index)
    taps = _oscillator_taps(
        state.frequencies, state.phases, state.path_scales, np.array([float(index)])
    )[0]
    return replace(state, taps=taps, symbol_index=index)


def channel_trajectory(state: ChannelState, n_symbols: int) -> np.ndarray:
    """Path gains for symbols state.symbol_index .. +n_symbols-1, shape (n_symbols, n_paths)."""
    if state.fdT == 0.0:
        return np.tile(state.taps, (n_symbols, 1))
    t = state.symbol_index + np.arange(n_symbols, dtype=float)
    return _oscillator_taps(state.frequencies, state.phases, state.path_scales, t)


def draw_amplitudes(rng: np.random.Generator, K: int, desired_user: int = 0,
                    spread_db: float = 3.0) -> np.ndarray:
    """
    Draw user amplitudes for one run.

    The desired user has unit amplitude; interferer powers relative to it are
    log-normal with ``spread_db`` standard deviation.
    """
    power_db = rng.normal(0.0, spread_db, size=K)
    amplitudes = 10.0 ** (power_db / 20.0)
    amplitudes[desired_user] = 1.0
    return amplitudes


def draw_symbols(rng: np.random.Generator, K: int, n_symbols: int) -> np.ndarray:
    """
    BPSK symbols for a packet with one guard symbol on each side.

    Column 0 is symbol -1 and column n_symbols + 1 is symbol n_symbols, so the
    window of symbol i is columns i, i + 1, i + 2.
    """
    return rng.choice(np.array([-1.0, 1.0]), size=(K, n_symbols + 2))


def noise_variance(ebn0_db: float, N: int, desired_amplitude: float = 1.0) -> float:
    """
    Noise power per complex chip sample for a given Eb/N0.

    Eb is the ensemble-average energy of the desired effective signature,
    A^2 ||C h||^2 = A^2 N for unit-power channels.
    """
    Eb = desired_amplitude ** 2 * N
    return float(Eb * 10.0 ** (-ebn0_db / 10.0))


def synthesize_symbol(
    codes: Sequence[SpreadingCode],
    channel: ChannelState,
    amplitudes: np.ndarray,
    symbols_window: np.ndarray,
    noise_sigma2: float,
    rng: np.random.Generator,
    desired_user: int = 0,
) -> SymbolRecord:
    """
    Synthesise the received vector of one symbol interval.

    Args:
        codes (Sequence[SpreadingCode]): Codes of the K users
        channel (ChannelState): Channel for this symbol
        amplitudes (np.ndarray): K amplitudes
        symbols_window (np.ndarray): (K, 3) previous, current and next symbols
        noise_sigma2 (float): Noise power per complex component
        rng (np.random.Generator): Noise generator
        desired_user (int): Index of the desired user

    Returns:
        SymbolRecord: Received vector and its components

    Raises:
        DimensionError: If the number of users differs across the inputs
    """
    K = len(codes)
    amplitudes = np.asarray(amplitudes, dtype=float)
    window = np.asarray(symbols_window)
    if amplitudes.shape != (K,) or window.shape != (K, 3):
        raise DimensionError(
            f"Expected {K} amplitudes and a ({K}, 3) symbol window, "
            f"got {amplitudes.shape} and {window.shape}"
        )
    if not 0 <= desired_user < K:
        raise DimensionError(f"desired_user {desired_user} outside 0..{K - 1}")
    if noise_sigma2 < 0:
        raise ValueError("noise_sigma2 must be non-negative")

    N = codes[0].N
    h = channel.impulse_response()
    if h.size > N + 1:
        raise DimensionError("Channel spans more than one symbol; only 3-symbol ISI is modelled")
    M = N + h.size - 1
    tail = M - N

    # Effective signatures C_k h, one row per user.
    signatures = np.stack([np.convolve(code.chips.astype(float), h) for code in codes])

    current = amplitudes * window[:, 1]
    previous = amplitudes * window[:, 0]
    following = amplitudes * window[:, 2]

    desired = current[desired_user] * signatures[desired_user]
    others = np.delete(np.arange(K), desired_user)
    mai = current[others] @ signatures[others] if others.size else np.zeros(M, dtype=complex)

    isi = np.zeros(M, dtype=complex)
    if tail > 0:
        isi[:tail] += previous @ signatures[:, N:]
        isi[N:] += following @ signatures[:, :tail]

    noise = np.sqrt(noise_sigma2 / 2.0) * (rng.standard_normal(M) + 1j * rng.standard_normal(M))
    interference = mai + isi

    return SymbolRecord(
        received=desired + interference + noise,
        symbols=window[:, 1].copy(),
        amplitudes=amplitudes.copy(),
        channel_snapshot=channel.taps.copy(),
        desired_component=np.asarray(desired, dtype=complex),
        interference_component=interference,
        noise_component=noise,
        mai_component=np.asarray(mai, dtype=complex),
        isi_component=isi,
        desired_user=desired_user,
    )

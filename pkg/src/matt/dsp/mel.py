"""Mel filterbank, log-mel spectrogram, and mel-frequency cepstral coefficients.

Uses the Slaney mel scale: linear below 1 kHz (mel = 3f/200, so 1000 Hz maps
to mel 15), logarithmic above. Filters are triangles in Hz with area
normalization, matching the classic auditory-toolbox construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidBand, InvalidConfig
from .signal import AudioSignal
from .stft import StftConfig, stft

MIN_LOG_HZ = 1000.0
MIN_LOG_MEL = 15.0
LOG_STEP = np.log(6.4) / 27.0

DB_FLOOR = -80.0
DB_EPSILON = 1e-10


def hz_to_mel(freq):
    freq = np.asarray(freq, dtype=np.float64)
    mels = 3.0 * freq / 200.0
    log_region = freq >= MIN_LOG_HZ
    mels = np.where(
        log_region,
        MIN_LOG_MEL + np.log(np.maximum(freq, MIN_LOG_HZ) / MIN_LOG_HZ) / LOG_STEP,
        mels,
    )
    return mels if mels.ndim else float(mels)


def mel_to_hz(mels):
    mels = np.asarray(mels, dtype=np.float64)
    freq = 200.0 * mels / 3.0
    log_region = mels >= MIN_LOG_MEL
    freq = np.where(
        log_region,
        MIN_LOG_HZ * np.exp(LOG_STEP * (mels - MIN_LOG_MEL)),
        freq,
    )
    return freq if freq.ndim else float(freq)


def mel_filterbank(n_mels: int, f_min: float, f_max: float, rate: int, n_fft: int):
    """Triangular Slaney-scale filterbank.

    Returns (weights, centers_hz): weights is (n_mels, n_fft//2 + 1) with
    area-normalized non-negative rows, centers_hz the designed peak frequency
    of each filter (strictly increasing).
    """
    if f_max > rate / 2.0:
        raise InvalidBand(f"f_max {f_max} above Nyquist {rate / 2.0}")
    if not 0 <= f_min < f_max:
        raise InvalidBand(f"need 0 <= f_min < f_max, got [{f_min}, {f_max}]")
    if n_mels < 2:
        raise InvalidConfig(f"n_mels must be >= 2, got {n_mels}")

    edges_hz = mel_to_hz(np.linspace(hz_to_mel(f_min), hz_to_mel(f_max), n_mels + 2))
    fft_freqs = np.fft.rfftfreq(n_fft, 1.0 / rate)

    # triangle for filter i rises over [edge_i, edge_i+1], falls over [edge_i+1, edge_i+2]
    diffs = np.diff(edges_hz)
    ramps = edges_hz[np.newaxis, :] - fft_freqs[:, np.newaxis]
    lower = -ramps[:, :-2] / diffs[:-1]
    upper = ramps[:, 2:] / diffs[1:]
    weights = np.maximum(0.0, np.minimum(lower, upper)).T

    area = 2.0 / (edges_hz[2:] - edges_hz[:-2])
    weights *= area[:, np.newaxis]
    return weights, edges_hz[1:-1].copy()


@dataclass(frozen=True)
class MelSpectrogram:
    """Log-amplitude (dB) mel spectrogram, n_mels rows by a fixed frame count."""

    values: np.ndarray
    n_mels: int
    f_min: float
    f_max: float


def power_to_db(power: np.ndarray) -> np.ndarray:
    """10*log10(power/ref) with ref = max(power, epsilon), clamped at DB_FLOOR.

    The floor is exact: silence maps to DB_FLOOR everywhere, the peak to 0 dB.
    """
    ref = max(float(np.max(power)), DB_EPSILON)
    floor_power = ref * 10.0 ** (DB_FLOOR / 10.0)
    return 10.0 * np.log10(np.maximum(power, floor_power) / ref)


def _fit_frames(values: np.ndarray, target: int, fill: float) -> np.ndarray:
    """Center-crop or center-pad the frame axis to exactly target columns."""
    n = values.shape[1]
    if n == target:
        return values
    if n > target:
        start = (n - target) // 2
        return values[:, start : start + target]
    left = (target - n) // 2
    out = np.full((values.shape[0], target), fill, dtype=values.dtype)
    out[:, left : left + n] = values
    return out


def log_mel_frames(spec, n_mels: int = 96, f_min: float = 0.0, f_max: float | None = None):
    """dB mel matrix at the spectrogram's native frame count."""
    if f_max is None:
        f_max = spec.sample_rate_hz / 2.0
    weights, _ = mel_filterbank(n_mels, f_min, f_max, spec.sample_rate_hz, spec.config.n_fft)
    return power_to_db(weights @ (spec.bins**2)), f_max


def log_mel_spectrogram(
    signal: AudioSignal,
    stft_cfg: StftConfig,
    n_mels: int = 96,
    f_min: float = 0.0,
    f_max: float | None = None,
    target_frames: int = 1360,
) -> MelSpectrogram:
    """Power spectrogram through the mel filterbank, in dB, fitted to a fixed width."""
    spec = stft(signal, stft_cfg)
    db, f_max = log_mel_frames(spec, n_mels, f_min, f_max)
    fitted = _fit_frames(db, target_frames, DB_FLOOR)
    return MelSpectrogram(values=fitted, n_mels=n_mels, f_min=f_min, f_max=f_max)


def dct_matrix(n_out: int, n_in: int) -> np.ndarray:
    """Orthonormal DCT-II matrix, rows = coefficients."""
    k = np.arange(n_out)[:, np.newaxis]
    n = np.arange(n_in)[np.newaxis, :]
    mat = np.cos(np.pi * k * (2 * n + 1) / (2.0 * n_in))
    mat *= np.sqrt(2.0 / n_in)
    mat[0] *= np.sqrt(0.5)
    return mat


def mfcc(log_mel: np.ndarray, n_coeffs: int = 20) -> np.ndarray:
    """First n_coeffs coefficients of the orthonormal DCT-II along the mel axis."""
    n_mels = log_mel.shape[0]
    if n_coeffs > n_mels:
        raise InvalidConfig(f"n_coeffs {n_coeffs} exceeds n_mels {n_mels}")
    return dct_matrix(n_coeffs, n_mels) @ log_mel

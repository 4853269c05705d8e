"""Frame-level spectral shape descriptors: centroid, bandwidth, contrast, rolloff."""

from __future__ import annotations

import numpy as np

from .frames import FrameFeatureMatrix
from .stft import MagnitudeSpectrogram

CONTRAST_F_MIN = 200.0
CONTRAST_BANDS = 6
CONTRAST_QUANTILE = 0.02
ROLLOFF_FRACTION = 0.85
_AMIN = 1e-10


def _centroid_bandwidth(S: np.ndarray, freqs: np.ndarray):
    total = S.sum(axis=0)
    silent = total <= 0.0
    safe_total = np.where(silent, 1.0, total)
    centroid = (freqs[:, np.newaxis] * S).sum(axis=0) / safe_total
    centroid[silent] = 0.0
    deviation = (freqs[:, np.newaxis] - centroid[np.newaxis, :]) ** 2
    bandwidth = np.sqrt((deviation * S).sum(axis=0) / safe_total)
    bandwidth[silent] = 0.0
    return centroid, bandwidth


def _rolloff(S: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    cum = np.cumsum(S, axis=0)
    total = cum[-1]
    silent = total <= 0.0
    threshold = ROLLOFF_FRACTION * total
    reached = cum >= threshold[np.newaxis, :]
    idx = reached.argmax(axis=0)
    out = freqs[idx]
    out[silent] = 0.0
    return out


def _contrast(S: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    """Per-octave-band dB gap between the top and bottom magnitude quantiles.

    Bands: [0, f_min], then octaves [f_min*2^k, f_min*2^(k+1)] with the last
    band extended to Nyquist, giving CONTRAST_BANDS + 1 rows.
    """
    edges = np.zeros(CONTRAST_BANDS + 2)
    edges[1:] = CONTRAST_F_MIN * 2.0 ** np.arange(CONTRAST_BANDS + 1)
    n_frames = S.shape[1]
    out = np.zeros((CONTRAST_BANDS + 1, n_frames))
    for k in range(CONTRAST_BANDS + 1):
        in_band = (freqs >= edges[k]) & (freqs <= edges[k + 1])
        idx = np.flatnonzero(in_band)
        if k > 0 and idx[0] > 0:
            in_band[idx[0] - 1] = True
        if k == CONTRAST_BANDS:
            in_band[idx[-1] + 1 :] = True
        sub = S[in_band]
        if k < CONTRAST_BANDS:
            sub = sub[:-1]
        take = int(max(1, np.rint(CONTRAST_QUANTILE * in_band.sum())))
        ordered = np.sort(sub, axis=0)
        valley = ordered[:take].mean(axis=0)
        peak = ordered[-take:].mean(axis=0)
        out[k] = 10.0 * (
            np.log10(np.maximum(peak, _AMIN)) - np.log10(np.maximum(valley, _AMIN))
        )
    return out


def spectral_descriptors(spec: MagnitudeSpectrogram):
    """Returns (centroid, bandwidth, contrast, rolloff) frame matrices.

    Centroid and bandwidth are the magnitude-weighted mean and standard
    deviation of bin frequency in Hz; rolloff is the lowest frequency holding
    85% of the cumulative magnitude. Silent frames yield 0 for all three.
    """
    S = spec.bins
    freqs = spec.bin_frequencies_hz()
    centroid, bandwidth = _centroid_bandwidth(S, freqs)
    contrast = _contrast(S, freqs)
    rolloff = _rolloff(S, freqs)
    return (
        FrameFeatureMatrix(values=centroid[np.newaxis, :], family="spec_centroid"),
        FrameFeatureMatrix(values=bandwidth[np.newaxis, :], family="spec_bandwidth"),
        FrameFeatureMatrix(values=contrast, family="spec_contrast"),
        FrameFeatureMatrix(values=rolloff[np.newaxis, :], family="spec_rolloff"),
    )

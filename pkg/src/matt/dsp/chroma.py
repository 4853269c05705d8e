"""Pitch-class (chroma) profiles and the tonal-centroid (tonnetz) projection.

Three chroma variants share a 12-row layout with C at index 0 and A440 as
the tuning reference:

* stft  - each FFT bin's power folded onto its nearest pitch class,
          max-normalized per frame.
* cqt   - pseudo constant-Q: a log-spaced triangular filterbank over the
          FFT bins, folded by pitch class, max-normalized per frame.
* cens  - cqt chroma, L1-normalized, amplitude-quantized, smoothed with a
          41-frame moving average, then L2-normalized per frame.
"""

from __future__ import annotations

import numpy as np

from ..errors import InvalidConfig
from .frames import FrameFeatureMatrix
from .stft import MagnitudeSpectrogram

# C1; chosen so pseudo-CQT bin k has pitch class k mod 12 with C = 0
CQT_F_MIN = 32.70319566257483
CQT_BINS_PER_OCTAVE = 12
CQT_OCTAVES = 7
CENS_SMOOTH_FRAMES = 41
CENS_QUANT_STEPS = (0.05, 0.1, 0.2, 0.4)
NORM_GUARD = 1e-12

PITCH_CLASSES = ("C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B")


def _pitch_class_of_hz(freqs: np.ndarray, a440: float = 440.0) -> np.ndarray:
    """Nearest equal-tempered pitch class (C=0) for each positive frequency."""
    midi = 69.0 + 12.0 * np.log2(freqs / a440)
    return np.round(midi).astype(int) % 12


def _fold_stft(spec: MagnitudeSpectrogram) -> np.ndarray:
    power = spec.bins**2
    freqs = spec.bin_frequencies_hz()
    chroma = np.zeros((12, spec.n_frames))
    positive = freqs > 0
    classes = _pitch_class_of_hz(freqs[positive])
    np.add.at(chroma, classes, power[positive])
    return chroma


def _cqt_filterbank(freqs: np.ndarray) -> np.ndarray:
    """Triangular filters at log-spaced centers, rows = CQT bins."""
    n_bins = CQT_BINS_PER_OCTAVE * CQT_OCTAVES
    k = np.arange(-1, n_bins + 1)
    centers = CQT_F_MIN * 2.0 ** (k / CQT_BINS_PER_OCTAVE)
    diffs = np.diff(centers)
    ramps = centers[np.newaxis, :] - freqs[:, np.newaxis]
    lower = -ramps[:, :-2] / diffs[:-1]
    upper = ramps[:, 2:] / diffs[1:]
    return np.maximum(0.0, np.minimum(lower, upper)).T


def _fold_cqt(spec: MagnitudeSpectrogram) -> np.ndarray:
    power = spec.bins**2
    fb = _cqt_filterbank(spec.bin_frequencies_hz())
    cq = fb @ power
    chroma = np.zeros((12, spec.n_frames))
    for k in range(cq.shape[0]):
        chroma[k % 12] += cq[k]
    return chroma


def _max_normalize(chroma: np.ndarray) -> np.ndarray:
    return chroma / np.maximum(chroma.max(axis=0, keepdims=True), NORM_GUARD)


def _cens(raw_cqt_chroma: np.ndarray) -> np.ndarray:
    l1 = raw_cqt_chroma / np.maximum(
        np.abs(raw_cqt_chroma).sum(axis=0, keepdims=True), NORM_GUARD
    )
    quant = np.zeros_like(l1)
    for step in CENS_QUANT_STEPS:
        quant += 0.25 * (l1 > step)
    # centered moving average over frames, zero-padded at the boundaries
    window = CENS_SMOOTH_FRAMES
    pad = window // 2
    padded = np.pad(quant, ((0, 0), (pad, pad)))
    cum = np.cumsum(padded, axis=1)
    cum = np.concatenate([np.zeros((quant.shape[0], 1)), cum], axis=1)
    smoothed = (cum[:, window:] - cum[:, :-window]) / window
    norms = np.sqrt((smoothed**2).sum(axis=0, keepdims=True))
    return smoothed / np.maximum(norms, NORM_GUARD)


def chroma_features(spec: MagnitudeSpectrogram, variant: str) -> FrameFeatureMatrix:
    """12-row chroma of the given variant ("stft", "cqt", or "cens")."""
    if variant == "stft":
        values = _max_normalize(_fold_stft(spec))
    elif variant == "cqt":
        values = _max_normalize(_fold_cqt(spec))
    elif variant == "cens":
        values = _cens(_fold_cqt(spec))
    else:
        raise InvalidConfig(f"unknown chroma variant {variant!r}")
    return FrameFeatureMatrix(values=values, family=f"chroma_{variant}")


def _tonnetz_transform() -> np.ndarray:
    """Fixed 6x12 projection onto the fifths/minor-third/major-third circles.

    Rows come in sin-cos pairs with radii (1, 1, 0.5); a one-hot chroma frame
    lands exactly on the corresponding circle.
    """
    pitch = np.arange(12.0)
    scale = np.array([7.0 / 6, 7.0 / 6, 3.0 / 2, 3.0 / 2, 2.0 / 3, 2.0 / 3])
    angles = np.outer(scale, pitch)
    angles[::2] -= 0.5  # sin rows: cos(pi(x - 1/2)) = sin(pi x)
    radii = np.array([1.0, 1.0, 1.0, 1.0, 0.5, 0.5])
    return radii[:, np.newaxis] * np.cos(np.pi * angles)


TONNETZ_TRANSFORM = _tonnetz_transform()


def tonnetz(chroma: FrameFeatureMatrix) -> FrameFeatureMatrix:
    """6-row tonal centroid of an L1-normalized chroma (normalized here)."""
    values = chroma.values
    l1 = values / np.maximum(np.abs(values).sum(axis=0, keepdims=True), NORM_GUARD)
    return FrameFeatureMatrix(values=TONNETZ_TRANSFORM @ l1, family="tonnetz")

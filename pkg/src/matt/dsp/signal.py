"""Mono PCM container, channel downmix, and time-domain frame descriptors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import CorruptAudio, EmptyAudio, InvalidConfig

CLIP_TOLERANCE = 1e-3


@dataclass(frozen=True)
class AudioSignal:
    """Mono PCM audio: float32 samples in [-1, 1] at a fixed sample rate."""

    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self):
        if self.sample_rate_hz <= 0:
            raise InvalidConfig(f"sample rate must be positive, got {self.sample_rate_hz}")
        if self.samples.size == 0:
            raise EmptyAudio("signal has no samples")

    @property
    def duration_seconds(self) -> float:
        return self.samples.size / self.sample_rate_hz


def downmix_and_validate(channels, rate: int) -> AudioSignal:
    """Average 1 or 2 equal-length channels to mono and validate the result.

    Accepts a single 1-D array, a list of 1-2 arrays, or a (channels, n)
    matrix. Raises EmptyAudio for empty input and CorruptAudio for non-finite
    or out-of-range samples.
    """
    arr = np.asarray(channels, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[np.newaxis, :]
    if arr.ndim != 2 or arr.shape[0] not in (1, 2):
        raise CorruptAudio(f"expected 1 or 2 channels, got shape {arr.shape}")
    if arr.shape[1] == 0:
        raise EmptyAudio("empty channel data")
    if not np.all(np.isfinite(arr)):
        raise CorruptAudio("non-finite sample value")
    mono = arr.mean(axis=0)
    peak = np.max(np.abs(mono))
    if peak > 1.0 + CLIP_TOLERANCE:
        raise CorruptAudio(f"sample magnitude {peak:.6g} exceeds 1 + {CLIP_TOLERANCE}")
    return AudioSignal(samples=mono.astype(np.float32), sample_rate_hz=int(rate))


def frame_signal(samples: np.ndarray, n_fft: int, hop: int, center: bool) -> np.ndarray:
    """Slice a 1-D signal into overlapping frames of length n_fft (rows).

    With center=True the signal is reflect-padded by n_fft//2 on both sides
    so frame t is centered on sample t*hop.
    """
    from ..errors import AudioTooShort

    x = np.asarray(samples, dtype=np.float64)
    if center:
        pad = n_fft // 2
        if x.size <= pad:
            raise AudioTooShort(
                f"signal of {x.size} samples too short for reflect pad {pad}"
            )
        x = np.pad(x, pad, mode="reflect")
    if x.size < n_fft:
        raise AudioTooShort(f"padded signal ({x.size}) shorter than frame ({n_fft})")
    n_frames = 1 + (x.size - n_fft) // hop
    strides = (hop * x.strides[0], x.strides[0])
    frames = np.lib.stride_tricks.as_strided(x, shape=(n_frames, n_fft), strides=strides)
    return frames.copy()


def time_domain_descriptors(signal: AudioSignal, n_fft: int, hop: int, center: bool = True):
    """Per-frame RMS and zero-crossing rate.

    Returns two (1, n_frames) matrices. ZCR counts sign changes between
    consecutive samples as a fraction of the n_fft - 1 adjacent pairs, so a
    perfectly alternating signal scores exactly 1.0. Zero samples count as
    non-negative.
    """
    frames = frame_signal(signal.samples, n_fft, hop, center)
    rms = np.sqrt(np.mean(frames * frames, axis=1))[np.newaxis, :]
    nonneg = frames >= 0.0
    crossings = np.sum(nonneg[:, 1:] != nonneg[:, :-1], axis=1)
    zcr = (crossings / (n_fft - 1))[np.newaxis, :]
    return rms, zcr

"""Short-time Fourier transform with Hann windowing and center padding."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidConfig
from .signal import AudioSignal, frame_signal


@dataclass(frozen=True)
class StftConfig:
    n_fft: int = 2048
    hop: int = 1024
    center_pad: bool = True

    def __post_init__(self):
        if not 0 < self.hop <= self.n_fft:
            raise InvalidConfig(f"need 0 < hop <= n_fft, got hop={self.hop} n_fft={self.n_fft}")


@dataclass(frozen=True)
class MagnitudeSpectrogram:
    """Non-negative magnitudes, (n_fft/2 + 1) frequency rows by n_frames columns."""

    bins: np.ndarray
    config: StftConfig
    sample_rate_hz: int

    @property
    def n_frames(self) -> int:
        return self.bins.shape[1]

    def bin_frequencies_hz(self) -> np.ndarray:
        return np.fft.rfftfreq(self.config.n_fft, 1.0 / self.sample_rate_hz)


def hann_window(n: int) -> np.ndarray:
    """Periodic Hann window (the DFT-even variant used for spectral analysis)."""
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * np.arange(n) / n))


def stft(signal: AudioSignal, cfg: StftConfig) -> MagnitudeSpectrogram:
    """Magnitude spectrogram of Hann-windowed frames, float64 throughout."""
    frames = frame_signal(signal.samples, cfg.n_fft, cfg.hop, cfg.center_pad)
    windowed = frames * hann_window(cfg.n_fft)
    mags = np.abs(np.fft.rfft(windowed, axis=1)).T
    return MagnitudeSpectrogram(bins=mags, config=cfg, sample_rate_hz=signal.sample_rate_hz)

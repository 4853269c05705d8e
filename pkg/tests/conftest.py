import numpy as np
import pytest

from matt.dsp import AudioSignal, FeatureConfig, StftConfig, extract_feature_sets

RATE = 44100


def tone(freq_hz: float, seconds: float = 1.5, amplitude: float = 0.5, rate: int = RATE):
    t = np.arange(int(seconds * rate)) / rate
    return AudioSignal(
        samples=(amplitude * np.sin(2 * np.pi * freq_hz * t)).astype(np.float32),
        sample_rate_hz=rate,
    )


def noisy_clip(seconds: float = 1.5, seed: int = 0, rate: int = RATE):
    rng = np.random.default_rng(seed)
    t = np.arange(int(seconds * rate)) / rate
    samples = (
        0.4 * np.sin(2 * np.pi * 440.0 * t)
        + 0.2 * np.sin(2 * np.pi * 1234.5 * t)
        + 0.05 * rng.standard_normal(t.size)
    )
    return AudioSignal(
        samples=np.clip(samples, -1.0, 1.0).astype(np.float32), sample_rate_hz=rate
    )


@pytest.fixture(scope="session")
def feature_cfg():
    return FeatureConfig()


@pytest.fixture(scope="session")
def stft_cfg():
    return StftConfig()


@pytest.fixture(scope="session")
def clip_extraction(feature_cfg):
    """One full extraction shared by the dimensionality and totality tests."""
    return extract_feature_sets(noisy_clip(), feature_cfg)

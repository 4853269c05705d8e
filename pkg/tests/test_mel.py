import numpy as np
import pytest

from matt.dsp import (
    DB_FLOOR,
    AudioSignal,
    hz_to_mel,
    log_mel_spectrogram,
    mel_filterbank,
    mel_to_hz,
)
from matt.errors import InvalidBand, InvalidConfig

from conftest import RATE, noisy_clip


def test_slaney_scale_linear_region():
    assert hz_to_mel(1000.0) == pytest.approx(15.0, abs=1e-12)
    assert hz_to_mel(200.0) == pytest.approx(3.0, abs=1e-12)
    assert mel_to_hz(15.0) == pytest.approx(1000.0, rel=1e-12)


def test_mel_hz_round_trip():
    freqs = np.linspace(0.0, RATE / 2.0, 500)
    assert np.allclose(mel_to_hz(hz_to_mel(freqs)), freqs, rtol=1e-10, atol=1e-6)


def test_filterbank_rows_positive_and_centers_increasing():
    weights, centers = mel_filterbank(96, 0.0, RATE / 2.0, RATE, 2048)
    assert weights.shape == (96, 1025)
    assert np.all(weights >= 0.0)
    assert np.all(weights.sum(axis=1) > 0.0)
    assert np.all(np.diff(centers) > 0.0)


def test_filterbank_rows_unimodal():
    weights, _ = mel_filterbank(96, 0.0, RATE / 2.0, RATE, 2048)
    for row in weights:
        peak = row.argmax()
        assert np.all(np.diff(row[: peak + 1]) >= 0.0)
        assert np.all(np.diff(row[peak:]) <= 0.0)


def test_filterbank_band_validation():
    with pytest.raises(InvalidBand):
        mel_filterbank(96, 0.0, RATE, RATE, 2048)
    with pytest.raises(InvalidBand):
        mel_filterbank(96, 500.0, 100.0, RATE, 2048)
    with pytest.raises(InvalidConfig):
        mel_filterbank(1, 0.0, RATE / 2.0, RATE, 2048)


@pytest.mark.parametrize("seconds", [1.0, 2.5, 35.0])
def test_log_mel_shape_contract(seconds, stft_cfg):
    mel = log_mel_spectrogram(noisy_clip(seconds=seconds), stft_cfg)
    assert mel.values.shape == (96, 1360)
    assert np.all(np.isfinite(mel.values))
    assert np.all(mel.values >= DB_FLOOR)


def test_silence_maps_to_db_floor(stft_cfg):
    sig = AudioSignal(samples=np.zeros(RATE, dtype=np.float32), sample_rate_hz=RATE)
    mel = log_mel_spectrogram(sig, stft_cfg)
    assert np.all(mel.values == DB_FLOOR)


def test_center_crop_matches_inner_clip(stft_cfg):
    # construct a long clip whose center region is an exact hop-aligned copy of
    # a shorter clip, faded at the edges so both share the same dB reference
    hop = stft_cfg.hop
    inner_len = 1480 * hop
    shift = 129  # hops
    outer_len = (1480 + 2 * shift) * hop
    t = np.arange(inner_len) / RATE
    envelope = 0.5 * (1.0 - np.cos(2.0 * np.pi * np.arange(inner_len) / inner_len))
    content = envelope * (0.5 * np.sin(2 * np.pi * 440.0 * t) + 0.2 * np.sin(2 * np.pi * 97.0 * t))
    outer = np.zeros(outer_len, dtype=np.float32)
    outer[shift * hop : shift * hop + inner_len] = content.astype(np.float32)

    mel_outer = log_mel_spectrogram(
        AudioSignal(samples=outer, sample_rate_hz=RATE), stft_cfg
    )
    mel_inner = log_mel_spectrogram(
        AudioSignal(samples=content.astype(np.float32), sample_rate_hz=RATE), stft_cfg
    )
    # identical up to FFT batch rounding (last ulp)
    assert np.abs(mel_outer.values - mel_inner.values).max() <= 1e-9

"""Frame-feature summarization and named feature-set assembly.

Each feature family is reduced to a fixed-width vector of 7 statistics per
base dimension (mean, std, skew, kurtosis, median, min, max), laid out
statistic-major. Named sets concatenate family vectors: "3+6" (189),
"3+6+4" (196), and "1to9" (518, chroma contributing all three variants).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import EmptyFeature
from .chroma import chroma_features, tonnetz
from .frames import FAMILY_BASE_DIMS, FrameFeatureMatrix
from .mel import DB_FLOOR, MelSpectrogram, _fit_frames, log_mel_frames, mfcc
from .signal import AudioSignal, time_domain_descriptors
from .spectral import spectral_descriptors
from .stft import StftConfig, stft

STATISTICS = ("mean", "std", "skew", "kurtosis", "median", "min", "max")

FAMILY_ORDER = (
    "chroma_stft",
    "chroma_cqt",
    "chroma_cens",
    "tonnetz",
    "mfcc",
    "spec_centroid",
    "spec_bandwidth",
    "spec_contrast",
    "spec_rolloff",
    "rms",
    "zcr",
)

FEATURE_SETS = {
    "1": ("chroma_stft",),
    "2": ("tonnetz",),
    "3": ("mfcc",),
    "4": ("spec_centroid",),
    "5": ("spec_bandwidth",),
    "6": ("spec_contrast",),
    "7": ("spec_rolloff",),
    "8": ("rms",),
    "9": ("zcr",),
    "3+6": ("mfcc", "spec_contrast"),
    "3+6+4": ("mfcc", "spec_contrast", "spec_centroid"),
    "1to9": FAMILY_ORDER,
}


@dataclass(frozen=True)
class SummaryFeatureVector:
    """Flat statistic-major summary, length 7 x d_base."""

    values: np.ndarray
    family: str

    def __post_init__(self):
        expected = 7 * FAMILY_BASE_DIMS[self.family]
        if self.values.shape != (expected,):
            raise EmptyFeature(
                f"{self.family}: expected length {expected}, got {self.values.shape}"
            )


def summarize(frames: FrameFeatureMatrix) -> SummaryFeatureVector:
    """Reduce (d_base, n_frames) to the 7-statistic summary vector.

    std is the population standard deviation; skew is m3/m2^1.5 and kurtosis
    the excess m4/m2^2 - 3, both 0 by convention for zero-variance rows; the
    median takes the lower-middle element for even frame counts.
    """
    x = frames.values
    if x.shape[1] < 1:
        raise EmptyFeature(f"{frames.family}: no frames to summarize")
    n = x.shape[1]
    mean = x.mean(axis=1)
    centered = x - mean[:, np.newaxis]
    m2 = (centered**2).mean(axis=1)
    m3 = (centered**3).mean(axis=1)
    m4 = (centered**4).mean(axis=1)
    std = np.sqrt(m2)
    safe_m2 = np.where(m2 > 0.0, m2, 1.0)
    skew = np.where(m2 > 0.0, m3 / safe_m2**1.5, 0.0)
    kurtosis = np.where(m2 > 0.0, m4 / safe_m2**2 - 3.0, 0.0)
    median = np.sort(x, axis=1)[:, (n - 1) // 2]
    vector = np.concatenate([mean, std, skew, kurtosis, median, x.min(axis=1), x.max(axis=1)])
    return SummaryFeatureVector(values=vector, family=frames.family)


def feature_set_length(set_name: str) -> int:
    return sum(7 * FAMILY_BASE_DIMS[f] for f in FEATURE_SETS[set_name])


def feature_set_columns(set_name: str) -> list[str]:
    """Column names matching the vector layout: <family>_<stat>_<index>."""
    cols = []
    for family in FEATURE_SETS[set_name]:
        d = FAMILY_BASE_DIMS[family]
        for stat in STATISTICS:
            cols.extend(f"{family}_{stat}_{i}" for i in range(d))
    return cols


def feature_set_vector(summaries: dict[str, SummaryFeatureVector], set_name: str) -> np.ndarray:
    return np.concatenate([summaries[f].values for f in FEATURE_SETS[set_name]])


def set_slices(set_name: str) -> list[tuple[int, int]]:
    """(start, stop) spans of the set's families inside the full "1to9" vector."""
    offsets = {}
    pos = 0
    for family in FAMILY_ORDER:
        width = 7 * FAMILY_BASE_DIMS[family]
        offsets[family] = (pos, pos + width)
        pos += width
    return [offsets[f] for f in FEATURE_SETS[set_name]]


@dataclass(frozen=True)
class FeatureConfig:
    """Extraction geometry; the defaults give the 96x1360 mel contract at 44.1 kHz."""

    sample_rate: int = 44100
    stft: StftConfig = field(default_factory=StftConfig)
    n_mels: int = 96
    mel_f_min: float = 0.0
    mel_frames: int = 1360
    n_mfcc: int = 20


@dataclass(frozen=True)
class ExtractionResult:
    summaries: dict[str, SummaryFeatureVector]
    mel: MelSpectrogram

    def set_vector(self, set_name: str) -> np.ndarray:
        return feature_set_vector(self.summaries, set_name)


def extract_frame_features(signal: AudioSignal, cfg: FeatureConfig):
    """Per-frame matrices for all 11 families, plus the fitted mel spectrogram."""
    spec = stft(signal, cfg.stft)
    frames: list[FrameFeatureMatrix] = []

    chroma_by_variant = {v: chroma_features(spec, v) for v in ("stft", "cqt", "cens")}
    frames.extend(chroma_by_variant.values())
    frames.append(tonnetz(chroma_by_variant["cqt"]))

    # cepstrum runs on the native frame count to stay aligned with the other
    # families; only the emitted mel matrix is fitted to the fixed width
    native_db, f_max = log_mel_frames(spec, cfg.n_mels, cfg.mel_f_min)
    mel = MelSpectrogram(
        values=_fit_frames(native_db, cfg.mel_frames, DB_FLOOR),
        n_mels=cfg.n_mels,
        f_min=cfg.mel_f_min,
        f_max=f_max,
    )
    frames.append(FrameFeatureMatrix(values=mfcc(native_db, cfg.n_mfcc), family="mfcc"))

    frames.extend(spectral_descriptors(spec))

    rms, zcr = time_domain_descriptors(
        signal, cfg.stft.n_fft, cfg.stft.hop, cfg.stft.center_pad
    )
    frames.append(FrameFeatureMatrix(values=rms, family="rms"))
    frames.append(FrameFeatureMatrix(values=zcr, family="zcr"))
    return {f.family: f for f in frames}, mel


def extract_feature_sets(signal: AudioSignal, cfg: FeatureConfig) -> ExtractionResult:
    """Extract and summarize all 11 base families plus the mel spectrogram."""
    frames, mel = extract_frame_features(signal, cfg)
    summaries = {family: summarize(f) for family, f in frames.items()}
    return ExtractionResult(summaries=summaries, mel=mel)

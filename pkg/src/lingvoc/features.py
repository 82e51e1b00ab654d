"""Acoustic and linguistic feature representations.

An acoustic frame is 43 values: 40 cepstral coefficients, interpolated
log-F0, voicing frequency, and a binary voiced/unvoiced flag, one frame per
80 waveform samples. A linguistic frame is a per-phone label vector
replicated across the phone's frames with two appended duration features.

Acoustic frames are min-max normalized to [0, 1]; real-valued linguistic
dimensions are Z-normalized. Both use statistics computed on the training
split only, and the stats objects carry a provenance tag that is asserted
when they are applied.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .codec import Waveform

ACOUSTIC_DIM = 43
N_CEPSTRA = 40
IDX_LOG_F0 = 40
IDX_VF = 41
IDX_UV = 42
FRAME_STRIDE = 80

# unvoiced frames carry this sentinel in the raw log-F0 contour
UNVOICED_LOG_F0 = -1e9
_VOICED_THRESHOLD = -1e8


@dataclass
class AcousticStats:
    lo: np.ndarray
    hi: np.ndarray
    provenance: str = "train"


@dataclass
class LinguisticStats:
    mean: np.ndarray
    std: np.ndarray
    real_dims: np.ndarray
    provenance: str = "train"


def make_uv_flag(log_f0_raw: np.ndarray) -> np.ndarray:
    """1.0 where the frame is voiced, 0.0 where the sentinel sits."""
    raw = np.asarray(log_f0_raw, dtype=np.float64)
    return (raw > _VOICED_THRESHOLD).astype(np.float64)


def interpolate_log_f0(log_f0_raw: np.ndarray, uv: np.ndarray | None = None) -> np.ndarray:
    """Fill unvoiced gaps by linear interpolation between flanking voiced
    values; leading/trailing unvoiced spans hold the nearest voiced value.
    """
    raw = np.asarray(log_f0_raw, dtype=np.float64)
    voiced = make_uv_flag(raw).astype(bool) if uv is None else np.asarray(uv).astype(bool)
    if not voiced.any():
        raise ValueError("cannot interpolate log-F0: no voiced frame to anchor on")
    idx = np.arange(raw.size)
    return np.interp(idx, idx[voiced], raw[voiced])


def compute_acoustic_stats(frames: np.ndarray, provenance: str = "train") -> AcousticStats:
    frames = np.asarray(frames, dtype=np.float64)
    return AcousticStats(frames.min(axis=0), frames.max(axis=0), provenance)


def normalize_acoustic(frames: np.ndarray, stats: AcousticStats) -> np.ndarray:
    """Per-dimension min-max scaling into [0, 1]; degenerate dims map to 0.5."""
    if stats.provenance != "train":
        raise ValueError(f"normalization stats must come from the train split, got {stats.provenance!r}")
    frames = np.asarray(frames, dtype=np.float64)
    span = stats.hi - stats.lo
    degenerate = span == 0.0
    safe = np.where(degenerate, 1.0, span)
    out = (frames - stats.lo) / safe
    out[:, degenerate] = 0.5
    return out


def denormalize_acoustic(frames: np.ndarray, stats: AcousticStats) -> np.ndarray:
    if stats.provenance != "train":
        raise ValueError(f"normalization stats must come from the train split, got {stats.provenance!r}")
    frames = np.asarray(frames, dtype=np.float64)
    span = stats.hi - stats.lo
    out = frames * span + stats.lo
    out[:, span == 0.0] = stats.lo[span == 0.0]
    return out


def compute_linguistic_stats(frames: np.ndarray, real_dims: np.ndarray,
                             provenance: str = "train") -> LinguisticStats:
    frames = np.asarray(frames, dtype=np.float64)
    real_dims = np.asarray(real_dims, dtype=np.int64)
    mean = frames[:, real_dims].mean(axis=0)
    std = frames[:, real_dims].std(axis=0)
    std = np.where(std == 0.0, 1.0, std)
    return LinguisticStats(mean, std, real_dims, provenance)


def normalize_linguistic(frames: np.ndarray, stats: LinguisticStats) -> np.ndarray:
    """Z-normalize the real-valued dims; one-hot and duration dims pass through."""
    if stats.provenance != "train":
        raise ValueError(f"normalization stats must come from the train split, got {stats.provenance!r}")
    out = np.array(frames, dtype=np.float64)
    out[:, stats.real_dims] = (out[:, stats.real_dims] - stats.mean) / stats.std
    return out


def replicate_labels(phones, phone_labels: np.ndarray, total_frames: int,
                     max_train_duration: int) -> np.ndarray:
    """Copy each phone's label vector across its duration and append the two
    duration features: absolute duration normalized by the train maximum
    (clamped to [0, 1]) and within-phone relative position i/duration.
    """
    phone_labels = np.asarray(phone_labels, dtype=np.float64)
    durations = [dur for _, dur in phones]
    if any(d <= 0 for d in durations):
        raise ValueError(f"phone durations must be positive, got {durations}")
    if sum(durations) != total_frames:
        raise ValueError(
            f"phone durations sum to {sum(durations)}, expected {total_frames} frames"
        )
    base_dim = phone_labels.shape[1]
    out = np.empty((total_frames, base_dim + 2))
    row = 0
    for phone_id, dur in phones:
        out[row : row + dur, :base_dim] = phone_labels[phone_id]
        out[row : row + dur, base_dim] = min(1.0, dur / max_train_duration)
        out[row : row + dur, base_dim + 1] = np.arange(dur) / dur
        row += dur
    return out


@dataclass
class Utterance:
    utt_id: str
    waveform: Waveform
    acoustic: np.ndarray      # (frames, 43), raw (pre-normalization)
    linguistic: np.ndarray    # (frames, L + 2), raw
    phones: list = field(default_factory=list)

    def __post_init__(self):
        frames = len(self.waveform) // FRAME_STRIDE
        if self.acoustic.shape[0] != frames or self.linguistic.shape[0] != frames:
            raise ValueError(
                f"{self.utt_id}: feature rows {self.acoustic.shape[0]}/"
                f"{self.linguistic.shape[0]} do not match {frames} waveform frames"
            )
        if self.acoustic.shape[1] != ACOUSTIC_DIM:
            raise ValueError(f"{self.utt_id}: acoustic dim {self.acoustic.shape[1]} != {ACOUSTIC_DIM}")
        if sum(d for _, d in self.phones) != frames:
            raise ValueError(f"{self.utt_id}: phone durations do not cover {frames} frames")

    @property
    def n_frames(self) -> int:
        return self.acoustic.shape[0]


SPLITS = ("train", "valid", "test")


@dataclass
class Corpus:
    utterances: list
    splits: list                      # split name per utterance
    acoustic_stats: AcousticStats
    linguistic_stats: LinguisticStats
    meta: dict

    def utts(self, split: str):
        if split not in SPLITS:
            raise ValueError(f"unknown split {split!r}")
        return [u for u, s in zip(self.utterances, self.splits) if s == split]

    def split_sizes(self) -> dict:
        return {s: self.splits.count(s) for s in SPLITS}


def assign_splits(n: int) -> list:
    """80/10/10 split by utterance index."""
    n_train = int(n * 0.8)
    n_valid = int(n * 0.1)
    return (
        ["train"] * n_train
        + ["valid"] * n_valid
        + ["test"] * (n - n_train - n_valid)
    )

"""Mu-law companding and Q-level quantization between real waveforms and
discrete sample classes, plus the waveform file formats.

compand/expand are strict about their [-1, 1] domain; the batch entry
points encode/quantize clamp out-of-range values instead and count the
clamps, so a single overshoot cannot abort a long synthesis run.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class CodecConfig:
    mu: float = 255.0
    bits: int = 8
    levels: int = 256

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if self.levels != 2 ** self.bits:
            raise ValueError(
                f"levels ({self.levels}) must equal 2^bits (2^{self.bits})"
            )


class ClampCounter:
    """Diagnostic tally of inputs that fell outside [-1, 1]."""

    def __init__(self):
        self.count = 0


@dataclass
class Waveform:
    samples: np.ndarray
    sample_rate: int = 16000

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise ValueError(f"waveform must be 1-D, got shape {self.samples.shape}")
        if self.samples.size and np.max(np.abs(self.samples)) > 1.0:
            raise ValueError("waveform samples must lie in [-1, 1]")

    def __len__(self):
        return self.samples.size


def compand(x, cfg: CodecConfig = CodecConfig()):
    """Mu-law compression: sign(x) * ln(1 + mu|x|) / ln(1 + mu)."""
    x = np.asarray(x, dtype=np.float64)
    if np.any(np.abs(x) > 1.0):
        raise ValueError("compand input outside [-1, 1]")
    y = np.sign(x) * np.log1p(cfg.mu * np.abs(x)) / np.log1p(cfg.mu)
    return float(y) if np.isscalar(x) or y.ndim == 0 else y


def expand(y, cfg: CodecConfig = CodecConfig()):
    """Inverse of compand: sign(y) * ((1 + mu)^|y| - 1) / mu."""
    y = np.asarray(y, dtype=np.float64)
    if np.any(np.abs(y) > 1.0):
        raise ValueError("expand input outside [-1, 1]")
    x = np.sign(y) * np.expm1(np.abs(y) * np.log1p(cfg.mu)) / cfg.mu
    return float(x) if x.ndim == 0 else x


def quantize(y, cfg: CodecConfig = CodecConfig(), clamps: ClampCounter | None = None):
    """Half-open uniform bins over [-1, 1]: class = min(Q-1, floor((y+1)/2 * Q)).

    Out-of-range inputs are clamped (and counted when a counter is given).
    """
    y = np.asarray(y, dtype=np.float64)
    if clamps is not None:
        clamps.count += int(np.count_nonzero(np.abs(y) > 1.0))
    y = np.clip(y, -1.0, 1.0)
    q = cfg.levels
    cls = np.minimum(q - 1, np.floor((y + 1.0) / 2.0 * q)).astype(np.int64)
    return int(cls) if cls.ndim == 0 else cls


def dequantize(cls, cfg: CodecConfig = CodecConfig()):
    """Bin-center reconstruction: (class + 0.5) * 2/Q - 1."""
    cls = np.asarray(cls)
    if np.any(cls < 0) or np.any(cls >= cfg.levels):
        raise ValueError(f"class outside [0, {cfg.levels})")
    y = (cls + 0.5) * 2.0 / cfg.levels - 1.0
    return float(y) if y.ndim == 0 else y


def encode(x, cfg: CodecConfig = CodecConfig(), clamps: ClampCounter | None = None):
    """quantize(compand(x)); clamps x into [-1, 1] first (counted)."""
    x = np.asarray(x, dtype=np.float64)
    if clamps is not None:
        clamps.count += int(np.count_nonzero(np.abs(x) > 1.0))
    x = np.clip(x, -1.0, 1.0)
    return quantize(compand(x, cfg), cfg)


def decode(cls, cfg: CodecConfig = CodecConfig()):
    """expand(dequantize(class))."""
    return expand(dequantize(cls, cfg), cfg)


# --- waveform files -------------------------------------------------------

WAVE_MAGIC = b"LVWV1"
_PCM_SCALE = 32767.0


def write_waveform(path, wf: Waveform) -> None:
    """Little-endian: magic, u32 sample rate, u64 count, s16 PCM payload."""
    pcm = np.round(np.clip(wf.samples, -1.0, 1.0) * _PCM_SCALE).astype("<i2")
    with open(path, "wb") as fh:
        fh.write(WAVE_MAGIC)
        fh.write(struct.pack("<IQ", wf.sample_rate, pcm.size))
        fh.write(pcm.tobytes())


def read_waveform(path) -> Waveform:
    blob = Path(path).read_bytes()
    if not blob.startswith(WAVE_MAGIC):
        raise ValueError(f"{path}: bad magic, not a waveform file")
    rate, count = struct.unpack_from("<IQ", blob, len(WAVE_MAGIC))
    offset = len(WAVE_MAGIC) + 12
    pcm = np.frombuffer(blob, dtype="<i2", count=count, offset=offset)
    return Waveform(pcm.astype(np.float64) / _PCM_SCALE, sample_rate=rate)


def write_float64(path, arr) -> None:
    """Raw little-endian float64 array, no header."""
    np.ascontiguousarray(arr, dtype="<f8").tofile(path)


def read_float64(path) -> np.ndarray:
    return np.fromfile(path, dtype="<f8")

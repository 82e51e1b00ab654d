"""Synthetic speech-like corpus generator.

Each utterance is a sequence of voiced/unvoiced phone segments. Voiced
segments are harmonic signals whose per-harmonic amplitudes come from the
frame's own cepstral vector, so the stored acoustic features are the exact
ground truth for the waveform: cepstra define the spectral envelope, the
per-phone pitch defines the periodicity, and the voiced flag marks the
segment type. Unvoiced segments are smoothed noise. Waveforms and features
are therefore consistent by construction, which is what makes distortion
and pitch metrics meaningful on this corpus.

Generation is deterministic: a fixed spec (including its seed) reproduces
the corpus bit for bit. Per-utterance generators are derived from the
global seed and the utterance index, so utterances could be generated in
parallel without changing the result.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codec import Waveform
from .features import (
    ACOUSTIC_DIM,
    FRAME_STRIDE,
    N_CEPSTRA,
    UNVOICED_LOG_F0,
    Corpus,
    Utterance,
    assign_splits,
    compute_acoustic_stats,
    compute_linguistic_stats,
    interpolate_log_f0,
    make_uv_flag,
    replicate_labels,
)

_PEAK_TARGET = 0.42
_MAX_HARMONICS = 16
_HARMONIC_BAND = 0.44  # keep harmonics below this fraction of the sample rate


@dataclass(frozen=True)
class SynthSpec:
    n_utterances: int = 60
    min_frames: int = 40
    max_frames: int = 70
    n_phones: int = 12
    f0_min_hz: float = 120.0
    f0_max_hz: float = 300.0
    voiced_min: int = 4
    voiced_max: int = 10
    unvoiced_min: int = 2
    unvoiced_max: int = 5
    noise_floor: float = 0.001
    unvoiced_rms: float = 0.04
    ling_dim: int = 46
    sample_rate: int = 16000
    seed: int = 0

    def __post_init__(self):
        if self.n_utterances < 10:
            raise ValueError("need at least 10 utterances for a 80/10/10 split")
        if not (0 < self.min_frames <= self.max_frames):
            raise ValueError(f"bad frame range [{self.min_frames}, {self.max_frames}]")
        if not (0 < self.f0_min_hz < self.f0_max_hz < self.sample_rate / 2):
            raise ValueError(f"bad F0 range [{self.f0_min_hz}, {self.f0_max_hz}]")
        if not (0 < self.voiced_min <= self.voiced_max):
            raise ValueError("bad voiced segment length range")
        if not (0 < self.unvoiced_min <= self.unvoiced_max):
            raise ValueError("bad unvoiced segment length range")
        if self.n_phones < 3:
            raise ValueError("phone inventory must hold voiced and unvoiced ids")
        if self.ling_dim < self.n_phones + 3:
            raise ValueError(
                f"ling_dim {self.ling_dim} too small for {self.n_phones} phones "
                "plus prosodic features"
            )

    @property
    def n_unvoiced_phones(self) -> int:
        return max(1, self.n_phones // 3)

    def is_voiced_phone(self, phone_id: int) -> bool:
        return phone_id >= self.n_unvoiced_phones


def _utterance_rng(seed: int, index: int) -> np.random.Generator:
    # derived seed: utterances are independent streams mixed from (seed, index)
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


@dataclass
class _PhoneTables:
    cepstra: np.ndarray      # (n_phones, 40) template envelopes
    vf: np.ndarray           # (n_phones,) voicing-frequency base values
    embed: np.ndarray        # (n_phones, ling_dim - n_phones - 3)


def _make_tables(spec: SynthSpec) -> _PhoneTables:
    rng = np.random.default_rng(np.random.SeedSequence(entropy=spec.seed, spawn_key=(2**31,)))
    cep = np.zeros((spec.n_phones, N_CEPSTRA))
    cep[:, 0] = rng.uniform(-2.2, -1.4, size=spec.n_phones)
    orders = np.arange(1, N_CEPSTRA)
    cep[:, 1:] = rng.normal(0.0, 1.0, size=(spec.n_phones, N_CEPSTRA - 1)) * (
        0.45 / (1.0 + 0.35 * orders)
    )
    vf = rng.uniform(0.55, 0.9, size=spec.n_phones)
    embed_dim = spec.ling_dim - spec.n_phones - 3
    embed = rng.normal(0.0, 1.0, size=(spec.n_phones, embed_dim))
    return _PhoneTables(cep, vf, embed)


def _draw_segments(spec: SynthSpec, rng: np.random.Generator, total: int):
    """Alternating unvoiced/voiced segments covering exactly `total` frames.

    Voiced segments are never clipped below voiced_min, so every voiced
    phone spans enough samples for a periodicity check.
    """
    segments = []  # (phone_id, duration, voiced)
    voiced_turn = bool(rng.integers(0, 2))
    remaining = total
    while remaining > 0:
        if voiced_turn and remaining >= spec.voiced_min:
            dur = int(rng.integers(spec.voiced_min, spec.voiced_max + 1))
            dur = min(dur, remaining)
            if remaining - dur < 0:
                dur = remaining
            pid = int(rng.integers(spec.n_unvoiced_phones, spec.n_phones))
            segments.append((pid, dur, True))
        else:
            dur = int(rng.integers(spec.unvoiced_min, spec.unvoiced_max + 1))
            dur = min(dur, remaining)
            pid = int(rng.integers(0, spec.n_unvoiced_phones))
            segments.append((pid, dur, False))
        remaining -= dur
        voiced_turn = not voiced_turn
    if not any(v for _, _, v in segments):
        pid = int(rng.integers(spec.n_unvoiced_phones, spec.n_phones))
        segments[-1] = (pid, segments[-1][1], True)
    return segments


@dataclass
class _Draft:
    segments: list           # (phone_id, duration, voiced)
    log_f0: list             # per segment; NaN for unvoiced
    rng: np.random.Generator


def _draft_utterance(spec: SynthSpec, index: int) -> _Draft:
    rng = _utterance_rng(spec.seed, index)
    total = int(rng.integers(spec.min_frames, spec.max_frames + 1))
    segments = _draw_segments(spec, rng, total)
    log_f0 = [
        float(rng.uniform(np.log(spec.f0_min_hz), np.log(spec.f0_max_hz))) if voiced else np.nan
        for _, _, voiced in segments
    ]
    return _Draft(segments, log_f0, rng)


def _instance_labels(spec: SynthSpec, tables: _PhoneTables, draft: _Draft) -> np.ndarray:
    """Per-segment label vectors: one-hot phone id + raw prosodic reals."""
    n_seg = len(draft.segments)
    labels = np.zeros((n_seg, spec.ling_dim))
    for i, ((pid, dur, voiced), lf0) in enumerate(zip(draft.segments, draft.log_f0)):
        labels[i, pid] = 1.0
        labels[i, spec.n_phones] = 0.0 if not voiced else lf0
        labels[i, spec.n_phones + 1] = float(dur)
        labels[i, spec.n_phones + 2] = i / n_seg
        labels[i, spec.n_phones + 3 :] = tables.embed[pid]
    return labels


def _wobble(rng: np.random.Generator, n_frames: int) -> np.ndarray:
    """Smooth per-frame cepstral drift, small enough to keep peaks bounded."""
    freqs = rng.uniform(0.01, 0.06, size=N_CEPSTRA)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=N_CEPSTRA)
    t = np.arange(n_frames)[:, None]
    return 0.02 * np.sin(2.0 * np.pi * freqs * t + phases)


def _harmonic_amplitudes(cep: np.ndarray, f0: float, sample_rate: int) -> np.ndarray:
    """Envelope sampled at harmonics of f0: log a_k = c0 + 2 sum c_m cos(m w_k)."""
    k_max = min(_MAX_HARMONICS, int(_HARMONIC_BAND * sample_rate / f0))
    k = np.arange(1, k_max + 1)
    omega = 2.0 * np.pi * k * f0 / sample_rate  # (K,)
    m = np.arange(1, N_CEPSTRA)
    log_amp = cep[0] + 2.0 * (cep[1:] @ np.cos(np.outer(m, omega)))
    return np.exp(log_amp)


def _build_utterance(spec: SynthSpec, tables: _PhoneTables, index: int,
                     draft: _Draft, max_train_dur: int) -> Utterance:
    rng = draft.rng
    segments = draft.segments
    n_frames = sum(d for _, d, _ in segments)
    n_samples = n_frames * FRAME_STRIDE

    # frame-level phone index and voicing
    seg_of_frame = np.repeat(np.arange(len(segments)), [d for _, d, _ in segments])
    pid_of_frame = np.array([segments[s][0] for s in seg_of_frame])
    voiced_frame = np.array([segments[s][2] for s in seg_of_frame])

    cep = tables.cepstra[pid_of_frame] + _wobble(rng, n_frames)

    log_f0_raw = np.full(n_frames, UNVOICED_LOG_F0)
    for f in range(n_frames):
        if voiced_frame[f]:
            log_f0_raw[f] = draft.log_f0[seg_of_frame[f]]

    # bound the peak amplitude by shifting c0 uniformly; the shift is part
    # of the stored features, so waveform and cepstra stay consistent
    peak = 0.0
    for f in range(n_frames):
        if voiced_frame[f]:
            amps = _harmonic_amplitudes(cep[f], float(np.exp(log_f0_raw[f])), spec.sample_rate)
            peak = max(peak, float(amps.sum()))
    if peak > _PEAK_TARGET:
        cep[:, 0] += np.log(_PEAK_TARGET / peak)

    wave = np.zeros(n_samples)
    theta = 0.0
    for f in range(n_frames):
        sl = slice(f * FRAME_STRIDE, (f + 1) * FRAME_STRIDE)
        if voiced_frame[f]:
            f0 = float(np.exp(log_f0_raw[f]))
            amps = _harmonic_amplitudes(cep[f], f0, spec.sample_rate)
            k = np.arange(1, amps.size + 1)
            phase = theta + 2.0 * np.pi * f0 / spec.sample_rate * np.arange(1, FRAME_STRIDE + 1)
            wave[sl] = amps @ np.sin(np.outer(k, phase))
            theta = float(phase[-1])
        else:
            noise = rng.normal(0.0, 1.0, FRAME_STRIDE + 2)
            smoothed = np.convolve(noise, [0.25, 0.5, 0.25], mode="valid")
            rms = float(np.sqrt(np.mean(smoothed**2)))
            wave[sl] = smoothed / max(rms, 1e-12) * spec.unvoiced_rms
    if spec.noise_floor > 0:
        wave += rng.normal(0.0, spec.noise_floor, n_samples)
    wave = np.clip(wave, -1.0, 1.0)

    acoustic = np.empty((n_frames, ACOUSTIC_DIM))
    acoustic[:, :N_CEPSTRA] = cep
    uv = make_uv_flag(log_f0_raw)
    acoustic[:, N_CEPSTRA] = interpolate_log_f0(log_f0_raw, uv)
    vf = np.where(voiced_frame, tables.vf[pid_of_frame], 0.05)
    acoustic[:, N_CEPSTRA + 1] = vf
    acoustic[:, N_CEPSTRA + 2] = uv

    labels = _instance_labels(spec, tables, draft)
    rep_phones = [(i, dur) for i, (_, dur, _) in enumerate(segments)]
    linguistic = replicate_labels(rep_phones, labels, n_frames, max_train_dur)

    return Utterance(
        utt_id=f"utt{index:04d}",
        waveform=Waveform(wave, sample_rate=spec.sample_rate),
        acoustic=acoustic,
        linguistic=linguistic,
        phones=[(pid, dur) for pid, dur, _ in segments],
    )


def generate_corpus(spec: SynthSpec) -> Corpus:
    tables = _make_tables(spec)
    drafts = [_draft_utterance(spec, i) for i in range(spec.n_utterances)]
    splits = assign_splits(spec.n_utterances)

    max_train_dur = max(
        dur
        for draft, split in zip(drafts, splits)
        if split == "train"
        for _, dur, _ in draft.segments
    )

    utterances = [
        _build_utterance(spec, tables, i, draft, max_train_dur)
        for i, draft in enumerate(drafts)
    ]

    train_acoustic = np.concatenate(
        [u.acoustic for u, s in zip(utterances, splits) if s == "train"]
    )
    train_linguistic = np.concatenate(
        [u.linguistic for u, s in zip(utterances, splits) if s == "train"]
    )
    real_dims = np.arange(spec.n_phones, spec.ling_dim)
    meta = {
        "sample_rate": spec.sample_rate,
        "stride": FRAME_STRIDE,
        "ling_dim": spec.ling_dim,
        "n_phones": spec.n_phones,
        "max_train_duration": max_train_dur,
        "seed": spec.seed,
    }
    return Corpus(
        utterances=utterances,
        splits=splits,
        acoustic_stats=compute_acoustic_stats(train_acoustic, "train"),
        linguistic_stats=compute_linguistic_stats(train_linguistic, real_dims, "train"),
        meta=meta,
    )

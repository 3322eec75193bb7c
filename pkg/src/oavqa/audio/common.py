from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..media_io import AudioClip
from ..registry import AUDIO_MODELS


class AudioMetricError(ValueError):
    pass


@dataclass
class AudioQualityResult:
    model_name: str
    score: float
    features: np.ndarray
    per_segment: np.ndarray = field(default_factory=lambda: np.empty(0))
    per_channel: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        info = AUDIO_MODELS.get(self.model_name)
        if info is not None and self.features.shape != (info.arity,):
            raise AudioMetricError(
                f"{self.model_name}: expected {info.arity} features, got {self.features.shape}"
            )


@dataclass(frozen=True)
class MonoPair:
    reference: np.ndarray
    distorted: np.ndarray
    sample_rate: int

    def __post_init__(self):
        r = np.asarray(self.reference, dtype=np.float64)
        d = np.asarray(self.distorted, dtype=np.float64)
        if r.ndim != 1 or r.shape != d.shape:
            raise AudioMetricError(f"mono pair needs equal-length 1-D signals, got {r.shape} / {d.shape}")
        object.__setattr__(self, "reference", r)
        object.__setattr__(self, "distorted", d)


def _aligned_length(ref: AudioClip, dist: AudioClip) -> int:
    if ref.sample_rate != dist.sample_rate:
        raise AudioMetricError(f"sample rate mismatch: {ref.sample_rate} vs {dist.sample_rate}")
    if ref.channels != dist.channels:
        raise AudioMetricError(f"channel count mismatch: {ref.channels} vs {dist.channels}")
    if abs(ref.num_samples - dist.num_samples) > 1:
        raise AudioMetricError(f"length mismatch: {ref.num_samples} vs {dist.num_samples}")
    return min(ref.num_samples, dist.num_samples)


def channel_pairs(ref: AudioClip, dist: AudioClip) -> list[MonoPair]:
    """One aligned mono pair per channel (a one-sample length slack is trimmed)."""
    n = _aligned_length(ref, dist)
    return [MonoPair(ref.samples[k, :n], dist.samples[k, :n], ref.sample_rate) for k in range(ref.channels)]


def reduce_channels(ref: AudioClip, dist: AudioClip) -> MonoPair:
    """Channel 0 (the omnidirectional W channel for FOA) as a single mono pair."""
    return channel_pairs(ref, dist)[0]


PairMetric = Callable[[MonoPair], AudioQualityResult]


def evaluate_clip(metric: PairMetric, ref: AudioClip, dist: AudioClip) -> AudioQualityResult:
    """Run ``metric`` on every channel and average score and features across channels."""
    results = [metric(p) for p in channel_pairs(ref, dist)]
    scores = np.array([r.score for r in results])
    feats = np.mean([r.features for r in results], axis=0)
    return AudioQualityResult(results[0].model_name, float(scores.mean()), feats, per_channel=scores)


def frames(x: np.ndarray, length: int, hop: int) -> np.ndarray:
    """Rows are full frames of ``length`` samples every ``hop``; a partial tail is dropped."""
    if len(x) < length:
        return np.empty((0, length))
    return np.lib.stride_tricks.sliding_window_view(x, length)[::hop]

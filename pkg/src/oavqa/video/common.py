from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import ndimage

from ..media_io import VideoFrame, VideoSequence
from ..registry import VIDEO_MODELS

PSNR_CAP_DB = 100.0
MAX_PIXEL = 255.0


class VideoMetricError(ValueError):
    pass


@dataclass
class VideoQualityResult:
    model_name: str
    score: float
    features: np.ndarray
    per_frame_scores: np.ndarray = field(default_factory=lambda: np.empty(0))
    per_frame_features: np.ndarray = field(default_factory=lambda: np.empty((0, 0)))

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        info = VIDEO_MODELS.get(self.model_name)
        if info is not None and self.features.shape != (info.arity,):
            raise VideoMetricError(
                f"{self.model_name}: expected {info.arity} features, got {self.features.shape}"
            )


FrameMetric = Callable[[VideoFrame, VideoFrame], tuple[float, Sequence[float]]]


def pool_sequence(name: str, frame_metric: FrameMetric, ref: VideoSequence, dist: VideoSequence) -> VideoQualityResult:
    """Evaluate ``frame_metric`` on aligned frames and mean-pool scores and features."""
    if (ref.width, ref.height) != (dist.width, dist.height):
        raise VideoMetricError(
            f"dimension mismatch: {ref.width}x{ref.height} vs {dist.width}x{dist.height}"
        )
    if ref.frame_count != dist.frame_count:
        raise VideoMetricError(f"frame count mismatch: {ref.frame_count} vs {dist.frame_count}")
    scores, feats = [], []
    for fr, fd in zip(ref, dist):
        s, f = frame_metric(fr, fd)
        scores.append(s)
        feats.append(f)
    scores = np.asarray(scores, dtype=np.float64)
    feats = np.asarray(feats, dtype=np.float64)
    return VideoQualityResult(name, float(np.mean(scores)), feats.mean(axis=0), scores, feats)


def as_sequence(x) -> VideoSequence:
    if isinstance(x, VideoSequence):
        return x
    if isinstance(x, VideoFrame):
        return VideoSequence.from_frames([x])
    return VideoSequence.from_frames(x)


def luma(frame: VideoFrame) -> np.ndarray:
    return frame.y.astype(np.float64)


def gaussian_kernel(size: int, sigma: float) -> np.ndarray:
    r = (size - 1) / 2.0
    x = np.arange(size, dtype=np.float64) - r
    k = np.exp(-(x ** 2) / (2.0 * sigma ** 2))
    return k / k.sum()


def separable_filter(img: np.ndarray, k1d: np.ndarray) -> np.ndarray:
    """Correlate with an outer-product kernel using symmetric boundary padding."""
    out = ndimage.correlate1d(img, k1d, axis=0, mode="reflect")
    return ndimage.correlate1d(out, k1d, axis=1, mode="reflect")


def filter2(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    return ndimage.correlate(img, kernel, mode="reflect")


def downsample2(img: np.ndarray) -> np.ndarray:
    """2x2 box low-pass then keep every second sample (block mean, odd edge mirrored)."""
    h, w = img.shape
    img = np.pad(img, ((0, h % 2), (0, w % 2)), mode="symmetric")
    h2, w2 = img.shape[0] // 2, img.shape[1] // 2
    return img.reshape(h2, 2, w2, 2).mean(axis=(1, 3))


def upsample_chroma(plane: np.ndarray) -> np.ndarray:
    return np.repeat(np.repeat(plane, 2, axis=0), 2, axis=1)

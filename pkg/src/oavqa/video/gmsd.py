"""Gradient magnitude similarity deviation (lower is better)."""

from __future__ import annotations

import numpy as np

from ..media_io import VideoFrame, VideoSequence
from .common import MAX_PIXEL, VideoQualityResult, downsample2, filter2, luma, pool_sequence

# 170 on the 0-255 scale, i.e. 170 / 255^2 on [0, 1] intensities
GMSD_C = 0.0026
PREWITT_X = np.array([[1, 0, -1], [1, 0, -1], [1, 0, -1]], dtype=np.float64) / 3.0
PREWITT_Y = PREWITT_X.T.copy()


def gms_map(ref: np.ndarray, dist: np.ndarray) -> np.ndarray:
    x = downsample2(ref / MAX_PIXEL)
    y = downsample2(dist / MAX_PIXEL)
    gx = np.hypot(filter2(x, PREWITT_X), filter2(x, PREWITT_Y))
    gy = np.hypot(filter2(y, PREWITT_X), filter2(y, PREWITT_Y))
    return (2.0 * gx * gy + GMSD_C) / (gx * gx + gy * gy + GMSD_C)


def gmsd_frame(ref: VideoFrame, dist: VideoFrame) -> tuple[float, list[float]]:
    g = gms_map(luma(ref), luma(dist))
    sd = float(np.std(g))
    return sd, [float(np.mean(g)), sd]


def gmsd(ref: VideoSequence, dist: VideoSequence) -> VideoQualityResult:
    return pool_sequence("gmsd", gmsd_frame, ref, dist)

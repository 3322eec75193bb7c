"""SSIM and MS-SSIM on the luma plane."""

from __future__ import annotations

import numpy as np

from ..media_io import VideoFrame, VideoSequence
from .common import (
    MAX_PIXEL,
    VideoMetricError,
    VideoQualityResult,
    downsample2,
    gaussian_kernel,
    luma,
    pool_sequence,
    separable_filter,
)

WINDOW = 11
SIGMA = 1.5
K1, K2 = 0.01, 0.03
C1 = (K1 * MAX_PIXEL) ** 2
C2 = (K2 * MAX_PIXEL) ** 2
MS_SSIM_WEIGHTS = (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)
MS_SSIM_MIN_SIZE = WINDOW * 2 ** (len(MS_SSIM_WEIGHTS) - 1)

_KERNEL = gaussian_kernel(WINDOW, SIGMA)


def ssim_maps(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Luminance map and contrast-structure map for two float images."""
    mu_x = separable_filter(x, _KERNEL)
    mu_y = separable_filter(y, _KERNEL)
    sxx = separable_filter(x * x, _KERNEL) - mu_x * mu_x
    syy = separable_filter(y * y, _KERNEL) - mu_y * mu_y
    sxy = separable_filter(x * y, _KERNEL) - mu_x * mu_y
    lum = (2.0 * mu_x * mu_y + C1) / (mu_x * mu_x + mu_y * mu_y + C1)
    cs = (2.0 * sxy + C2) / (sxx + syy + C2)
    return lum, cs


def ssim_frame(ref: VideoFrame, dist: VideoFrame) -> tuple[float, list[float]]:
    lum, cs = ssim_maps(luma(ref), luma(dist))
    return float(np.mean(lum * cs)), [float(lum.mean()), float(cs.mean())]


def ssim(ref: VideoSequence, dist: VideoSequence) -> VideoQualityResult:
    """Gaussian-window SSIM; features are the mean luminance and contrast-structure terms."""
    return pool_sequence("ssim", ssim_frame, ref, dist)


def ms_ssim_frame(ref: VideoFrame, dist: VideoFrame) -> tuple[float, list[float]]:
    x, y = luma(ref), luma(dist)
    if min(x.shape) < MS_SSIM_MIN_SIZE:
        raise VideoMetricError(
            f"MS-SSIM needs frames of at least {MS_SSIM_MIN_SIZE}px per side, got {x.shape[1]}x{x.shape[0]}"
        )
    cs_vals = []
    n = len(MS_SSIM_WEIGHTS)
    for scale in range(n):
        lum, cs = ssim_maps(x, y)
        cs_vals.append(float(cs.mean()))
        if scale < n - 1:
            x, y = downsample2(x), downsample2(y)
    l_coarse = float(lum.mean())
    # negative means can appear for anticorrelated content; a fractional power needs >= 0
    cs_pos = np.maximum(cs_vals, 0.0)
    score = max(l_coarse, 0.0) ** MS_SSIM_WEIGHTS[-1] * float(np.prod(cs_pos ** np.asarray(MS_SSIM_WEIGHTS)))
    return score, [l_coarse, *cs_vals]


def ms_ssim(ref: VideoSequence, dist: VideoSequence) -> VideoQualityResult:
    """Five-scale MS-SSIM; features are the coarsest luminance term and the five cs terms."""
    return pool_sequence("ms-ssim", ms_ssim_frame, ref, dist)

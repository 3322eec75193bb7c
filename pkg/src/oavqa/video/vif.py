"""Pixel-domain visual information fidelity (VIFP) over four scales."""

from __future__ import annotations

import numpy as np

from ..media_io import VideoFrame, VideoSequence
from .common import VideoQualityResult, gaussian_kernel, luma, pool_sequence, separable_filter

SIGMA_NSQ = 2.0
EPS = 1e-10
N_SCALES = 4


def vifp_terms(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-scale information numerators (distorted) and denominators (reference)."""
    num = np.zeros(N_SCALES)
    den = np.zeros(N_SCALES)
    for s in range(N_SCALES):
        size = 2 ** (N_SCALES - s) + 1
        kernel = gaussian_kernel(size, size / 5.0)
        if s > 0:
            x = separable_filter(x, kernel)[::2, ::2]
            y = separable_filter(y, kernel)[::2, ::2]
        mu_x = separable_filter(x, kernel)
        mu_y = separable_filter(y, kernel)
        sxx = np.maximum(separable_filter(x * x, kernel) - mu_x * mu_x, 0.0)
        syy = np.maximum(separable_filter(y * y, kernel) - mu_y * mu_y, 0.0)
        sxy = separable_filter(x * y, kernel) - mu_x * mu_y

        flat_ref = sxx < EPS
        g = np.divide(sxy, sxx, out=np.zeros_like(sxy), where=~flat_ref)
        sv = syy - g * sxy
        sv[flat_ref] = syy[flat_ref]
        sxx = np.where(flat_ref, 0.0, sxx)
        flat_dist = syy < EPS
        g[flat_dist] = 0.0
        sv[flat_dist] = 0.0
        neg = g < 0
        sv[neg] = syy[neg]
        g[neg] = 0.0
        sv = np.maximum(sv, EPS)

        num[s] = np.sum(np.log10(1.0 + g * g * sxx / (sv + SIGMA_NSQ)))
        den[s] = np.sum(np.log10(1.0 + sxx / SIGMA_NSQ))
    return num, den


def vifp_frame(ref: VideoFrame, dist: VideoFrame) -> tuple[float, list[float]]:
    num, den = vifp_terms(luma(ref), luma(dist))
    # a perfectly flat reference carries no information at any scale
    ratios = [float(n / d) if d > 0 else 1.0 for n, d in zip(num, den)]
    total = num.sum() / den.sum() if den.sum() > 0 else 1.0
    return float(total), ratios


def vifp(ref: VideoSequence, dist: VideoSequence) -> VideoQualityResult:
    return pool_sequence("vifp", vifp_frame, ref, dist)

"""PSNR family on ERP content: plain, WS-PSNR, S-PSNR and CPP-PSNR.

Each variant reports per-plane PSNR as features ``[Y, U, V]`` and uses the luma
value as the score. Zero error is capped at :data:`PSNR_CAP_DB`.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..media_io import VideoFrame, VideoSequence
from ..sphere import (
    SphereSampleSet,
    bilinear_sample,
    cpp_grid,
    cpp_resample,
    erp_weights,
    sphere_samples,
)
from .common import MAX_PIXEL, PSNR_CAP_DB, VideoMetricError, VideoQualityResult, pool_sequence


def mse_to_psnr(mse: float, peak: float = MAX_PIXEL) -> float:
    if mse <= 0.0:
        return PSNR_CAP_DB
    return min(PSNR_CAP_DB, 10.0 * np.log10(peak * peak / mse))


def weighted_mse(ref: np.ndarray, dist: np.ndarray, weights: np.ndarray | None = None) -> float:
    err = (ref.astype(np.float64) - dist.astype(np.float64)) ** 2
    if weights is None:
        return float(err.mean())
    return float((err * weights).sum() / weights.sum())


def _plane_weights(weights, idx, plane):
    if weights is None:
        return None
    w = weights[idx]
    w = getattr(w, "weights", w)
    if w is None:
        return None
    if w.shape != plane.shape:
        raise VideoMetricError(f"weight map {w.shape} does not match plane {plane.shape}")
    return w


def psnr_planar(ref: VideoSequence, dist: VideoSequence, weights: Sequence | None = None,
                model_name: str = "psnr") -> VideoQualityResult:
    """Per-plane (optionally weighted) PSNR; ``weights`` holds one map per Y/U/V plane."""

    def frame_metric(fr: VideoFrame, fd: VideoFrame):
        vals = []
        for k, (pr, pd) in enumerate(zip(fr.planes, fd.planes)):
            vals.append(mse_to_psnr(weighted_mse(pr, pd, _plane_weights(weights, k, pr))))
        return vals[0], vals

    return pool_sequence(model_name, frame_metric, ref, dist)


def ws_psnr(ref: VideoSequence, dist: VideoSequence) -> VideoQualityResult:
    w, h = ref.width, ref.height
    weights = (erp_weights(w, h), erp_weights(w // 2, h // 2), erp_weights(w // 2, h // 2))
    return psnr_planar(ref, dist, weights, model_name="ws-psnr")


def s_psnr(ref: VideoSequence, dist: VideoSequence, samples: SphereSampleSet | None = None) -> VideoQualityResult:
    """PSNR over uniformly distributed sphere points, bilinearly interpolated from each plane."""
    samples = samples if samples is not None else sphere_samples()
    coords = {}

    def frame_metric(fr: VideoFrame, fd: VideoFrame):
        vals = []
        for pr, pd in zip(fr.planes, fd.planes):
            h, w = pr.shape
            if (w, h) not in coords:
                coords[(w, h)] = samples.erp_coords(w, h)
            u, v = coords[(w, h)]
            err = bilinear_sample(pr, u, v) - bilinear_sample(pd, u, v)
            vals.append(mse_to_psnr(float(np.mean(err * err))))
        return vals[0], vals

    return pool_sequence("s-psnr", frame_metric, ref, dist)


def cpp_psnr(ref: VideoSequence, dist: VideoSequence) -> VideoQualityResult:
    """PSNR after remapping each plane to the Craster parabolic projection, inside its outline."""

    def frame_metric(fr: VideoFrame, fd: VideoFrame):
        vals = []
        for pr, pd in zip(fr.planes, fd.planes):
            grid = cpp_grid(pr.shape[1], pr.shape[0])
            rr, mask = cpp_resample(pr, grid)
            dd, _ = cpp_resample(pd, grid)
            err = rr[mask] - dd[mask]
            vals.append(mse_to_psnr(float(np.mean(err * err))))
        return vals[0], vals

    return pool_sequence("cpp-psnr", frame_metric, ref, dist)

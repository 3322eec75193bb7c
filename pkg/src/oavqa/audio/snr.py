"""Global SNR and segmental SNR."""

from __future__ import annotations

import numpy as np

from .common import AudioMetricError, AudioQualityResult, MonoPair, frames

SNR_CAP_DB = 60.0
SEG_FRAME_S = 0.030
SEG_MIN_DB, SEG_MAX_DB = -10.0, 35.0
# frames whose reference energy is this far below the mean frame energy are treated as silence
SEG_SILENCE_DB = 35.0


def snr(pair: MonoPair) -> AudioQualityResult:
    r, d = pair.reference, pair.distorted
    sig = float(np.sum(r * r))
    if sig == 0.0:
        raise AudioMetricError("reference has zero energy")
    err = float(np.sum((r - d) ** 2))
    value = SNR_CAP_DB if err == 0.0 else min(SNR_CAP_DB, 10.0 * np.log10(sig / err))
    return AudioQualityResult("snr", value, [value])


def seg_snr(pair: MonoPair) -> AudioQualityResult:
    """Mean of clamped SNRs over non-overlapping 30 ms frames, silent frames excluded."""
    n = int(round(SEG_FRAME_S * pair.sample_rate))
    rf = frames(pair.reference, n, n)
    df = frames(pair.distorted, n, n)
    sig = np.sum(rf * rf, axis=1)
    err = np.sum((rf - df) ** 2, axis=1)
    if len(sig) == 0 or not np.any(sig > 0):
        raise AudioMetricError("no voiced frames")
    threshold = sig.mean() * 10.0 ** (-SEG_SILENCE_DB / 10.0)
    voiced = sig > threshold
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = 10.0 * np.log10(sig[voiced] / err[voiced])
    per_frame = np.clip(np.where(err[voiced] == 0.0, SEG_MAX_DB, raw), SEG_MIN_DB, SEG_MAX_DB)
    value = float(per_frame.mean())
    return AudioQualityResult("segsnr", value, [value], per_segment=per_frame)

"""Log-likelihood ratio between LPC models of reference and distorted frames."""

from __future__ import annotations

import numpy as np
from scipy.linalg import toeplitz

from .common import AudioMetricError, AudioQualityResult, MonoPair, frames

LPC_ORDER = 10
FRAME_S = 0.030
HOP_FRACTION = 0.25
KEEP_FRACTION = 0.95


def levinson(r: np.ndarray, order: int) -> np.ndarray | None:
    """LPC polynomial [1, a1..ap] from autocorrelation lags; None if not positive definite."""
    if r[0] <= 0.0:
        return None
    a = np.zeros(order + 1)
    a[0] = 1.0
    err = r[0]
    for i in range(1, order + 1):
        acc = r[i] + np.dot(a[1:i], r[i - 1:0:-1])
        k = -acc / err
        a[1:i] = a[1:i] + k * a[i - 1:0:-1]
        a[i] = k
        err *= 1.0 - k * k
        if err <= 0.0:
            return None
    return a


def _autocorr(x: np.ndarray, order: int) -> np.ndarray:
    n = len(x)
    return np.array([np.dot(x[: n - k], x[k:]) for k in range(order + 1)])


def llr_frames(pair: MonoPair) -> np.ndarray:
    n = int(round(FRAME_S * pair.sample_rate))
    hop = max(1, int(n * HOP_FRACTION))
    window = np.hanning(n)
    out = []
    for fr, fd in zip(frames(pair.reference, n, hop), frames(pair.distorted, n, hop)):
        rr = _autocorr(fr * window, LPC_ORDER)
        rd = _autocorr(fd * window, LPC_ORDER)
        a_r = levinson(rr, LPC_ORDER)
        a_d = levinson(rd, LPC_ORDER)
        if a_r is None or a_d is None:
            continue
        R = toeplitz(rr)
        num = a_d @ R @ a_d
        den = a_r @ R @ a_r
        if den <= 0.0:
            continue
        # a_r minimises the quadratic form, so the ratio is >= 1 up to rounding
        out.append(max(0.0, float(np.log(num / den))))
    return np.asarray(out)


def llr(pair: MonoPair) -> AudioQualityResult:
    """Mean over the lowest 95% of per-frame LLR values (order-10 LPC, 30 ms Hann frames)."""
    vals = llr_frames(pair)
    if len(vals) == 0:
        raise AudioMetricError("LLR: every frame had an unstable LPC fit")
    keep = max(1, int(round(len(vals) * KEEP_FRACTION)))
    value = float(np.mean(np.sort(vals)[:keep]))
    return AudioQualityResult("llr", value, [value], per_segment=vals)

"""Correlation criteria between objective predictions and subjective scores."""

from __future__ import annotations

import numpy as np
from scipy.stats import rankdata


class CorrelationError(ValueError):
    pass


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(np.dot(xc, xc))
    syy = float(np.dot(yc, yc))
    if sxx == 0.0 or syy == 0.0:
        raise CorrelationError("correlation undefined for a constant vector")
    r = float(np.dot(xc, yc)) / np.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def _check(pred, target, min_len: int) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(pred, dtype=np.float64).ravel()
    t = np.asarray(target, dtype=np.float64).ravel()
    if p.shape != t.shape:
        raise CorrelationError(f"length mismatch: {p.size} vs {t.size}")
    if p.size < min_len:
        raise CorrelationError(f"need at least {min_len} samples, got {p.size}")
    if not (np.all(np.isfinite(p)) and np.all(np.isfinite(t))):
        raise CorrelationError("non-finite values")
    return p, t


def srcc(predictions, targets) -> float:
    """Spearman rank correlation with average ranks for ties."""
    p, t = _check(predictions, targets, 3)
    return _pearson(rankdata(p), rankdata(t))


def plcc(predictions, targets) -> float:
    """Pearson linear correlation, no nonlinear mapping applied."""
    p, t = _check(predictions, targets, 2)
    return _pearson(p, t)

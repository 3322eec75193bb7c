"""Weighted-product fusion of normalised video and audio scores."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ..stats import CorrelationError, srcc
from .normalize import NormalizationSpec, normalization_for

WEIGHT_GRID = tuple(k / 20 for k in range(21))


def weighted_product(qv_hat, qa_hat, w: float):
    """``qv_hat**w * qa_hat**(1 - w)``; works elementwise and treats 0**0 as 1."""
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"weight must lie in [0, 1], got {w}")
    qv = np.asarray(qv_hat, dtype=np.float64)
    qa = np.asarray(qa_hat, dtype=np.float64)
    out = np.power(qv, w) * np.power(qa, 1.0 - w)
    # equal inputs return that value exactly instead of up to an ulp off
    out = np.where(qv == qa, qv, out)
    return float(out) if out.ndim == 0 else out


def grid_search_weight(qv_hat, qa_hat=None, mos=None, grid=WEIGHT_GRID) -> float:
    """Grid weight maximising training SRCC; ties go to the larger (video) weight.

    Takes three aligned arrays, or a single sequence of ``(qv_hat, qa_hat, mos)`` triples.
    """
    if qa_hat is None and mos is None:
        qv_hat, qa_hat, mos = np.asarray(qv_hat, dtype=np.float64).T
    qv = np.asarray(qv_hat, dtype=np.float64)
    qa = np.asarray(qa_hat, dtype=np.float64)
    y = np.asarray(mos, dtype=np.float64)
    if len(y) < 3:
        raise ValueError("grid search needs at least 3 training points")
    if np.all(y == y[0]):
        raise CorrelationError("MOS is constant; SRCC is undefined")
    best_w, best = None, -np.inf
    for w in grid:
        try:
            r = srcc(weighted_product(qv, qa, w), y)
        except CorrelationError:
            continue
        if r >= best:
            best_w, best = w, r
    if best_w is None:
        raise CorrelationError("fused scores are constant for every weight")
    return float(best_w)


@dataclass
class WeightedProductModel:
    w: float
    video_norm: NormalizationSpec
    audio_norm: NormalizationSpec

    def __post_init__(self):
        if not 0.0 <= self.w <= 1.0:
            raise ValueError(f"weight must lie in [0, 1], got {self.w}")

    @classmethod
    def fit(cls, video_model: str, audio_model: str, qv, qa, mos) -> "WeightedProductModel":
        vn, an = normalization_for(video_model), normalization_for(audio_model)
        qv_hat = [vn(q) for q in qv]
        qa_hat = [an(q) for q in qa]
        return cls(grid_search_weight(qv_hat, qa_hat, mos), vn, an)

    def predict(self, qv, qa):
        qv_hat = np.array([self.video_norm(q) for q in np.atleast_1d(qv)])
        qa_hat = np.array([self.audio_norm(q) for q in np.atleast_1d(qa)])
        out = weighted_product(qv_hat, qa_hat, self.w)
        return float(out[0]) if np.ndim(qv) == 0 else out

    def to_json(self) -> str:
        return json.dumps({
            "type": "weighted_product",
            "video_model": self.video_norm.model_name,
            "audio_model": self.audio_norm.model_name,
            "w": self.w,
            "video_norm": self.video_norm.to_dict(),
            "audio_norm": self.audio_norm.to_dict(),
        }, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "WeightedProductModel":
        d = json.loads(text)
        if d.get("type") != "weighted_product":
            raise ValueError("not a weighted-product model document")
        return cls(d["w"], NormalizationSpec.from_dict(d["video_norm"]), NormalizationSpec.from_dict(d["audio_norm"]))

from __future__ import annotations

from ..registry import VIDEO_MODELS, UnknownModelError
from ..store import ArityError, read_score_csv
from .common import VideoQualityResult


def external_video_scores(csv_path, model_name: str) -> dict[str, VideoQualityResult]:
    """Wrap externally computed scores (e.g. VMAF) keyed by entry id."""
    name = model_name.lower()
    if name not in VIDEO_MODELS:
        raise UnknownModelError(f"unknown video model {model_name!r}")
    arity = VIDEO_MODELS[name].arity
    out = {}
    for rid, rec in read_score_csv(csv_path, name).items():
        if len(rec.features) != arity:
            raise ArityError(f"{name}: expected {arity} features, got {len(rec.features)}")
        out[rid] = VideoQualityResult(name, rec.score, rec.features)
    return out

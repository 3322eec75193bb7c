from __future__ import annotations

from ..registry import AUDIO_MODELS, UnknownModelError
from ..store import ArityError, read_score_csv
from .common import AudioQualityResult


def external_audio_scores(csv_path, model_name: str) -> dict[str, AudioQualityResult]:
    """Wrap externally computed scores (PEAQ, VISQOL) keyed by entry id."""
    name = model_name.lower()
    if name not in AUDIO_MODELS:
        raise UnknownModelError(f"unknown audio model {model_name!r}")
    arity = AUDIO_MODELS[name].arity
    out = {}
    for rid, rec in read_score_csv(csv_path, name).items():
        if len(rec.features) != arity:
            raise ArityError(f"{name}: expected {arity} features, got {len(rec.features)}")
        out[rid] = AudioQualityResult(name, rec.score, rec.features)
    return out

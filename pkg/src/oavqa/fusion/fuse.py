"""Score-level and feature-level SVR fusion of single-mode results."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..registry import model_info
from .svr import SvrConfig, SvrError, SvrModel, predict_svr, train_svr


class SchemaError(SvrError):
    pass


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    schema: tuple[str, ...]

    def __post_init__(self):
        if len(self.values) != len(self.schema):
            raise SchemaError(f"{len(self.values)} values for {len(self.schema)} schema names")


def feature_schema(video_model: str, audio_model: str) -> tuple[str, ...]:
    return model_info(video_model).qualified_features() + model_info(audio_model).qualified_features()


def score_schema(video_model: str, audio_model: str) -> tuple[str, ...]:
    return (f"{video_model.lower()}:score", f"{audio_model.lower()}:score")


def feature_vector(video, audio) -> FeatureVector:
    """Concatenate ``[f_v ; f_a]`` checking each side's length against its model."""
    fv = np.asarray(video.features, dtype=np.float64)
    fa = np.asarray(audio.features, dtype=np.float64)
    vi, ai = model_info(video.model_name), model_info(audio.model_name)
    if fv.shape != (vi.arity,) or fa.shape != (ai.arity,):
        raise SchemaError(
            f"feature arity mismatch: {video.model_name} {fv.shape} / {audio.model_name} {fa.shape}"
        )
    return FeatureVector(np.concatenate([fv, fa]), feature_schema(video.model_name, audio.model_name))


def _check_schema(model: SvrModel, schema: tuple[str, ...]) -> None:
    if model.schema and tuple(model.schema) != tuple(schema):
        raise SchemaError(f"input schema {schema} does not match model schema {model.schema}")
    if model.dim != len(schema):
        raise SchemaError(f"model expects {model.dim} inputs, got {len(schema)}")


def fuse_scores_svr(video, audio, model: SvrModel) -> float:
    """Predict from the raw pair ``[Q_v, Q_a]``."""
    schema = score_schema(video.model_name, audio.model_name)
    _check_schema(model, schema)
    x = np.array([video.score, audio.score], dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise SvrError("score-based fusion needs finite scores for both modalities")
    return predict_svr(model, x)


def fuse_features_svr(video, audio, model: SvrModel) -> float:
    """Predict from the concatenated quality-aware feature vectors."""
    fv = feature_vector(video, audio)
    _check_schema(model, fv.schema)
    return predict_svr(model, fv.values)


def train_score_svr(video_model: str, audio_model: str, qv, qa, mos, config: SvrConfig | None = None) -> SvrModel:
    X = np.column_stack([np.asarray(qv, dtype=np.float64), np.asarray(qa, dtype=np.float64)])
    return train_svr(X, mos, config, schema=score_schema(video_model, audio_model))


def train_feature_svr(video_model: str, audio_model: str, fv, fa, mos, config: SvrConfig | None = None) -> SvrModel:
    X = np.hstack([np.atleast_2d(fv), np.atleast_2d(fa)])
    return train_svr(X, mos, config, schema=feature_schema(video_model, audio_model))

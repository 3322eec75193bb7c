import json

from .fuse import (
    FeatureVector,
    SchemaError,
    feature_schema,
    feature_vector,
    fuse_features_svr,
    fuse_scores_svr,
    score_schema,
    train_feature_svr,
    train_score_svr,
)
from .normalize import PUBLISHED_NORMALIZATION, NormalizationSpec, minmax_spec, normalization_for, normalize
from .svr import (
    SvrConfig,
    SvrConvergenceError,
    SvrError,
    SvrModel,
    kkt_violation,
    predict_svr,
    rbf_kernel,
    train_svr,
)
from .weighted import WEIGHT_GRID, WeightedProductModel, grid_search_weight, weighted_product

METHODS = ("wp", "svr-score", "svr-feat")


def load_model(text: str):
    """Deserialise either fusion model type from its JSON document."""
    kind = json.loads(text).get("type")
    if kind == "weighted_product":
        return WeightedProductModel.from_json(text)
    if kind == "epsilon_svr":
        return SvrModel.from_json(text)
    raise ValueError(f"unknown model document type {kind!r}")

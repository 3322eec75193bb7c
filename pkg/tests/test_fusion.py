import json
import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oavqa.audio import AudioQualityResult
from oavqa.fusion import (
    PUBLISHED_NORMALIZATION,
    WEIGHT_GRID,
    SchemaError,
    SvrConfig,
    SvrConvergenceError,
    SvrError,
    SvrModel,
    WeightedProductModel,
    feature_vector,
    fuse_features_svr,
    fuse_scores_svr,
    grid_search_weight,
    kkt_violation,
    load_model,
    minmax_spec,
    normalize,
    predict_svr,
    train_feature_svr,
    train_score_svr,
    train_svr,
    weighted_product,
)
from oavqa.registry import ALL_MODELS, UnknownModelError
from oavqa.video import VideoQualityResult


# ---------------------------------------------------------------- normalisation

@pytest.mark.parametrize("model,score,expected", [
    ("ws-psnr", 52.0, 1.0), ("ws-psnr", 23.0, 0.0), ("s-psnr", 37.5, 0.5), ("cpp-psnr", 52.0, 1.0),
    ("gmsd", 0.26, 0.0), ("gmsd", 0.0, 1.0), ("vmaf", 100.0, 1.0), ("vmaf", 50.0, 0.5),
    ("peaq", 0.21, 1.0), ("peaq", -0.21, 0.88), ("llr", 0.7, 1.0), ("llr", -1.2, 0.0),
    ("snr", 20.0, 1.0), ("snr", 30.0, 1.0), ("segsnr", -2.0, 0.0), ("segsnr", 35.0, 1.0),
    ("ssim", 0.93, 0.93), ("stoi", 0.7, 0.7),
])
def test_published_maps(model, score, expected):
    assert normalize(score, model) == pytest.approx(expected, abs=1e-12)


def test_normalize_errors_and_kinds():
    with pytest.raises(UnknownModelError):
        normalize(1.0, "bogus")
    with pytest.raises(ValueError):
        normalize(float("nan"), "snr")
    assert PUBLISHED_NORMALIZATION["gmsd"].kind == "one-minus-affine"
    assert PUBLISHED_NORMALIZATION["llr"].kind == "abs-affine"
    assert PUBLISHED_NORMALIZATION["snr"].kind == "affine"
    assert PUBLISHED_NORMALIZATION["fsim"].kind == "passthrough"
    assert set(PUBLISHED_NORMALIZATION) == set(ALL_MODELS)


@pytest.mark.parametrize("model", sorted(PUBLISHED_NORMALIZATION))
def test_normalize_monotone_in_quality(model):
    spec = PUBLISHED_NORMALIZATION[model]
    lo, hi = (0.0, 1.0) if spec.passthrough else sorted((spec.lo, spec.hi))
    xs = np.linspace(lo - 1.0, hi + 1.0, 200)
    if model == "llr":
        xs = xs[xs >= 0]
    ys = np.array([spec(x) for x in xs])
    direction = 1 if ALL_MODELS[model].higher_is_better else -1
    assert np.all(direction * np.diff(ys) >= 0)
    assert ys.min() >= 0 and ys.max() <= 1


def test_minmax_spec():
    s = minmax_spec("x", [2.0, 4.0, 6.0])
    assert s(2.0) == 0.0 and s(6.0) == 1.0 and s(4.0) == 0.5
    inv = minmax_spec("x", [2.0, 6.0], higher_is_better=False)
    assert inv(2.0) == 1.0 and inv(6.0) == 0.0


# ---------------------------------------------------------------- weighted product

def test_weighted_product_examples():
    assert weighted_product(0.8, 0.5, 0.7231) == pytest.approx(0.8**0.7231 * 0.5**0.2769, abs=1e-15)
    assert weighted_product(0.8, 0.5, 0.7231) == pytest.approx(0.7024, abs=1e-4)
    assert weighted_product(0.3, 0.9, 1.0) == 0.3
    assert weighted_product(0.3, 0.9, 0.0) == 0.9
    assert weighted_product(0.0, 0.0, 0.0) == 0.0
    assert weighted_product(0.0, 0.5, 0.0) == 0.5  # 0**0 == 1
    with pytest.raises(ValueError):
        weighted_product(0.5, 0.5, 1.5)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.sampled_from(WEIGHT_GRID))
def test_weighted_product_fixpoint_and_bounds(q, r, w):
    assert weighted_product(q, q, w) == pytest.approx(q, abs=1e-15)
    v = weighted_product(q, r, w)
    assert min(q, r) - 1e-15 <= v <= max(q, r) + 1e-15


def test_grid_search_planted():
    g = np.random.default_rng(3)
    qv, qa = g.random(50), g.random(50)
    assert grid_search_weight(qv, qa, qv) == 1.0
    assert grid_search_weight(qv, qa, qa) == 0.0
    assert grid_search_weight(list(zip(qv, qa, qv))) == 1.0
    with pytest.raises(ValueError):
        grid_search_weight(qv, qa, np.ones(50))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_grid_search_invariant_to_monotone_mos(seed):
    g = np.random.default_rng(seed)
    qv, qa = g.random(40), g.random(40)
    mos = qv**0.6 * qa**0.4 + 0.05 * g.standard_normal(40)
    assert grid_search_weight(qv, qa, mos) == grid_search_weight(qv, qa, mos**3)


def test_weighted_model_roundtrip():
    g = np.random.default_rng(5)
    qv = 23 + 29 * g.random(30)
    qa = 20 * g.random(30)
    mos = ((qv - 23) / 29) ** 0.7 * (qa / 20) ** 0.3
    m = WeightedProductModel.fit("ws-psnr", "snr", qv, qa, mos)
    assert m.w in WEIGHT_GRID
    back = load_model(m.to_json())
    assert isinstance(back, WeightedProductModel)
    np.testing.assert_array_equal(back.predict(qv, qa), m.predict(qv, qa))
    assert json.loads(m.to_json())["w"] == m.w


# ---------------------------------------------------------------- SVR

def _brute_force(model: SvrModel, x):
    xs = model.scale(x)[0]
    return math.fsum(a * np.exp(-model.config.gamma * np.sum((xs - sv) ** 2))
               for a, sv in zip(model.dual_coef, model.support_vectors)) + model.bias


def test_svr_interpolates_line():
    x = np.array([0, 0.25, 0.5, 0.75, 1.0])[:, None]
    y = 2 * x[:, 0]
    m = train_svr(x, y, SvrConfig(epsilon=0.01))
    np.testing.assert_allclose(m.predict(x), y, atol=0.05)
    assert kkt_violation(m, x, y) <= 1e-3


def test_svr_flat_targets():
    g = np.random.default_rng(0)
    x = g.random((20, 3))
    m = train_svr(x, np.full(20, 3.5))
    assert np.all(np.abs(m.predict(g.random((10, 3))) - 3.5) <= m.config.epsilon + 1e-9)


def test_svr_conflicting_duplicates():
    x = np.array([[0.0], [0.0], [1.0]])
    y = np.array([1.0, 3.0, 2.0])
    m = train_svr(x, y, SvrConfig(C=10.0))
    p = predict_svr(m, np.array([0.0]))
    assert 1.0 <= p <= 3.0
    assert kkt_violation(m, x, y) <= 1e-3


@pytest.mark.parametrize("seed", range(3))
def test_svr_kkt_dual_bounds_and_oracle(seed):
    g = np.random.default_rng(seed)
    X = g.random((60, 4)) * [1, 10, 100, 0.1]
    z = np.sin(X[:, 0] * 3) + X[:, 1] / 10 + 0.05 * g.standard_normal(60)
    m = train_svr(X, z, track_objective=True)
    assert kkt_violation(m, X, z) <= 1e-3
    assert np.all(np.abs(m.dual_coef) <= m.config.C + 1e-9)
    hist = np.array(m.diagnostics["objective_history"])
    assert np.all(np.diff(hist) <= 1e-9 * np.maximum(1.0, np.abs(hist[:-1])))
    for x in g.random((5, 4)) * [1, 10, 100, 0.1]:
        assert abs(predict_svr(m, x) - _brute_force(m, x)) <= 1e-12


def test_svr_serialization_and_errors():
    g = np.random.default_rng(1)
    X, z = g.random((30, 2)), g.random(30)
    m = train_svr(X, z, schema=("a", "b"))
    back = SvrModel.from_json(m.to_json())
    Q = g.random((10, 2))
    np.testing.assert_allclose(back.predict(Q), m.predict(Q), atol=1e-12, rtol=0)
    assert back.schema == ("a", "b")
    with pytest.raises(SvrError):
        predict_svr(m, np.zeros(3))
    empty = SvrModel(np.empty((0, 2)), np.empty(0), 0.25, np.zeros(2), np.ones(2), SvrConfig())
    assert predict_svr(empty, np.array([0.3, 0.3])) == 0.25
    with pytest.raises(SvrError):
        SvrConfig(gamma=0)
    with pytest.raises(SvrError):
        train_svr(X[:1], z[:1])


def test_svr_nonconvergence_reported():
    g = np.random.default_rng(2)
    X, z = g.random((50, 3)), g.random(50)
    with pytest.raises(SvrConvergenceError) as info:
        train_svr(X, z, SvrConfig(max_iter=2, epsilon=0.0))
    assert info.value.iterations == 2 and info.value.violation > 0


# ---------------------------------------------------------------- score / feature fusion

def _results(g, n):
    vids = [VideoQualityResult("vifp", float(f.mean()), f) for f in g.random((n, 4))]
    auds = [AudioQualityResult("visqol", float(f.mean()), f) for f in g.random((n, 3))]
    return vids, auds


def test_feature_fusion_schema():
    g = np.random.default_rng(4)
    vids, auds = _results(g, 25)
    fv = feature_vector(vids[0], auds[0])
    assert len(fv.values) == 7
    assert fv.schema[0] == "vifp:scale1" and fv.schema[-1] == "visqol:fullband"
    mos = np.array([v.score + a.score for v, a in zip(vids, auds)])
    m = train_feature_svr("vifp", "visqol", [v.features for v in vids], [a.features for a in auds], mos)
    assert m.dim == 7
    assert fuse_features_svr(vids[0], auds[0], m) == pytest.approx(predict_svr(m, fv.values))
    swapped = train_feature_svr("vifp", "stoi", [v.features for v in vids], g.random((25, 1)), mos)
    with pytest.raises(SchemaError):
        fuse_features_svr(vids[0], auds[0], swapped)
    with pytest.raises(SchemaError):
        feature_vector(SimpleNamespace(model_name="vifp", features=np.zeros(3)), auds[0])


def test_score_fusion():
    g = np.random.default_rng(6)
    vids, auds = _results(g, 25)
    mos = np.array([v.score * a.score for v, a in zip(vids, auds)])
    m = train_score_svr("vifp", "visqol", [v.score for v in vids], [a.score for a in auds], mos)
    assert m.schema == ("vifp:score", "visqol:score")
    p = fuse_scores_svr(vids[3], auds[3], m)
    assert p == pytest.approx(predict_svr(m, np.array([vids[3].score, auds[3].score])))
    nan_score = VideoQualityResult("vifp", float("nan"), vids[3].features)
    with pytest.raises(SvrError):
        fuse_scores_svr(nan_score, auds[3], m)
    assert isinstance(load_model(m.to_json()), SvrModel)

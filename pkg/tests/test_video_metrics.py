import numpy as np
import pytest
from conftest import frame_from_float, noisy, seq, textured_frame
from scipy import ndimage

from oavqa.media_io import VideoFrame
from oavqa.registry import VIDEO_MODELS
from oavqa.sphere import erp_weights, sphere_samples
from oavqa.video import (
    NATIVE_VIDEO_METRICS,
    PSNR_CAP_DB,
    VideoMetricError,
    cpp_psnr,
    external_video_scores,
    fsim,
    gmsd,
    ms_ssim,
    psnr_planar,
    s_psnr,
    ssim,
    vifp,
    ws_psnr,
)
from oavqa.video.gmsd import gms_map
from oavqa.video.ssim import C1, MS_SSIM_WEIGHTS
from oavqa.store import ArityError

SMALL_SPHERE = sphere_samples(20000)


@pytest.fixture
def pair(rng):
    ref = textured_frame(rng, 64, 32)
    return ref, noisy(ref, 6.0, rng)


def test_psnr_cap_and_hand_value():
    f = VideoFrame.constant(2, 2, y=100)
    assert psnr_planar(seq(f), seq(f)).score == PSNR_CAP_DB
    g = VideoFrame.constant(2, 2, y=110)
    r = psnr_planar(seq(f), seq(g))
    assert r.score == pytest.approx(10 * np.log10(255**2 / 100), abs=1e-12)
    assert r.score == pytest.approx(28.13, abs=5e-3)
    assert r.features.tolist() == [r.score, PSNR_CAP_DB, PSNR_CAP_DB]


@pytest.mark.parametrize("metric", [ws_psnr, cpp_psnr, lambda a, b: s_psnr(a, b, SMALL_SPHERE)])
def test_spherical_psnr_constant_frames(metric):
    ref = seq(VideoFrame.constant(64, 32, y=0, u=0, v=0))
    dist = seq(VideoFrame.constant(64, 32, y=16, u=16, v=16))
    expected = 10 * np.log10(255**2 / 256)
    r = metric(ref, dist)
    np.testing.assert_allclose(r.features, [expected] * 3, atol=1e-9)
    assert r.score == pytest.approx(24.048, abs=1e-3)
    assert metric(ref, ref).score == PSNR_CAP_DB


def test_ws_psnr_equator_vs_pole():
    w, h = 64, 32
    base = np.full((h, w), 128.0)
    band = 4
    eq, pole = base.copy(), base.copy()
    eq[h // 2 - band // 2:h // 2 + band // 2] += 10
    pole[:band] += 10
    ref = seq(frame_from_float(base))
    r_eq = ws_psnr(ref, seq(frame_from_float(eq)))
    r_pole = ws_psnr(ref, seq(frame_from_float(pole)))
    plain_eq = psnr_planar(ref, seq(frame_from_float(eq))).score
    plain_pole = psnr_planar(ref, seq(frame_from_float(pole))).score
    assert plain_eq == plain_pole
    assert r_eq.score < r_pole.score


def test_psnr_variants_agree_on_constant_error(rng):
    ref = textured_frame(rng, 64, 32)
    dist = frame_from_float(ref.y.astype(float) + 5.0, ref.u.astype(float) - 3.0, ref.v.astype(float) + 2.0)
    plain = psnr_planar(seq(ref), seq(dist)).features
    for r in (ws_psnr(seq(ref), seq(dist)), s_psnr(seq(ref), seq(dist), SMALL_SPHERE), cpp_psnr(seq(ref), seq(dist))):
        np.testing.assert_allclose(r.features, plain, atol=0.05)


def test_s_psnr_close_to_ws_on_smooth_field(rng):
    w, h = 256, 128
    ref = textured_frame(rng, w, h)
    jj, ii = np.mgrid[0:h, 0:w]
    field = 6.0 * np.sin(2 * np.pi * ii / w) * np.cos(np.pi * (jj + 0.5) / h - np.pi / 2) + 3.0
    dist = frame_from_float(ref.y.astype(float) + field, ref.u.astype(float), ref.v.astype(float))
    a = ws_psnr(seq(ref), seq(dist)).score
    b = s_psnr(seq(ref), seq(dist)).score
    assert abs(a - b) < 1.0


def test_ssim_identity_and_constants(pair):
    ref, dist = pair
    r = ssim(seq(ref), seq(ref))
    assert r.score == 1.0 and r.features.tolist() == [1.0, 1.0]
    a, b = VideoFrame.constant(32, 32, y=100), VideoFrame.constant(32, 32, y=110)
    r = ssim(seq(a), seq(b))
    l_expected = (2 * 100 * 110 + C1) / (100**2 + 110**2 + C1)
    assert r.features[1] == pytest.approx(1.0, abs=1e-12)
    assert r.features[0] == pytest.approx(l_expected, abs=1e-12)
    s = ssim(seq(ref), seq(dist)).score
    assert -1.0 <= s < 1.0


def test_ms_ssim(rng):
    ref = textured_frame(rng, 192, 192)
    r = ms_ssim(seq(ref), seq(ref))
    assert r.score == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(r.features, 1.0, atol=1e-12)
    assert sum(MS_SSIM_WEIGHTS) == pytest.approx(1.0001, abs=1e-12)
    small = textured_frame(rng, 160, 160)
    with pytest.raises(VideoMetricError):
        ms_ssim(seq(small), seq(small))
    d = ms_ssim(seq(ref), seq(noisy(ref, 10, rng))).score
    assert 0 < d < 1


def test_vifp(rng, pair):
    ref, dist = pair
    r = vifp(seq(ref), seq(ref))
    # the noise-variance floor keeps identity within 1e-10 rather than exact
    assert r.score == pytest.approx(1.0, abs=1e-9)
    np.testing.assert_allclose(r.features, 1.0, atol=1e-9)
    strong = vifp(seq(ref), seq(noisy(ref, 40, rng))).score
    assert 0 <= strong < 1.0
    y = ref.y.astype(float)
    enhanced = frame_from_float(y.mean() + 1.2 * (y - y.mean()), ref.u.astype(float), ref.v.astype(float))
    assert vifp(seq(ref), seq(enhanced)).score > 1.0


def test_fsim(rng, pair):
    ref, dist = pair
    r = fsim(seq(ref), seq(ref))
    assert r.score == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(r.features, 1.0, atol=1e-12)
    s = fsim(seq(ref), seq(dist)).score
    assert 0 < s <= 1
    # blur and noise tuned to roughly equal PSNR give different FSIM
    y = ref.y.astype(float)
    blurred = frame_from_float(ndimage.gaussian_filter(y, 1.0), ref.u.astype(float), ref.v.astype(float))
    mse_blur = np.mean((blurred.y.astype(float) - y) ** 2)
    noise = frame_from_float(y + np.sqrt(mse_blur) * rng.standard_normal(y.shape), ref.u.astype(float),
                             ref.v.astype(float))
    pb = psnr_planar(seq(ref), seq(blurred)).score
    pn = psnr_planar(seq(ref), seq(noise)).score
    assert abs(pb - pn) < 0.5
    assert abs(fsim(seq(ref), seq(blurred)).score - fsim(seq(ref), seq(noise)).score) > 1e-3


def test_gmsd(pair):
    ref, dist = pair
    r = gmsd(seq(ref), seq(ref))
    assert r.score == 0.0 and r.features.tolist() == [1.0, 0.0]
    d = gmsd(seq(ref), seq(dist)).score
    assert 0 < d < 0.26
    m = gms_map(ref.y.astype(float) / 255, dist.y.astype(float) / 255)
    assert np.all(m > 0) and np.all(m <= 1)


@pytest.mark.parametrize("metric", [ssim, fsim, gmsd])
def test_symmetric_metrics(metric, pair):
    ref, dist = pair
    a = metric(seq(ref), seq(dist))
    b = metric(seq(dist), seq(ref))
    assert abs(a.score - b.score) < 1e-9
    np.testing.assert_allclose(a.features, b.features, atol=1e-9)


def test_ms_ssim_symmetric(rng):
    ref = textured_frame(rng, 192, 192)
    dist = noisy(ref, 8, rng)
    assert abs(ms_ssim(seq(ref), seq(dist)).score - ms_ssim(seq(dist), seq(ref)).score) < 1e-9


@pytest.mark.parametrize("name", sorted(NATIVE_VIDEO_METRICS))
def test_pooling_and_arity(name, rng):
    size = (192, 192) if name == "ms-ssim" else (64, 32)
    metric = NATIVE_VIDEO_METRICS[name]
    if name == "s-psnr":
        def metric(a, b):
            return s_psnr(a, b, SMALL_SPHERE)
    refs = [textured_frame(rng, *size) for _ in range(3)]
    dists = [noisy(f, 3.0 + 2 * k, rng) for k, f in enumerate(refs)]
    whole = metric(seq(*refs), seq(*dists))
    singles = [metric(seq(r), seq(d)).score for r, d in zip(refs, dists)]
    assert whole.score == np.mean(singles)
    assert whole.features.shape == (VIDEO_MODELS[name].arity,)
    assert whole.per_frame_scores.shape == (3,)


def test_shared_errors(rng):
    a = textured_frame(rng, 64, 32)
    b = textured_frame(rng, 32, 32)
    with pytest.raises(VideoMetricError):
        ssim(seq(a), seq(b))
    with pytest.raises(VideoMetricError):
        ws_psnr(seq(a, a), seq(a))


def test_external_scores(tmp_path):
    p = tmp_path / "vmaf.csv"
    p.write_text("id,model,score,f1,f2,f3,f4,f5,f6\na,vmaf,80,1,2,3,4,5,6\nb,vmaf,,1,2,3,4,5,6\n")
    res = external_video_scores(p, "vmaf")
    assert res["a"].features.shape == (6,) and res["a"].score == 80
    assert np.isnan(res["b"].score)
    p.write_text("id,model,score,f1,f2,f3,f4,f5\na,vmaf,80,1,2,3,4,5\n")
    with pytest.raises(ArityError):
        external_video_scores(p, "vmaf")


def test_weights_helper_used_for_chroma():
    # chroma planes are weighted at their own resolution
    assert erp_weights(32, 16).weights.shape == (16, 32)

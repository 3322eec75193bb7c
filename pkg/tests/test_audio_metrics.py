import numpy as np
import pytest
from conftest import clip, mono, speech_like
from hypothesis import given, settings
from hypothesis import strategies as st

from oavqa.audio import (
    NATIVE_AUDIO_METRICS,
    AudioMetricError,
    channel_pairs,
    evaluate_clip,
    external_audio_scores,
    llr,
    reduce_channels,
    seg_snr,
    snr,
    stoi,
)
from oavqa.audio.llr import levinson, llr_frames
from oavqa.fusion import normalize
from oavqa.registry import AUDIO_MODELS
from oavqa.store import ArityError


def test_reduce_channels(rng):
    x = rng.standard_normal((4, 48000))
    c = clip(*x, fs=48000)
    p = reduce_channels(c, c)
    np.testing.assert_array_equal(p.reference, p.distorted)
    np.testing.assert_array_equal(p.reference, x[0])
    longer = clip(*np.hstack([x, np.zeros((4, 1))]), fs=48000)
    assert len(reduce_channels(c, longer).distorted) == 48000
    much_longer = clip(*np.hstack([x, np.zeros((4, 2000))]), fs=48000)
    with pytest.raises(AudioMetricError, match="length"):
        reduce_channels(c, much_longer)
    with pytest.raises(AudioMetricError, match="channel"):
        reduce_channels(c, clip(*x[:2], fs=48000))
    with pytest.raises(AudioMetricError, match="sample rate"):
        reduce_channels(c, clip(*x, fs=44100))


def test_snr_examples(speech_pair, rng):
    x, fs = speech_pair
    assert snr(mono(x, x, fs)).score == 60.0
    e = rng.standard_normal(len(x))
    e *= np.sqrt(np.sum(x * x) / (100 * np.sum(e * e)))
    assert snr(mono(x, x + e, fs)).score == pytest.approx(20.0, abs=1e-9)
    for g in (0.5, 0.9):
        assert snr(mono(x, g * x, fs)).score == pytest.approx(10 * np.log10(1 / (1 - g) ** 2), abs=1e-9)
    with pytest.raises(AudioMetricError):
        snr(mono(np.zeros(10), np.ones(10), fs))
    assert normalize(20.0, "snr") == 1.0


def test_seg_snr_examples(speech_pair):
    x, fs = speech_pair
    assert seg_snr(mono(x, x, fs)).score == 35.0
    assert seg_snr(mono(x, -x, fs)).score == pytest.approx(10 * np.log10(0.25), abs=1e-9)
    assert seg_snr(mono(x, -x, fs)).score == pytest.approx(-6.02, abs=5e-3)
    with pytest.raises(AudioMetricError):
        seg_snr(mono(np.zeros(fs), np.zeros(fs), fs))


def test_seg_snr_ignores_silence(speech_pair, rng):
    x, fs = speech_pair
    padded = np.concatenate([np.zeros(fs), x])
    noise = 1e-3 * rng.standard_normal(len(padded))
    r = seg_snr(mono(padded, padded + noise, fs))
    voiced_only = seg_snr(mono(x, x + noise[fs:], fs))
    assert r.score == pytest.approx(voiced_only.score, abs=0.5)
    assert r.score > 0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.0, 3.0))
def test_seg_snr_bounds(seed, level):
    g = np.random.default_rng(seed)
    fs = 8000
    x = g.standard_normal(fs)
    r = seg_snr(mono(x, x + level * g.standard_normal(fs), fs))
    assert np.all((r.per_segment >= -10) & (r.per_segment <= 35))
    assert -10 <= r.score <= 35


def test_llr(speech_pair, rng):
    x, fs = speech_pair
    r = llr(mono(x, x, fs))
    assert r.score == 0.0
    frames = llr_frames(mono(x, x + 0.05 * rng.standard_normal(len(x)), fs))
    assert frames.size > 0 and np.all(frames >= 0)
    assert llr(mono(x, x + 0.05 * rng.standard_normal(len(x)), fs)).score > 0


def test_levinson_matches_solve(rng):
    x = rng.standard_normal(400)
    r = np.array([np.dot(x[: len(x) - k], x[k:]) for k in range(11)])
    a = levinson(r, 10)
    from scipy.linalg import solve_toeplitz
    expected = np.concatenate([[1.0], -solve_toeplitz(r[:10], r[1:11])])
    np.testing.assert_allclose(a, expected, atol=1e-10)


def test_stoi(speech_pair, rng):
    x, fs = speech_pair
    assert stoi(mono(x, x, fs)).score == pytest.approx(1.0, abs=1e-6)
    d = x + 0.05 * rng.standard_normal(len(x))
    s1 = stoi(mono(x, d, fs)).score
    assert -1 <= s1 <= 1
    assert stoi(mono(x, 2 * d, fs)).score == pytest.approx(s1, abs=1e-6)
    g = np.random.default_rng(7)
    white = stoi(mono(g.standard_normal(fs), g.standard_normal(fs), fs)).score
    assert white < 0.2


def test_stoi_too_short():
    fs = 16000
    x = speech_like(np.random.default_rng(0), fs // 10, fs)
    with pytest.raises(AudioMetricError):
        stoi(mono(x, x, fs))


@pytest.mark.parametrize("name", sorted(NATIVE_AUDIO_METRICS))
def test_channel_average_and_arity(name, rng):
    fs = 16000
    chans = [speech_like(rng, fs, fs) for _ in range(4)]
    dist = [c + 0.02 * (k + 1) * rng.standard_normal(fs) for k, c in enumerate(chans)]
    res = evaluate_clip(NATIVE_AUDIO_METRICS[name], clip(*chans, fs=fs), clip(*dist, fs=fs))
    per = [NATIVE_AUDIO_METRICS[name](p).score for p in channel_pairs(clip(*chans, fs=fs), clip(*dist, fs=fs))]
    assert res.score == pytest.approx(np.mean(per), abs=1e-12)
    assert res.features.shape == (AUDIO_MODELS[name].arity,)
    again = evaluate_clip(NATIVE_AUDIO_METRICS[name], clip(*chans, fs=fs), clip(*dist, fs=fs))
    assert again.score == res.score


def test_external_audio(tmp_path):
    p = tmp_path / "peaq.csv"
    feats = ",".join(f"f{k}" for k in range(1, 12))
    p.write_text(f"id,model,score,{feats}\na,peaq,-0.21," + ",".join(["0"] * 11) + "\n")
    res = external_audio_scores(p, "peaq")
    assert res["a"].features.shape == (11,)
    assert normalize(res["a"].score, "peaq") == pytest.approx(0.88, abs=1e-12)
    q = tmp_path / "visqol.csv"
    q.write_text("id,model,score,f1,f2\na,visqol,4,1,2\n")
    with pytest.raises(ArityError):
        external_audio_scores(q, "visqol")

import math

import pytest

from oavqa.registry import ALL_MODELS, AUDIO_MODELS, VIDEO_MODELS, UnknownModelError, feature_arity, model_info
from oavqa.store import ArityError, ScoreRecord, ScoreStore, ScoreStoreError, read_score_csv, write_score_csv

ARITIES = {
    "vmaf": 6, "ws-psnr": 3, "s-psnr": 3, "cpp-psnr": 3, "ssim": 2, "ms-ssim": 6, "vifp": 4, "fsim": 3, "gmsd": 2,
    "peaq": 11, "stoi": 1, "visqol": 3, "llr": 1, "snr": 1, "segsnr": 1,
}


def test_registry_arities():
    assert {k: feature_arity(k) for k in ALL_MODELS} == ARITIES
    assert len(VIDEO_MODELS) == 9 and len(AUDIO_MODELS) == 6
    assert model_info("SSIM").name == "ssim"
    assert [m for m, i in ALL_MODELS.items() if not i.higher_is_better] == ["gmsd", "llr"]
    assert {m for m, i in ALL_MODELS.items() if not i.native} == {"vmaf", "peaq", "visqol"}
    with pytest.raises(UnknownModelError):
        model_info("nope")


def test_csv_roundtrip(tmp_path):
    recs = [ScoreRecord("a", "ssim", 0.9, (0.95, 0.9)), ScoreRecord("b", "ssim", math.nan, (0.5, 0.4))]
    p = tmp_path / "ssim.csv"
    write_score_csv(p, recs)
    back = read_score_csv(p)
    assert back["a"] == recs[0]
    assert math.isnan(back["b"].score) and back["b"].features == (0.5, 0.4)
    assert not list(tmp_path.glob("*.tmp"))


def test_csv_errors(tmp_path):
    p = tmp_path / "ssim.csv"
    p.write_text("id,model,score,f1\na,ssim,0.9,0.9\n")
    with pytest.raises(ArityError):
        read_score_csv(p)
    p.write_text("id,model,score,f1,f2\na,ssim,1,1,1\na,ssim,1,1,1\n")
    with pytest.raises(ScoreStoreError, match="duplicate"):
        read_score_csv(p)
    p.write_text("model,score\nssim,1\n")
    with pytest.raises(ScoreStoreError, match="id"):
        read_score_csv(p)


def test_store_load_skips_underscore(tmp_path):
    store = ScoreStore()
    store.add(ScoreRecord("a", "snr", 12.0, (12.0,)))
    store.add(ScoreRecord("b", "snr", 14.0, (14.0,)))
    store.save(tmp_path)
    (tmp_path / "_failures.csv").write_text("id,model,error\nc,snr,boom\n")
    back = ScoreStore.load(tmp_path, None)
    assert back.models() == ["snr"]
    assert back.scores("snr", ["b", "a"]).tolist() == [14.0, 12.0]
    assert back.features("snr", ["a"]).shape == (1, 1)
    assert back.has("snr", "a") and not back.has("snr", "c")
    with pytest.raises(ScoreStoreError):
        back.get("snr", "c")

from .common import (
    AudioMetricError,
    AudioQualityResult,
    MonoPair,
    channel_pairs,
    evaluate_clip,
    reduce_channels,
)
from .external import external_audio_scores
from .llr import llr
from .snr import seg_snr, snr
from .stoi import stoi

NATIVE_AUDIO_METRICS = {
    "stoi": stoi,
    "llr": llr,
    "snr": snr,
    "segsnr": seg_snr,
}

__all__ = [
    "AudioMetricError", "AudioQualityResult", "MonoPair", "channel_pairs", "evaluate_clip",
    "reduce_channels", "external_audio_scores", "llr", "seg_snr", "snr", "stoi", "NATIVE_AUDIO_METRICS",
]

"""Model registry: names, feature decompositions and quality direction of every single-mode model."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ModelInfo:
    name: str
    modality: str  # "video" | "audio"
    feature_names: tuple[str, ...]
    higher_is_better: bool = True
    native: bool = True

    @property
    def arity(self) -> int:
        return len(self.feature_names)

    def qualified_features(self) -> tuple[str, ...]:
        return tuple(f"{self.name}:{f}" for f in self.feature_names)


_YUV = ("psnr_y", "psnr_u", "psnr_v")

VIDEO_MODELS: dict[str, ModelInfo] = {
    m.name: m
    for m in (
        ModelInfo("vmaf", "video",
                  ("vif_scale0", "vif_scale1", "vif_scale2", "vif_scale3", "detail_loss", "motion"),
                  native=False),
        ModelInfo("ws-psnr", "video", _YUV),
        ModelInfo("s-psnr", "video", _YUV),
        ModelInfo("cpp-psnr", "video", _YUV),
        ModelInfo("ssim", "video", ("luminance", "contrast_structure")),
        ModelInfo("ms-ssim", "video", ("luminance", "cs1", "cs2", "cs3", "cs4", "cs5")),
        ModelInfo("vifp", "video", ("scale1", "scale2", "scale3", "scale4")),
        ModelInfo("fsim", "video", ("phase_congruency", "gradient_magnitude", "chrominance")),
        ModelInfo("gmsd", "video", ("gms_mean", "gms_std"), higher_is_better=False),
    )
}

AUDIO_MODELS: dict[str, ModelInfo] = {
    m.name: m
    for m in (
        ModelInfo("peaq", "audio",
                  ("BandwidthRefB", "BandwidthTestB", "TotalNMRB", "WinModDiff1B", "ADBB", "EHSB",
                   "AvgModDiff1B", "AvgModDiff2B", "RmsNoiseLoudB", "MFPDB", "RelDistFramesB"),
                  native=False),
        ModelInfo("stoi", "audio", ("stoi",)),
        ModelInfo("visqol", "audio", ("narrowband", "wideband", "fullband"), native=False),
        ModelInfo("llr", "audio", ("llr",), higher_is_better=False),
        ModelInfo("snr", "audio", ("snr",)),
        ModelInfo("segsnr", "audio", ("segsnr",)),
    )
}

ALL_MODELS: dict[str, ModelInfo] = {**VIDEO_MODELS, **AUDIO_MODELS}


class UnknownModelError(KeyError):
    pass


def model_info(name: str) -> ModelInfo:
    try:
        return ALL_MODELS[name.lower()]
    except KeyError:
        raise UnknownModelError(f"unknown model {name!r}") from None


def feature_arity(name: str) -> int:
    return model_info(name).arity

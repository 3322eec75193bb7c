"""Score normalisation to [0, 1] ahead of weighted-product fusion.

Every map is a min-max normalisation ``(q - lo) / (hi - lo)`` where ``lo`` is
the score mapped to 0 and ``hi`` the score mapped to 1, so lower-is-better
models simply have ``lo > hi``. LLR is applied to ``|q|``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..registry import UnknownModelError


@dataclass(frozen=True)
class NormalizationSpec:
    model_name: str
    lo: float = 0.0
    hi: float = 1.0
    use_abs: bool = False
    passthrough: bool = False

    @property
    def kind(self) -> str:
        if self.passthrough:
            return "passthrough"
        if self.use_abs:
            return "abs-affine"
        return "one-minus-affine" if self.lo > self.hi else "affine"

    def raw(self, score: float) -> float:
        """The unclamped map."""
        if self.passthrough:
            return float(score)
        q = abs(score) if self.use_abs else score
        if self.lo > self.hi:
            return 1.0 - (q - self.hi) / (self.lo - self.hi)
        return (q - self.lo) / (self.hi - self.lo)

    def __call__(self, score: float) -> float:
        return min(1.0, max(0.0, self.raw(score)))

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "NormalizationSpec":
        return cls(**d)


def _spec(name, lo=0.0, hi=1.0, use_abs=False, passthrough=False):
    return NormalizationSpec(name, lo, hi, use_abs, passthrough)


PUBLISHED_NORMALIZATION: dict[str, NormalizationSpec] = {
    "vmaf": _spec("vmaf", 0.0, 100.0),
    "ws-psnr": _spec("ws-psnr", 23.0, 52.0),
    "s-psnr": _spec("s-psnr", 23.0, 52.0),
    "cpp-psnr": _spec("cpp-psnr", 23.0, 52.0),
    "gmsd": _spec("gmsd", 0.26, 0.0),
    "peaq": _spec("peaq", 0.21 - 3.5, 0.21),
    "llr": _spec("llr", 1.2, 0.7, use_abs=True),
    "snr": _spec("snr", 0.0, 20.0),
    "segsnr": _spec("segsnr", -2.0, 35.0),
    **{m: _spec(m, passthrough=True) for m in ("ssim", "ms-ssim", "vifp", "fsim", "stoi", "visqol")},
}


def normalization_for(model_name: str) -> NormalizationSpec:
    try:
        return PUBLISHED_NORMALIZATION[model_name.lower()]
    except KeyError:
        raise UnknownModelError(f"no normalisation defined for {model_name!r}") from None


def normalize(score: float, spec: NormalizationSpec | str) -> float:
    if isinstance(spec, str):
        spec = normalization_for(spec)
    if not np.isfinite(score):
        raise ValueError(f"cannot normalise non-finite score {score!r}")
    return spec(score)


def minmax_spec(model_name: str, scores, higher_is_better: bool = True) -> NormalizationSpec:
    """Min-max spec fitted to observed scores, for models without a published map."""
    s = np.asarray(scores, dtype=np.float64)
    lo, hi = float(s.min()), float(s.max())
    if lo == hi:
        hi = lo + 1.0
    return _spec(model_name, lo, hi) if higher_is_better else _spec(model_name, hi, lo)

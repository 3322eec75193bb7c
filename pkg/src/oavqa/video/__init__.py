from .common import PSNR_CAP_DB, VideoMetricError, VideoQualityResult, as_sequence
from .external import external_video_scores
from .fsim import fsim
from .gmsd import gmsd
from .psnr import cpp_psnr, psnr_planar, s_psnr, ws_psnr
from .ssim import ms_ssim, ssim
from .vif import vifp

NATIVE_VIDEO_METRICS = {
    "ws-psnr": ws_psnr,
    "s-psnr": s_psnr,
    "cpp-psnr": cpp_psnr,
    "ssim": ssim,
    "ms-ssim": ms_ssim,
    "vifp": vifp,
    "fsim": fsim,
    "gmsd": gmsd,
}

__all__ = [
    "PSNR_CAP_DB", "VideoMetricError", "VideoQualityResult", "as_sequence", "external_video_scores",
    "fsim", "gmsd", "cpp_psnr", "psnr_planar", "s_psnr", "ws_psnr", "ms_ssim", "ssim", "vifp",
    "NATIVE_VIDEO_METRICS",
]

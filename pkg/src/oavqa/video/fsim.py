"""FSIM / FSIMc: phase congruency + gradient magnitude similarity, with a chroma term.

Phase congruency follows Kovesi's log-Gabor construction with the parameter set
used by the reference FSIM code (4 scales, 4 orientations, min wavelength 6,
scale factor 2, sigma_f 0.55, noise k = 2).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..media_io import VideoFrame, VideoSequence
from .common import VideoQualityResult, filter2, luma, pool_sequence, upsample_chroma

T1, T2, T3, T4 = 0.85, 160.0, 200.0, 200.0
CHROMA_EXPONENT = 0.03

N_SCALE = 4
N_ORIENT = 4
MIN_WAVELENGTH = 6.0
MULT = 2.0
SIGMA_ON_F = 0.55
D_THETA_ON_SIGMA = 1.2
NOISE_K = 2.0
PC_EPS = 1e-4

SCHARR_X = np.array([[3, 0, -3], [10, 0, -10], [3, 0, -3]], dtype=np.float64) / 16.0
SCHARR_Y = SCHARR_X.T.copy()


def _freq_range(n: int) -> np.ndarray:
    if n % 2:
        return np.arange(-(n - 1) / 2, (n - 1) / 2 + 1) / (n - 1)
    return np.arange(-n / 2, n / 2) / n


@lru_cache(maxsize=16)
def _filter_bank(rows: int, cols: int):
    x, y = np.meshgrid(_freq_range(cols), _freq_range(rows))
    radius = np.fft.ifftshift(np.sqrt(x ** 2 + y ** 2))
    theta = np.fft.ifftshift(np.arctan2(-y, x))
    radius[0, 0] = 1.0
    lowpass = 1.0 / (1.0 + (radius / 0.45) ** 30)

    log_gabor = []
    for s in range(N_SCALE):
        fo = 1.0 / (MIN_WAVELENGTH * MULT ** s)
        lg = np.exp(-(np.log(radius / fo) ** 2) / (2.0 * np.log(SIGMA_ON_F) ** 2)) * lowpass
        lg[0, 0] = 0.0
        log_gabor.append(lg)

    theta_sigma = np.pi / N_ORIENT / D_THETA_ON_SIGMA
    sin_t, cos_t = np.sin(theta), np.cos(theta)
    filters = []
    for o in range(N_ORIENT):
        angle = o * np.pi / N_ORIENT
        ds = sin_t * np.cos(angle) - cos_t * np.sin(angle)
        dc = cos_t * np.cos(angle) + sin_t * np.sin(angle)
        spread = np.exp(-(np.abs(np.arctan2(ds, dc)) ** 2) / (2.0 * theta_sigma ** 2))
        filters.append([lg * spread for lg in log_gabor])

    # noise statistics depend only on the filters
    noise_terms = []
    for o in range(N_ORIENT):
        spatial = [np.real(np.fft.ifft2(f)) * np.sqrt(rows * cols) for f in filters[o]]
        sum_an2 = sum(float(np.sum(sp ** 2)) for sp in spatial)
        sum_aiaj = sum(
            float(np.sum(spatial[i] * spatial[j]))
            for i in range(N_SCALE - 1) for j in range(i + 1, N_SCALE)
        )
        em_n = float(np.sum(filters[o][0] ** 2))
        noise_terms.append((em_n, sum_an2, sum_aiaj))
    return filters, noise_terms


def phase_congruency(img: np.ndarray) -> np.ndarray:
    rows, cols = img.shape
    filters, noise_terms = _filter_bank(rows, cols)
    spectrum = np.fft.fft2(img)
    energy_all = np.zeros((rows, cols))
    an_all = np.zeros((rows, cols))
    for o in range(N_ORIENT):
        eo = [np.fft.ifft2(spectrum * f) for f in filters[o]]
        sum_e = sum(np.real(c) for c in eo)
        sum_o = sum(np.imag(c) for c in eo)
        sum_an = sum(np.abs(c) for c in eo)
        x_energy = np.sqrt(sum_e ** 2 + sum_o ** 2) + PC_EPS
        mean_e, mean_o = sum_e / x_energy, sum_o / x_energy
        energy = np.zeros((rows, cols))
        for c in eo:
            e, od = np.real(c), np.imag(c)
            energy += e * mean_e + od * mean_o - np.abs(e * mean_o - od * mean_e)

        em_n, sum_an2, sum_aiaj = noise_terms[o]
        median_e2n = np.median(np.abs(eo[0]) ** 2)
        noise_power = (-median_e2n / np.log(0.5)) / em_n
        est_noise_energy2 = 2.0 * noise_power * sum_an2 + 4.0 * noise_power * sum_aiaj
        tau = np.sqrt(est_noise_energy2 / 2.0)
        threshold = (tau * np.sqrt(np.pi / 2.0) + NOISE_K * np.sqrt((2.0 - np.pi / 2.0) * tau ** 2)) / 1.7
        energy_all += np.maximum(energy - threshold, 0.0)
        an_all += sum_an
    return energy_all / an_all


def _gradient_magnitude(img: np.ndarray) -> np.ndarray:
    return np.hypot(filter2(img, SCHARR_X), filter2(img, SCHARR_Y))


def _prescale(planes: list[np.ndarray]) -> list[np.ndarray]:
    rows, cols = planes[0].shape
    f = max(1, int(round(min(rows, cols) / 256)))
    if f == 1:
        return planes
    box = np.full((f, f), 1.0 / (f * f))
    return [filter2(p, box)[::f, ::f] for p in planes]


def _fsim_planes(frame: VideoFrame) -> list[np.ndarray]:
    y = luma(frame)
    u = upsample_chroma(frame.u.astype(np.float64) - 128.0)
    v = upsample_chroma(frame.v.astype(np.float64) - 128.0)
    return _prescale([y, u, v])


def fsim_frame(ref: VideoFrame, dist: VideoFrame) -> tuple[float, list[float]]:
    y1, u1, v1 = _fsim_planes(ref)
    y2, u2, v2 = _fsim_planes(dist)
    pc1, pc2 = phase_congruency(y1), phase_congruency(y2)
    g1, g2 = _gradient_magnitude(y1), _gradient_magnitude(y2)

    s_pc = (2.0 * pc1 * pc2 + T1) / (pc1 * pc1 + pc2 * pc2 + T1)
    s_g = (2.0 * g1 * g2 + T2) / (g1 * g1 + g2 * g2 + T2)
    s_u = (2.0 * u1 * u2 + T3) / (u1 * u1 + u2 * u2 + T3)
    s_v = (2.0 * v1 * v2 + T4) / (v1 * v1 + v2 * v2 + T4)
    s_c = s_u * s_v
    pc_max = np.maximum(pc1, pc2)
    # s_c may dip below zero for opposite-signed chroma; a real fractional power needs >= 0
    chroma_term = np.maximum(s_c, 0.0) ** CHROMA_EXPONENT
    score = float(np.sum(s_g * s_pc * chroma_term * pc_max) / np.sum(pc_max))
    return score, [float(s_pc.mean()), float(s_g.mean()), float(s_c.mean())]


def fsim(ref: VideoSequence, dist: VideoSequence) -> VideoQualityResult:
    """FSIMc score; features are mean phase-congruency, gradient and chroma similarities."""
    return pool_sequence("fsim", fsim_frame, ref, dist)

"""Small synthetic audio-visual datasets with planted opinion scores.

Each distorted entry mixes three independent impairments: luma noise, a
brightness offset and audio noise. The planted quality depends on the two
noise levels only, so a brightness change hurts pixel metrics without hurting
the simulated viewers. Raters see that quality through a per-subject affine
response plus noise.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from .evaluation.mos import compute_mos
from .media_io import (
    AudioClip,
    DatasetManifest,
    ManifestEntry,
    RatingsMatrix,
    VideoFrame,
    write_manifest,
    write_wav,
    write_yuv_sequence,
)


@dataclass(frozen=True)
class SyntheticConfig:
    n_contents: int = 10
    n_distortions: int = 5
    width: int = 64
    height: int = 32
    frames: int = 2
    duration: float = 0.5
    sample_rate: int = 16000
    n_subjects: int = 12
    video_noise: tuple[float, float] = (1.0, 24.0)
    brightness: tuple[float, float] = (20.0, 50.0)
    audio_snr_db: tuple[float, float] = (0.0, 30.0)
    rater_noise: float = 2.0
    video_share: float = 0.5
    seed: int = 0


@dataclass(frozen=True)
class SyntheticEntry:
    id: str
    content_id: str
    video_noise: float
    brightness: float
    audio_snr_db: float
    quality: float  # planted, in [0, 1]


def _texture(rng: np.random.Generator, h: int, w: int, sigma: float) -> np.ndarray:
    img = ndimage.gaussian_filter(rng.standard_normal((h, w)), sigma, mode="wrap")
    img = (img - img.mean()) / (img.std() + 1e-12)
    return img


def content_frames(rng: np.random.Generator, cfg: SyntheticConfig) -> list[np.ndarray]:
    """Float luma/chroma planes for a reference clip, drifting slowly over time."""
    h, w = cfg.height, cfg.width
    base = 105.0 + 40.0 * rng.random()
    y = base + 16.0 * _texture(rng, h, w, 1.5) + 8.0 * _texture(rng, h, w, 4.0)
    u = 128.0 + 12.0 * _texture(rng, h // 2, w // 2, 2.0)
    v = 128.0 + 12.0 * _texture(rng, h // 2, w // 2, 2.0)
    out = []
    for t in range(cfg.frames):
        shift = t % w
        out.append([np.roll(y, shift, axis=1), np.roll(u, shift // 2, axis=1), np.roll(v, shift // 2, axis=1)])
    return out


def _to_frame(planes) -> VideoFrame:
    y, u, v = (np.clip(np.rint(p), 0, 255).astype(np.uint8) for p in planes)
    return VideoFrame(y, u, v)


def content_audio(rng: np.random.Generator, cfg: SyntheticConfig) -> np.ndarray:
    """Speech-like stereo signal: harmonic voice with a syllable-rate envelope."""
    n = int(round(cfg.duration * cfg.sample_rate))
    t = np.arange(n) / cfg.sample_rate
    f0 = 110.0 + 90.0 * rng.random()
    voice = sum(np.sin(2 * np.pi * k * f0 * t + rng.uniform(0, 2 * np.pi)) / k for k in range(1, 12))
    envelope = 0.55 + 0.45 * np.sin(2 * np.pi * rng.uniform(3.0, 6.0) * t)
    mono = voice * envelope
    mono = 0.3 * mono / np.max(np.abs(mono))
    return np.stack([mono, 0.8 * mono])


def planted_quality(video_noise: float, audio_snr_db: float, cfg: SyntheticConfig) -> float:
    lo, hi = cfg.video_noise
    qv = 1.0 - (video_noise - lo) / (hi - lo)
    alo, ahi = cfg.audio_snr_db
    qa = (audio_snr_db - alo) / (ahi - alo)
    return float(cfg.video_share * qv + (1.0 - cfg.video_share) * qa)


def simulate_ratings(qualities: np.ndarray, cfg: SyntheticConfig, rng: np.random.Generator) -> np.ndarray:
    """Integer 0-100 slider ratings: per-subject gain and bias, plus noise."""
    gain = rng.uniform(60.0, 90.0, size=(cfg.n_subjects, 1))
    bias = rng.uniform(5.0, 25.0, size=(cfg.n_subjects, 1))
    raw = bias + gain * qualities[None, :] + cfg.rater_noise * rng.standard_normal((cfg.n_subjects, qualities.size))
    return np.clip(np.rint(raw), 0, 100)


def write_ratings(path, ratings: RatingsMatrix) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["subject_id", "sequence_id", "rating"])
        for i, s in enumerate(ratings.subject_ids):
            for j, q in enumerate(ratings.sequence_ids):
                w.writerow([s, q, int(ratings.raw[i, j])])


def generate_dataset(root, cfg: SyntheticConfig | None = None) -> tuple[Path, list[SyntheticEntry]]:
    """Write media, ratings.csv and manifest.csv under ``root``; return the manifest path and ground truth."""
    cfg = cfg or SyntheticConfig()
    root = Path(root)
    (root / "video").mkdir(parents=True, exist_ok=True)
    (root / "audio").mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(cfg.seed)
    truth: list[SyntheticEntry] = []
    rows = []
    for c in range(cfg.n_contents):
        cid = f"c{c:02d}"
        planes = content_frames(rng, cfg)
        audio = content_audio(rng, cfg)
        ref_v = root / "video" / f"{cid}_ref.yuv"
        ref_a = root / "audio" / f"{cid}_ref.wav"
        write_yuv_sequence(ref_v, [_to_frame(p) for p in planes])
        write_wav(ref_a, AudioClip(audio, cfg.sample_rate))
        power = float(np.mean(audio**2))
        for d in range(cfg.n_distortions):
            eid = f"{cid}_d{d}"
            sv = rng.uniform(*cfg.video_noise)
            off = rng.uniform(*cfg.brightness) * rng.choice([-1.0, 1.0])
            snr_db = rng.uniform(*cfg.audio_snr_db)
            frames = []
            for y, u, v in planes:
                frames.append(_to_frame([y + off + sv * rng.standard_normal(y.shape), u, v]))
            noise = rng.standard_normal(audio.shape) * np.sqrt(power / 10 ** (snr_db / 10))
            dist_v = root / "video" / f"{eid}.yuv"
            dist_a = root / "audio" / f"{eid}.wav"
            write_yuv_sequence(dist_v, frames)
            write_wav(dist_a, AudioClip(np.clip(audio + noise, -1.0, 1.0), cfg.sample_rate))
            truth.append(SyntheticEntry(eid, cid, sv, off, snr_db, planted_quality(sv, snr_db, cfg)))
            rows.append((eid, cid, ref_v, dist_v, ref_a, dist_a, f"noise{sv:.1f}_off{off:+.0f}_snr{snr_db:.0f}"))

    qualities = np.array([t.quality for t in truth])
    ratings = RatingsMatrix(
        simulate_ratings(qualities, cfg, rng),
        tuple(f"s{i:02d}" for i in range(cfg.n_subjects)),
        tuple(t.id for t in truth),
    )
    write_ratings(root / "ratings.csv", ratings)
    mos = compute_mos(ratings).as_dict()
    entries = [
        ManifestEntry(eid, cid, rv, dv, ra, da, label, float(np.clip(mos[eid], 0.0, 100.0)), cfg.width, cfg.height)
        for eid, cid, rv, dv, ra, da, label in rows
    ]
    path = root / "manifest.csv"
    write_manifest(path, DatasetManifest(entries))
    return path, truth

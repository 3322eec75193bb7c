import numpy as np
import pytest
from scipy import ndimage

from oavqa.audio import MonoPair
from oavqa.media_io import AudioClip, VideoFrame, VideoSequence


def textured_frame(rng, width, height, mean=110.0, amp=30.0):
    y = mean + amp * ndimage.gaussian_filter(rng.standard_normal((height, width)), 1.5, mode="wrap") * 3.0
    u = 128.0 + 10.0 * ndimage.gaussian_filter(rng.standard_normal((height // 2, width // 2)), 1.0, mode="wrap")
    v = 128.0 + 10.0 * ndimage.gaussian_filter(rng.standard_normal((height // 2, width // 2)), 1.0, mode="wrap")
    return frame_from_float(y, u, v)


def frame_from_float(y, u=None, v=None):
    h, w = y.shape
    u = np.full((h // 2, w // 2), 128.0) if u is None else u
    v = np.full((h // 2, w // 2), 128.0) if v is None else v
    return VideoFrame(*(np.clip(np.rint(p), 0, 255).astype(np.uint8) for p in (y, u, v)))


def noisy(frame, sigma, rng):
    y = frame.y.astype(np.float64) + sigma * rng.standard_normal(frame.y.shape)
    return frame_from_float(y, frame.u.astype(float), frame.v.astype(float))


def seq(*frames):
    return VideoSequence.from_frames(frames)


def speech_like(rng, n, fs):
    t = np.arange(n) / fs
    f0 = 120.0 + 60.0 * rng.random()
    voice = sum(np.sin(2 * np.pi * k * f0 * t + rng.uniform(0, 6.28)) / k for k in range(1, 10))
    env = 0.55 + 0.45 * np.sin(2 * np.pi * 4.0 * t)
    x = voice * env
    return 0.3 * x / np.max(np.abs(x))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def speech_pair(rng):
    fs = 16000
    x = speech_like(rng, fs, fs)
    return x, fs


def mono(ref, dist, fs):
    return MonoPair(np.asarray(ref, dtype=np.float64), np.asarray(dist, dtype=np.float64), fs)


def clip(*channels, fs=16000):
    return AudioClip(np.stack([np.asarray(c, dtype=np.float64) for c in channels]), fs)


ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")

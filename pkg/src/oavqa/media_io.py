"""Raw media ingestion: planar I420 video, PCM WAV audio, dataset manifests and ratings."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.io import wavfile


class MediaError(ValueError):
    """Base class for ingestion failures."""


class SizeMismatchError(MediaError):
    pass


class DimensionError(MediaError):
    pass


class UnsupportedFormatError(MediaError):
    pass


class MalformedHeaderError(MediaError):
    pass


class ManifestError(MediaError):
    pass


@dataclass(frozen=True)
class VideoFrame:
    """One 8-bit 4:2:0 frame stored as three uint8 planes."""

    y: np.ndarray
    u: np.ndarray
    v: np.ndarray
    bit_depth: int = 8

    def __post_init__(self):
        if self.bit_depth != 8:
            raise UnsupportedFormatError(f"only 8-bit video is supported, got {self.bit_depth}")
        h, w = self.y.shape
        if w % 2 or h % 2:
            raise DimensionError(f"frame dimensions must be even, got {w}x{h}")
        if self.u.shape != (h // 2, w // 2) or self.v.shape != (h // 2, w // 2):
            raise DimensionError(
                f"chroma planes {self.u.shape}/{self.v.shape} do not match luma {self.y.shape}"
            )
        for plane in (self.y, self.u, self.v):
            if plane.dtype != np.uint8:
                raise UnsupportedFormatError(f"planes must be uint8, got {plane.dtype}")

    @property
    def width(self) -> int:
        return self.y.shape[1]

    @property
    def height(self) -> int:
        return self.y.shape[0]

    @property
    def planes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.y, self.u, self.v

    @classmethod
    def from_bytes(cls, buf: bytes, width: int, height: int) -> "VideoFrame":
        _check_dims(width, height)
        n_y = width * height
        n_c = n_y // 4
        if len(buf) != n_y + 2 * n_c:
            raise SizeMismatchError(f"expected {n_y + 2 * n_c} bytes, got {len(buf)}")
        data = np.frombuffer(buf, dtype=np.uint8)
        y = data[:n_y].reshape(height, width)
        u = data[n_y:n_y + n_c].reshape(height // 2, width // 2)
        v = data[n_y + n_c:].reshape(height // 2, width // 2)
        return cls(y, u, v)

    def to_bytes(self) -> bytes:
        return self.y.tobytes() + self.u.tobytes() + self.v.tobytes()

    @classmethod
    def constant(cls, width: int, height: int, y: int = 128, u: int = 128, v: int = 128) -> "VideoFrame":
        return cls(
            np.full((height, width), y, np.uint8),
            np.full((height // 2, width // 2), u, np.uint8),
            np.full((height // 2, width // 2), v, np.uint8),
        )


def frame_nbytes(width: int, height: int) -> int:
    return width * height * 3 // 2


def _check_dims(width: int, height: int) -> None:
    if width <= 0 or height <= 0:
        raise DimensionError(f"frame dimensions must be positive, got {width}x{height}")
    if width % 2 or height % 2:
        raise DimensionError(f"4:2:0 frames need even dimensions, got {width}x{height}")


class VideoSequence:
    """An ordered, re-iterable stream of frames.

    File-backed sequences read one frame at a time on each iteration, so an
    8K sequence never has to fit in memory.
    """

    def __init__(
        self,
        width: int,
        height: int,
        frame_count: int,
        frame_rate: float = 29.97,
        *,
        path: str | os.PathLike | None = None,
        frames: Sequence[VideoFrame] | None = None,
    ):
        if frame_count <= 0:
            raise MediaError("a sequence needs at least one frame")
        self.width = width
        self.height = height
        self.frame_count = frame_count
        self.frame_rate = frame_rate
        self._path = Path(path) if path is not None else None
        self._frames = list(frames) if frames is not None else None

    @classmethod
    def from_frames(cls, frames: Iterable[VideoFrame], frame_rate: float = 29.97) -> "VideoSequence":
        frames = list(frames)
        if not frames:
            raise MediaError("a sequence needs at least one frame")
        w, h = frames[0].width, frames[0].height
        for f in frames:
            if (f.width, f.height) != (w, h):
                raise DimensionError("all frames in a sequence must share dimensions")
        return cls(w, h, len(frames), frame_rate, frames=frames)

    @property
    def path(self) -> Path | None:
        return self._path

    def __len__(self) -> int:
        return self.frame_count

    def __iter__(self) -> Iterator[VideoFrame]:
        if self._frames is not None:
            yield from self._frames
            return
        size = frame_nbytes(self.width, self.height)
        with open(self._path, "rb") as fh:
            for _ in range(self.frame_count):
                buf = fh.read(size)
                if len(buf) != size:
                    raise SizeMismatchError(f"{self._path}: truncated frame")
                yield VideoFrame.from_bytes(buf, self.width, self.height)


def read_yuv_sequence(path, width: int, height: int, frame_rate: float = 29.97) -> VideoSequence:
    """Open a headerless I420 file as a lazily streamed sequence."""
    _check_dims(width, height)
    size = os.path.getsize(path)
    frame_size = frame_nbytes(width, height)
    if size == 0 or size % frame_size:
        raise SizeMismatchError(
            f"{path}: {size} bytes is not a positive multiple of the {width}x{height} frame size {frame_size}"
        )
    return VideoSequence(width, height, size // frame_size, frame_rate, path=path)


def write_yuv_sequence(path, frames: Iterable[VideoFrame]) -> int:
    n = 0
    with open(path, "wb") as fh:
        for frame in frames:
            fh.write(frame.to_bytes())
            n += 1
    return n


@dataclass(frozen=True)
class AudioClip:
    """Multichannel audio; ``samples`` has shape (channels, n) in [-1, 1]."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise MediaError(f"sample rate must be positive, got {self.sample_rate}")
        if self.samples.ndim != 2:
            raise MediaError("samples must be a (channels, n) array")

    @property
    def channels(self) -> int:
        return self.samples.shape[0]

    @property
    def num_samples(self) -> int:
        return self.samples.shape[1]

    def channel(self, k: int) -> np.ndarray:
        return self.samples[k]


def read_wav(path) -> AudioClip:
    """Read a 16-bit PCM or 32-bit float WAV file into an :class:`AudioClip`."""
    with open(path, "rb") as fh:
        head = fh.read(12)
    if len(head) < 12 or head[:4] != b"RIFF" or head[8:12] != b"WAVE":
        raise MalformedHeaderError(f"{path}: not a RIFF/WAVE file")
    try:
        rate, data = wavfile.read(path)
    except ValueError as exc:
        raise MalformedHeaderError(f"{path}: {exc}") from exc
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype == np.float32:
        samples = data.astype(np.float64)
    else:
        raise UnsupportedFormatError(f"{path}: unsupported sample format {data.dtype}")
    if samples.ndim == 1:
        samples = samples[:, None]
    return AudioClip(np.ascontiguousarray(samples.T), int(rate))


def write_wav(path, clip: AudioClip, pcm16: bool = True) -> None:
    data = clip.samples.T
    if pcm16:
        data = np.clip(np.round(data * 32768.0), -32768, 32767).astype(np.int16)
    else:
        data = data.astype(np.float32)
    wavfile.write(path, clip.sample_rate, data)


MANIFEST_COLUMNS = (
    "id", "content_id", "ref_video", "dist_video", "ref_audio", "dist_audio", "distortion_label", "mos",
)


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    content_id: str
    reference_video_path: Path
    distorted_video_path: Path
    reference_audio_path: Path
    distorted_audio_path: Path
    distortion_label: str
    mos: float | None = None
    width: int | None = None
    height: int | None = None


@dataclass
class DatasetManifest:
    entries: list[ManifestEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[ManifestEntry]:
        return iter(self.entries)

    @property
    def content_ids(self) -> list[str]:
        seen = dict.fromkeys(e.content_id for e in self.entries)
        return list(seen)

    def by_id(self) -> dict[str, ManifestEntry]:
        return {e.id: e for e in self.entries}

    def by_content(self) -> dict[str, list[ManifestEntry]]:
        groups: dict[str, list[ManifestEntry]] = {}
        for e in self.entries:
            groups.setdefault(e.content_id, []).append(e)
        return groups


def load_manifest(path, validate_paths: bool = False) -> DatasetManifest:
    """Parse a manifest CSV.

    Relative media paths resolve against the manifest's directory. Optional
    ``width``/``height`` columns give the raw YUV frame size per entry.
    """
    path = Path(path)
    base = path.parent
    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ManifestError(f"{path}: missing header row")
        missing = [c for c in MANIFEST_COLUMNS if c not in reader.fieldnames]
        if missing:
            raise ManifestError(f"{path}: missing column(s) {', '.join(missing)}")
        for lineno, row in enumerate(reader, start=2):
            eid = row["id"].strip()
            if eid in seen:
                raise ManifestError(f"{path}:{lineno}: duplicate id {eid!r}")
            seen.add(eid)
            mos = row["mos"].strip() if row["mos"] is not None else ""
            mos_val = float(mos) if mos else None
            if mos_val is not None and not 0.0 <= mos_val <= 100.0:
                raise ManifestError(f"{path}:{lineno}: mos {mos_val} outside [0, 100]")
            width = row.get("width") or None
            height = row.get("height") or None
            entry = ManifestEntry(
                id=eid,
                content_id=row["content_id"].strip(),
                reference_video_path=base / row["ref_video"].strip(),
                distorted_video_path=base / row["dist_video"].strip(),
                reference_audio_path=base / row["ref_audio"].strip(),
                distorted_audio_path=base / row["dist_audio"].strip(),
                distortion_label=row["distortion_label"].strip(),
                mos=mos_val,
                width=int(width) if width else None,
                height=int(height) if height else None,
            )
            if validate_paths:
                for p in (entry.reference_video_path, entry.distorted_video_path,
                          entry.reference_audio_path, entry.distorted_audio_path):
                    if not p.exists():
                        raise ManifestError(f"{path}:{lineno}: cannot resolve {p}")
            entries.append(entry)
    return DatasetManifest(entries)


def write_manifest(path, manifest: DatasetManifest) -> None:
    path = Path(path)
    base = path.parent
    with_dims = any(e.width is not None for e in manifest)
    cols = list(MANIFEST_COLUMNS) + (["width", "height"] if with_dims else [])

    def rel(p: Path) -> str:
        try:
            return str(Path(p).relative_to(base))
        except ValueError:
            return str(p)

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        for e in manifest:
            row = [
                e.id, e.content_id, rel(e.reference_video_path), rel(e.distorted_video_path),
                rel(e.reference_audio_path), rel(e.distorted_audio_path), e.distortion_label,
                "" if e.mos is None else repr(e.mos),
            ]
            if with_dims:
                row += ["" if e.width is None else e.width, "" if e.height is None else e.height]
            writer.writerow(row)


@dataclass(frozen=True)
class RatingsMatrix:
    """Raw subject x sequence ratings."""

    raw: np.ndarray
    subject_ids: tuple[str, ...]
    sequence_ids: tuple[str, ...]

    def __post_init__(self):
        raw = np.asarray(self.raw, dtype=np.float64)
        object.__setattr__(self, "raw", raw)
        if raw.shape != (len(self.subject_ids), len(self.sequence_ids)):
            raise MediaError("ratings shape does not match subject/sequence ids")
        if raw.shape[0] < 2:
            raise MediaError("at least two subjects are needed")
        if np.isnan(raw).any():
            raise MediaError("ratings matrix has missing cells")


def read_ratings(path) -> RatingsMatrix:
    """Read a long-format ``subject_id,sequence_id,rating`` CSV."""
    cells: dict[tuple[str, str], float] = {}
    subjects: dict[str, None] = {}
    sequences: dict[str, None] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for col in ("subject_id", "sequence_id", "rating"):
            if reader.fieldnames is None or col not in reader.fieldnames:
                raise ManifestError(f"{path}: missing column {col}")
        for row in reader:
            key = (row["subject_id"].strip(), row["sequence_id"].strip())
            if key in cells:
                raise ManifestError(f"{path}: duplicate rating for {key}")
            cells[key] = float(row["rating"])
            subjects[key[0]] = None
            sequences[key[1]] = None
    subj, seqs = tuple(subjects), tuple(sequences)
    raw = np.full((len(subj), len(seqs)), np.nan)
    si = {s: i for i, s in enumerate(subj)}
    qi = {s: j for j, s in enumerate(seqs)}
    for (s, q), r in cells.items():
        raw[si[s], qi[q]] = r
    return RatingsMatrix(raw, subj, seqs)

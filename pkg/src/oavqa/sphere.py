"""Spherical geometry for ERP frames: latitude weights, uniform sphere samples, Craster remap.

Coordinate convention: a continuous ERP position (u, v) lies in [0, W) x [0, H),
pixel (i, j) has its centre at (i + 0.5, j + 0.5). Longitude runs from -pi at
u = 0 to +pi at u = W, latitude from +pi/2 at v = 0 to -pi/2 at v = H.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

DEFAULT_SPHERE_POINTS = 655_362
GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))

# Craster parabolic: x = sqrt(3/pi) * lon * (2 cos(2 lat / 3) - 1), y = sqrt(3 pi) * sin(lat / 3)
_CPP_XMAX = np.sqrt(3.0 * np.pi)
_CPP_YMAX = np.sqrt(3.0 * np.pi) / 2.0


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class WeightMap:
    weights: np.ndarray

    @property
    def width(self) -> int:
        return self.weights.shape[1]

    @property
    def height(self) -> int:
        return self.weights.shape[0]


@lru_cache(maxsize=32)
def _erp_weights_cached(width: int, height: int) -> WeightMap:
    j = np.arange(height, dtype=np.float64)
    row = np.cos((j + 0.5 - height / 2.0) * np.pi / height)
    w = np.broadcast_to(row[:, None], (height, width))
    w.flags.writeable = False
    return WeightMap(w)


def erp_weights(width: int, height: int) -> WeightMap:
    """Cosine-latitude weights for an ERP plane; depends on row only."""
    if width < 1 or height < 1:
        raise GeometryError(f"zero dimension: {width}x{height}")
    return _erp_weights_cached(int(width), int(height))


def lonlat_to_xyz(lon, lat) -> np.ndarray:
    lon = np.asarray(lon, dtype=np.float64)
    lat = np.asarray(lat, dtype=np.float64)
    c = np.cos(lat)
    return np.stack([c * np.cos(lon), c * np.sin(lon), np.sin(lat)], axis=-1)


def xyz_to_lonlat(points) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(points, dtype=np.float64)
    lon = np.arctan2(p[..., 1], p[..., 0])
    lat = np.arcsin(np.clip(p[..., 2] / np.linalg.norm(p, axis=-1), -1.0, 1.0))
    return lon, lat


def lonlat_to_erp(lon, lat, width: int, height: int) -> tuple[np.ndarray, np.ndarray]:
    u = (np.asarray(lon) / (2.0 * np.pi) + 0.5) * width
    v = (0.5 - np.asarray(lat) / np.pi) * height
    return np.mod(u, width), v


def erp_to_lonlat(u, v, width: int, height: int) -> tuple[np.ndarray, np.ndarray]:
    lon = (np.asarray(u, dtype=np.float64) / width - 0.5) * 2.0 * np.pi
    lat = (0.5 - np.asarray(v, dtype=np.float64) / height) * np.pi
    return lon, lat


@dataclass(frozen=True)
class SphereSampleSet:
    points: np.ndarray  # (N, 3) unit vectors

    def __len__(self) -> int:
        return self.points.shape[0]

    def erp_coords(self, width: int, height: int) -> tuple[np.ndarray, np.ndarray]:
        lon, lat = xyz_to_lonlat(self.points)
        return lonlat_to_erp(lon, lat, width, height)


@lru_cache(maxsize=8)
def _fibonacci(count: int) -> SphereSampleSet:
    k = np.arange(count, dtype=np.float64)
    z = 1.0 - (2.0 * k + 1.0) / count
    lat = np.arcsin(z)
    lon = np.mod(k * GOLDEN_ANGLE + np.pi, 2.0 * np.pi) - np.pi
    pts = lonlat_to_xyz(lon, lat)
    pts.flags.writeable = False
    return SphereSampleSet(pts)


def sphere_samples(count: int = DEFAULT_SPHERE_POINTS) -> SphereSampleSet:
    """Spherical Fibonacci lattice with ``count`` points."""
    if count < 12:
        raise GeometryError(f"need at least 12 sphere points, got {count}")
    return _fibonacci(int(count))


def load_sphere_points(path) -> SphereSampleSet:
    """Load an ``x y z`` per-line point file; vectors are renormalised."""
    pts = np.loadtxt(path, dtype=np.float64, ndmin=2)
    if pts.shape[1] != 3:
        raise GeometryError(f"{path}: expected 3 columns, got {pts.shape[1]}")
    norms = np.linalg.norm(pts, axis=1)
    if np.any(norms == 0):
        raise GeometryError(f"{path}: zero vector in point file")
    if pts.shape[0] < 12:
        raise GeometryError(f"{path}: need at least 12 points")
    return SphereSampleSet(pts / norms[:, None])


def bilinear_sample(plane: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Sample an ERP plane at continuous (u, v); wraps in longitude, clamps in latitude."""
    h, w = plane.shape
    x = np.asarray(u, dtype=np.float64) - 0.5
    y = np.clip(np.asarray(v, dtype=np.float64) - 0.5, 0.0, h - 1.0)
    x0 = np.floor(x)
    y0 = np.minimum(np.floor(y), max(h - 2, 0))
    fx = x - x0
    fy = y - y0
    x0 = x0.astype(np.intp) % w
    x1 = (x0 + 1) % w
    y0 = y0.astype(np.intp)
    y1 = np.minimum(y0 + 1, h - 1)
    p = plane.astype(np.float64, copy=False)
    top = p[y0, x0] * (1.0 - fx) + p[y0, x1] * fx
    bot = p[y1, x0] * (1.0 - fx) + p[y1, x1] * fx
    return top * (1.0 - fy) + bot * fy


@dataclass(frozen=True)
class CppGrid:
    """Craster parabolic target grid with source ERP lookups for the valid pixels."""

    width: int
    height: int
    mask: np.ndarray  # (height, width) bool, pixels inside the parabolic outline
    src_u: np.ndarray  # source ERP coordinates of the valid pixels, in mask order
    src_v: np.ndarray

    @property
    def area_fraction(self) -> float:
        return float(self.mask.mean())


@lru_cache(maxsize=32)
def _cpp_grid_cached(width: int, height: int) -> CppGrid:
    x = ((np.arange(width) + 0.5) / width - 0.5) * 2.0 * _CPP_XMAX
    y = (0.5 - (np.arange(height) + 0.5) / height) * 2.0 * _CPP_YMAX
    xx, yy = np.meshgrid(x, y)
    lat = 3.0 * np.arcsin(yy / _CPP_XMAX)
    lon = np.sqrt(np.pi / 3.0) * xx / (2.0 * np.cos(2.0 * lat / 3.0) - 1.0)
    mask = np.abs(lon) <= np.pi
    u, v = lonlat_to_erp(lon[mask], lat[mask], width, height)
    for arr in (mask, u, v):
        arr.flags.writeable = False
    return CppGrid(width, height, mask, u, v)


def cpp_grid(width: int, height: int) -> CppGrid:
    """Craster parabolic grid matching an ERP plane of the given size."""
    if width < 1 or height < 1:
        raise GeometryError(f"zero dimension: {width}x{height}")
    return _cpp_grid_cached(int(width), int(height))


def cpp_resample(plane: np.ndarray, grid: CppGrid) -> tuple[np.ndarray, np.ndarray]:
    """Remap one ERP plane onto the Craster grid.

    Returns the (height, width) float plane, zero outside the outline, and the
    validity mask. Accepts a bare plane or a :class:`~oavqa.media_io.VideoFrame`
    (its luma is used).
    """
    plane = getattr(plane, "y", plane)
    if plane.shape != (grid.height, grid.width):
        raise GeometryError(f"plane {plane.shape} does not match grid {(grid.height, grid.width)}")
    out = np.zeros((grid.height, grid.width), dtype=np.float64)
    out[grid.mask] = bilinear_sample(plane, grid.src_u, grid.src_v)
    return out, grid.mask

"""Deterministic synthetic test images.

Stand-ins for the classic photographic test set: a smooth portrait-like
image, a high-contrast figure on a gradient, an architectural scene of
straight edges, and a piecewise-planar depth map.  Every generator
quantises to integers in [0, 255], so PNM round-trips are exact, and all
randomness is seeded, so regeneration is byte-identical.
"""

from __future__ import annotations

import numpy as np
from scipy.ndimage import gaussian_filter

from .image import PixelGrid


def _coords(size):
    y, x = np.mgrid[0:size, 0:size].astype(float)
    return x / (size - 1), y / (size - 1)


def _finish(img) -> np.ndarray:
    lo, hi = img.min(), img.max()
    scaled = (img - lo) / (hi - lo) * 255.0
    return np.floor(scaled + 0.5)


def portrait(size: int = 64) -> PixelGrid:
    """Smooth blobs with one sharp disk edge and mild texture (trui-like)."""
    x, y = _coords(size)
    rng = np.random.default_rng(2024)
    img = 110 + 90 * np.exp(-((x - 0.42) ** 2 + (y - 0.38) ** 2) / 0.045)
    img -= 70 * np.exp(-((x - 0.6) ** 2 + (y - 0.72) ** 2) / 0.09)
    disk = (x - 0.68) ** 2 + (y - 0.3) ** 2 < 0.02
    img[disk] = 225.0
    img += gaussian_filter(rng.normal(0, 22, (size, size)), 2.0)
    img = gaussian_filter(img, 0.6)
    return PixelGrid.from_planes(size, size, _finish(img).reshape(-1))


def figure(size: int = 64) -> PixelGrid:
    """Dark silhouette over a sky gradient plus fine ground texture."""
    x, y = _coords(size)
    rng = np.random.default_rng(777)
    img = 210 - 120 * y
    body = (np.abs(x - 0.45) < 0.10) & (y > 0.32) & (y < 0.85)
    head = (x - 0.45) ** 2 + (y - 0.25) ** 2 < 0.008
    pole = (np.abs(x - 0.7) < 0.015) & (y > 0.2)
    img[body | head | pole] = 25.0
    ground = y > 0.85
    texture = gaussian_filter(rng.normal(0, 45, (size, size)), 0.8)
    img[ground] = 120 + texture[ground]
    img = gaussian_filter(img, 0.5)
    return PixelGrid.from_planes(size, size, _finish(img).reshape(-1))


def rooms(size: int = 64) -> PixelGrid:
    """Rectangles, a roof diagonal, and flat walls (house-like)."""
    x, y = _coords(size)
    rng = np.random.default_rng(31)
    img = 190 - 60 * y
    wall = (x > 0.2) & (x < 0.8) & (y > 0.45) & (y < 0.95)
    img[wall] = 150.0
    roof = (y > 0.25) & (y < 0.45) & (np.abs(x - 0.5) < (y - 0.25) * 1.5)
    img[roof] = 70.0
    window = (x > 0.3) & (x < 0.42) & (y > 0.55) & (y < 0.7)
    door = (x > 0.55) & (x < 0.68) & (y > 0.65) & (y < 0.95)
    img[window] = 35.0
    img[door] = 90.0
    img += gaussian_filter(rng.normal(0, 10, (size, size)), 1.2)
    img = gaussian_filter(img, 0.5)
    return PixelGrid.from_planes(size, size, _finish(img).reshape(-1))


def depth(size: int = 64) -> PixelGrid:
    """Piecewise-planar ramps with step discontinuities (depth-map-like)."""
    x, y = _coords(size)
    img = 40 + 140 * x
    near = (x > 0.15) & (x < 0.5) & (y > 0.3) & (y < 0.9)
    img[near] = 220 - 60 * y[near]
    mid = (x > 0.6) & (x < 0.85) & (y > 0.1) & (y < 0.6)
    img[mid] = 150 - 40 * x[mid] + 20 * y[mid]
    return PixelGrid.from_planes(size, size, _finish(img).reshape(-1))


CORPUS = {
    "portrait": portrait,
    "figure": figure,
    "rooms": rooms,
    "depth": depth,
}


def write_corpus(directory, size: int = 64) -> list:
    """Write every corpus image as a PGM file; returns the paths."""
    import os

    from .image import write_pnm

    os.makedirs(directory, exist_ok=True)
    paths = []
    for name, make in CORPUS.items():
        path = os.path.join(directory, f"{name}.pgm")
        write_pnm(make(size), path)
        paths.append(path)
    return paths

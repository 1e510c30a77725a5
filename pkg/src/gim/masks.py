"""Per-feature inpainting masks, their stored values, and text serialization.

A mask set holds one boolean raster per feature type.  The stored values
vector is feature-major: entry i*N + j belongs to feature i at pixel j,
and is exactly zero wherever the mask bit is off.

Mask file format (UTF-8 text)::

    GIM1 <width> <height> <channels> <m> <kind,kind,...>
    <feature-id> <x> <y> <v1> [<v2> <v3>]
    ...
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, MaskFileError
from .operators import FeatureKind, GridGeometry, stacked_apply


@dataclass
class MaskSet:
    """Boolean mask rasters, one per feature in an ordered catalogue."""

    geom: GridGeometry
    catalogue: tuple
    grids: np.ndarray = field(repr=False)  # bool, shape (m, N)

    def __post_init__(self):
        self.catalogue = tuple(self.catalogue)
        if not self.catalogue:
            raise ValueError("catalogue must not be empty")
        grids = np.asarray(self.grids, dtype=bool)
        expect = (len(self.catalogue), self.geom.pixel_count)
        if grids.shape != expect:
            raise DimensionMismatchError(f"grids shape {grids.shape}, expected {expect}")
        self.grids = grids

    @classmethod
    def empty(cls, geom: GridGeometry, catalogue) -> "MaskSet":
        catalogue = tuple(catalogue)
        return cls(geom, catalogue, np.zeros((len(catalogue), geom.pixel_count), bool))

    @property
    def total_points(self) -> int:
        return int(self.grids.sum())

    @property
    def density(self) -> float:
        """Total stored points over pixel count; all feature types share one budget."""
        return self.total_points / self.geom.pixel_count

    def points_per_feature(self) -> tuple:
        return tuple(int(g.sum()) for g in self.grids)

    def has_point(self, feature: int, pixel: int) -> bool:
        return bool(self.grids[feature, pixel])

    def add_point(self, feature: int, pixel: int) -> None:
        """Set a (feature, pixel) slot; at most one point per slot."""
        if self.grids[feature, pixel]:
            raise ValueError(f"slot (feature {feature}, pixel {pixel}) already occupied")
        self.grids[feature, pixel] = True

    def points(self):
        """All (feature, pixel) points, feature-major, pixel ascending."""
        for i in range(len(self.catalogue)):
            for j in np.flatnonzero(self.grids[i]):
                yield i, int(j)

    def sites(self) -> np.ndarray:
        """(S, 3) int array of (feature, x, y) rows in canonical point order."""
        w = self.geom.width
        rows = [
            (i, j % w, j // w)
            for i in range(len(self.catalogue))
            for j in np.flatnonzero(self.grids[i])
        ]
        return np.asarray(rows, dtype=np.int64).reshape(-1, 3)

    def support(self) -> np.ndarray:
        """Flat (m*N,) boolean support of the stored-values vector."""
        return self.grids.reshape(-1).copy()

    def copy(self) -> "MaskSet":
        return MaskSet(self.geom, self.catalogue, self.grids.copy())


def extract_feature_values(masks: MaskSet, f: np.ndarray) -> np.ndarray:
    """Stored values that interpolate the image: the masked features of f.

    Returns the feature-major (m*N,) vector; zero off the mask support.
    """
    return stacked_apply(masks, f)


def mask_density(masks: MaskSet) -> float:
    return masks.density


def validate_support(masks: MaskSet, values: np.ndarray) -> None:
    """Raise if the values vector is nonzero anywhere off the mask support."""
    values = np.asarray(values, dtype=np.float64)
    m_n = len(masks.catalogue) * masks.geom.pixel_count
    flat = values.reshape(-1, m_n)
    off = ~masks.support()
    if np.any(flat[:, off] != 0.0):
        raise ValueError("stored values must be zero off the mask support")


def save_masks(masks: MaskSet, values: np.ndarray, path) -> None:
    """Write masks and per-channel stored values as text; lossless round-trip.

    ``values`` has shape (channels, m*N) (a single (m*N,) vector is treated
    as one channel).
    """
    values = np.asarray(values, dtype=np.float64)
    if values.ndim == 1:
        values = values[None, :]
    channels, m_n = values.shape
    n = masks.geom.pixel_count
    m = len(masks.catalogue)
    if m_n != m * n:
        raise DimensionMismatchError(f"values length {m_n}, expected {m * n}")
    kinds = ",".join(k.value for k in masks.catalogue)
    lines = [f"GIM1 {masks.geom.width} {masks.geom.height} {channels} {m} {kinds}"]
    w = masks.geom.width
    for i, j in masks.points():
        vals = " ".join(repr(float(values[c, i * n + j])) for c in range(channels))
        lines.append(f"{i} {j % w} {j // w} {vals}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_masks(path) -> tuple:
    """Read a mask file; returns (MaskSet, values of shape (channels, m*N))."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise MaskFileError(1, "empty file")
    header = lines[0].split()
    if len(header) != 6 or header[0] != "GIM1":
        raise MaskFileError(1, f"bad header {lines[0]!r}")
    try:
        width, height, channels, m = (int(t) for t in header[1:5])
    except ValueError:
        raise MaskFileError(1, "header fields must be integers") from None
    try:
        catalogue = tuple(FeatureKind.from_label(t) for t in header[5].split(","))
    except ValueError as exc:
        raise MaskFileError(1, str(exc)) from None
    if len(catalogue) != m:
        raise MaskFileError(1, f"kind list has {len(catalogue)} entries, header says {m}")
    if channels not in (1, 3):
        raise MaskFileError(1, f"channels must be 1 or 3, got {channels}")

    geom = GridGeometry(width, height)
    n = geom.pixel_count
    masks = MaskSet.empty(geom, catalogue)
    values = np.zeros((channels, m * n))
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        tokens = line.split()
        if len(tokens) != 3 + channels:
            raise MaskFileError(lineno, f"expected {3 + channels} fields, got {len(tokens)}")
        try:
            i, x, y = int(tokens[0]), int(tokens[1]), int(tokens[2])
            vals = [float(t) for t in tokens[3:]]
        except ValueError:
            raise MaskFileError(lineno, f"unparseable record {line!r}") from None
        if not 0 <= i < m:
            raise MaskFileError(lineno, f"feature id {i} out of range [0, {m})")
        if not (0 <= x < width and 0 <= y < height):
            raise MaskFileError(lineno, f"pixel ({x}, {y}) outside {width}x{height}")
        pixel = y * width + x
        if masks.has_point(i, pixel):
            raise MaskFileError(lineno, f"duplicate point (feature {i}, pixel {pixel})")
        masks.add_point(i, pixel)
        values[:, i * n + pixel] = vals
    return masks, values

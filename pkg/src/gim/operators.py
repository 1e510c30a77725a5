"""Matrix-free linear operators on pixel grids.

Five feature extractors (colour value, forward differences in x and y,
2x2 and 16x16 box means), the 5-point negated Laplacian with reflecting
boundaries, and their masked/stacked compositions up to the full
symmetric indefinite saddle-point operator.

All stencils use the same boundary convention: out-of-range samples are
obtained by mirroring (half-sample symmetric reflection), which for the
immediate neighbours of the Laplacian reduces to replacing a missing
neighbour by the centre pixel.  Grid spacing is 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatchError


@dataclass(frozen=True)
class GridGeometry:
    """Pixel grid dimensions; N = width * height."""

    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("grid dimensions must be >= 1")

    @property
    def pixel_count(self) -> int:
        return self.width * self.height


class FeatureKind(Enum):
    """The feature catalogue: what each constraint row measures at a pixel."""

    DIRICHLET = "dirichlet"  # the colour value itself
    DERIV_X = "dx"           # forward difference along x
    DERIV_Y = "dy"           # forward difference along y
    AVG2 = "avg2"            # mean over the 2x2 patch anchored at the pixel
    AVG16 = "avg16"          # mean over the 16x16 patch anchored at the pixel

    @property
    def patch(self) -> int | None:
        return {FeatureKind.AVG2: 2, FeatureKind.AVG16: 16}.get(self)

    @classmethod
    def from_label(cls, label: str) -> "FeatureKind":
        for kind in cls:
            if kind.value == label:
                return kind
        raise ValueError(f"unknown feature {label!r} "
                         f"(choose from {', '.join(k.value for k in cls)})")


DEFAULT_CATALOGUE = (
    FeatureKind.DIRICHLET,
    FeatureKind.DERIV_X,
    FeatureKind.DERIV_Y,
    FeatureKind.AVG2,
    FeatureKind.AVG16,
)


@dataclass(frozen=True)
class LinearOperator:
    """A map and its adjoint, applied matrix-free to flat vectors."""

    in_dim: int
    out_dim: int
    apply: Callable[[np.ndarray], np.ndarray]
    apply_adjoint: Callable[[np.ndarray], np.ndarray]

    @property
    def symmetric_square(self) -> bool:
        return self.in_dim == self.out_dim


def reflect_index(t: int, n: int) -> int:
    """Map an out-of-range index into [0, n) by mirroring at the borders.

    Half-sample symmetry: ..., 1, 0 | 0, 1, ..., n-1 | n-1, n-2, ...
    """
    r = t % (2 * n)
    return r if r < n else 2 * n - 1 - r


@lru_cache(maxsize=None)
def _avg_factor(n: int, p: int) -> sp.csr_matrix:
    """1D p-sample mean with mirrored out-of-range samples, as an n x n matrix."""
    rows = np.repeat(np.arange(n), p)
    cols = np.array([reflect_index(i + k, n) for i in range(n) for k in range(p)])
    vals = np.full(n * p, 1.0 / p)
    return sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()


@lru_cache(maxsize=None)
def _avg_factor_t(n: int, p: int) -> sp.csr_matrix:
    return _avg_factor(n, p).T.tocsr()


def _check_len(v: np.ndarray, n: int, what: str) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (n,):
        raise DimensionMismatchError(f"{what}: expected length {n}, got shape {v.shape}")
    return v


def laplacian_apply(geom: GridGeometry, u: np.ndarray) -> np.ndarray:
    """Negated 5-point Laplacian with reflecting boundaries (symmetric PSD)."""
    u = _check_len(u, geom.pixel_count, "laplacian_apply")
    v = u.reshape(geom.height, geom.width)
    out = 4.0 * v
    out[:, :-1] -= v[:, 1:]
    out[:, 1:] -= v[:, :-1]
    out[:-1, :] -= v[1:, :]
    out[1:, :] -= v[:-1, :]
    # mirrored neighbours fold back onto the centre pixel
    out[:, 0] -= v[:, 0]
    out[:, -1] -= v[:, -1]
    out[0, :] -= v[0, :]
    out[-1, :] -= v[-1, :]
    return out.reshape(-1)


def feature_apply(kind: FeatureKind, geom: GridGeometry, u: np.ndarray) -> np.ndarray:
    """Apply one feature extractor to a flat channel vector."""
    u = _check_len(u, geom.pixel_count, "feature_apply")
    h, w = geom.height, geom.width
    if kind is FeatureKind.DIRICHLET:
        return u.copy()
    v = u.reshape(h, w)
    if kind is FeatureKind.DERIV_X:
        out = np.zeros_like(v)
        out[:, : w - 1] = v[:, 1:] - v[:, : w - 1]  # mirrored last column gives 0
        return out.reshape(-1)
    if kind is FeatureKind.DERIV_Y:
        out = np.zeros_like(v)
        out[: h - 1, :] = v[1:, :] - v[: h - 1, :]
        return out.reshape(-1)
    p = kind.patch
    return np.asarray(_avg_factor(h, p) @ (v @ _avg_factor_t(w, p))).reshape(-1)


def feature_adjoint_apply(kind: FeatureKind, geom: GridGeometry, v: np.ndarray) -> np.ndarray:
    """Exact adjoint of :func:`feature_apply` under the same boundary rule."""
    v = _check_len(v, geom.pixel_count, "feature_adjoint_apply")
    h, w = geom.height, geom.width
    if kind is FeatureKind.DIRICHLET:
        return v.copy()
    g = v.reshape(h, w)
    if kind is FeatureKind.DERIV_X:
        out = np.zeros_like(g)
        out[:, : w - 1] -= g[:, : w - 1]
        out[:, 1:] += g[:, : w - 1]
        return out.reshape(-1)
    if kind is FeatureKind.DERIV_Y:
        out = np.zeros_like(g)
        out[: h - 1, :] -= g[: h - 1, :]
        out[1:, :] += g[: h - 1, :]
        return out.reshape(-1)
    p = kind.patch
    return np.asarray(_avg_factor_t(h, p) @ (g @ _avg_factor(w, p))).reshape(-1)


def stacked_apply(masks, u: np.ndarray) -> np.ndarray:
    """The stacked masked feature map: block i is mask_i * feature_i(u)."""
    geom = masks.geom
    u = _check_len(u, geom.pixel_count, "stacked_apply")
    blocks = [
        masks.grids[i] * feature_apply(kind, geom, u)
        for i, kind in enumerate(masks.catalogue)
    ]
    return np.concatenate(blocks)


def stacked_adjoint_apply(masks, lam: np.ndarray) -> np.ndarray:
    """Adjoint of :func:`stacked_apply`: sum of feature adjoints of masked blocks."""
    geom = masks.geom
    n = geom.pixel_count
    m = len(masks.catalogue)
    lam = _check_len(lam, m * n, "stacked_adjoint_apply")
    out = np.zeros(n)
    for i, kind in enumerate(masks.catalogue):
        out += feature_adjoint_apply(kind, geom, masks.grids[i] * lam[i * n : (i + 1) * n])
    return out


def saddle_apply(masks, z: np.ndarray) -> np.ndarray:
    """The symmetric indefinite system operator: z = [u; lam] -> [Lu + A'lam; Au]."""
    geom = masks.geom
    n = geom.pixel_count
    m = len(masks.catalogue)
    z = _check_len(z, n + m * n, "saddle_apply")
    u, lam = z[:n], z[n:]
    top = laplacian_apply(geom, u) + stacked_adjoint_apply(masks, lam)
    return np.concatenate([top, stacked_apply(masks, u)])


def laplacian_operator(geom: GridGeometry) -> LinearOperator:
    n = geom.pixel_count
    f = lambda u: laplacian_apply(geom, u)
    return LinearOperator(n, n, f, f)


def feature_operator(kind: FeatureKind, geom: GridGeometry) -> LinearOperator:
    n = geom.pixel_count
    return LinearOperator(
        n, n,
        lambda u: feature_apply(kind, geom, u),
        lambda v: feature_adjoint_apply(kind, geom, v),
    )


def stacked_operator(masks) -> LinearOperator:
    n = masks.geom.pixel_count
    m = len(masks.catalogue)
    return LinearOperator(
        n, m * n,
        lambda u: stacked_apply(masks, u),
        lambda lam: stacked_adjoint_apply(masks, lam),
    )


def saddle_operator(masks) -> LinearOperator:
    n = masks.geom.pixel_count * (1 + len(masks.catalogue))
    f = lambda z: saddle_apply(masks, z)
    return LinearOperator(n, n, f, f)

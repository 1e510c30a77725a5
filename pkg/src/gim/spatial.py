"""Spatial optimisation: greedy Voronoi densification of the feature masks.

Each iteration inpaints with the current masks, computes one squared-error
map per feature type, partitions the image into Voronoi cells around the
current mask points, scores every cell by its largest integrated feature
error, and inserts new points of the winning feature at the cell's peak
error pixel.  All ties break towards the lowest index so runs are fully
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, MaskSaturatedError
from .image import PixelGrid, mse
from .inpaint import DEFAULT_INPAINT_CONFIG, InpaintProblem, inpaint
from .masks import MaskSet, extract_feature_values
from .operators import GridGeometry, feature_apply
from .solvers import SolverConfig

_LABEL_BLOCK = 2_000_000  # distance-matrix entries per block


@dataclass(frozen=True)
class VoronoiLabeling:
    """Nearest-site cell index per pixel, plus the site list itself."""

    labels: np.ndarray          # (N,) int, cell index per pixel
    sites: np.ndarray           # (S, 3) int rows (feature, x, y)


@dataclass(frozen=True)
class CellScore:
    """One cell's winning feature, integrated error, and peak-error pixel."""

    cell: int
    best_feature: int
    integrated_error: float
    argmax_pixel: int


@dataclass(frozen=True)
class DensifyConfig:
    """Budget and schedule for mask construction.

    ``seed`` selects the initial mask: None places the first batch of
    colour-value points on a deterministic near-square lattice; an integer
    seeds an RNG that draws them uniformly instead.
    """

    target_points: int
    iterations: int
    solver_cfg: SolverConfig = DEFAULT_INPAINT_CONFIG
    seed: int | None = None

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.target_points // self.iterations < 1:
            raise ValueError("target_points must allow >= 1 point per iteration")


@dataclass
class DensifyResult:
    masks: MaskSet
    values: np.ndarray               # (channels, m*N)
    trace: list                      # per-iteration dicts
    reconstruction: PixelGrid
    inpaint_solves: int


def error_maps(u: PixelGrid, f: PixelGrid, catalogue) -> np.ndarray:
    """Per-feature squared-error maps of shape (m, N).

    Map i holds the pointwise squared feature error of the reconstruction,
    summed over channels (squared Euclidean norm over RGB).
    """
    if (u.width, u.height, u.channels) != (f.width, f.height, f.channels):
        raise DimensionMismatchError("error_maps: grids must share shape")
    geom = GridGeometry(u.width, u.height)
    maps = np.zeros((len(catalogue), geom.pixel_count))
    for ch in range(u.channels):
        diff = u.plane(ch) - f.plane(ch)
        for i, kind in enumerate(catalogue):
            e = feature_apply(kind, geom, diff)
            maps[i] += e * e
    return maps


def voronoi_partition(geom: GridGeometry, sites: np.ndarray) -> VoronoiLabeling:
    """Exact nearest-site labeling in squared Euclidean pixel distance.

    Ties resolve to the lowest site index.  Site coordinates are the
    (x, y) columns; the feature column does not affect distances.
    """
    sites = np.asarray(sites, dtype=np.int64).reshape(-1, 3)
    if sites.shape[0] == 0:
        raise ValueError("voronoi_partition needs at least one site")
    n = geom.pixel_count
    px = np.arange(n, dtype=np.int64) % geom.width
    py = np.arange(n, dtype=np.int64) // geom.width
    sx = sites[:, 1]
    sy = sites[:, 2]
    labels = np.empty(n, dtype=np.int64)
    chunk = max(1, _LABEL_BLOCK // sites.shape[0])
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        d2 = (px[start:stop, None] - sx) ** 2 + (py[start:stop, None] - sy) ** 2
        labels[start:stop] = np.argmin(d2, axis=1)  # first minimum = lowest index
    return VoronoiLabeling(labels, sites)


def score_cells(labeling: VoronoiLabeling, maps: np.ndarray) -> list:
    """Integrated errors per (feature, cell); each cell keeps its best feature.

    Feature ties resolve to the lowest feature index, peak-pixel ties to
    the lowest pixel index.
    """
    n_cells = labeling.sites.shape[0]
    m = maps.shape[0]
    integrated = np.vstack([
        np.bincount(labeling.labels, weights=maps[i], minlength=n_cells)
        for i in range(m)
    ])
    best = np.argmax(integrated, axis=0)
    scores = []
    order = np.argsort(labeling.labels, kind="stable")
    boundaries = np.searchsorted(labeling.labels[order], np.arange(n_cells + 1))
    for cell in range(n_cells):
        members = order[boundaries[cell]:boundaries[cell + 1]]
        i = int(best[cell])
        if members.size:
            peak = int(members[np.argmax(maps[i][members])])
        else:
            peak = -1  # cell owns no pixel (co-located sites)
        scores.append(CellScore(cell, i, float(integrated[i, cell]), peak))
    return scores


def select_and_insert(labeling: VoronoiLabeling, maps: np.ndarray,
                      masks: MaskSet, k: int) -> tuple:
    """Insert up to ``k`` points into the highest-error cells.

    Cells are visited in decreasing integrated-error order (ties towards
    the lower cell index).  Within a cell the point goes to the highest
    error pixel of the cell's winning feature; occupied slots fall back to
    the next-highest pixel, exhausted cells are skipped in favour of the
    next-ranked one.  Returns (updated mask copy, list of (feature, pixel)).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    scores = score_cells(labeling, maps)
    ranking = np.argsort(-np.array([s.integrated_error for s in scores]),
                         kind="stable")
    updated = masks.copy()
    inserted = []
    order = np.argsort(labeling.labels, kind="stable")
    boundaries = np.searchsorted(labeling.labels[order],
                                 np.arange(len(scores) + 1))
    for cell in ranking:
        if len(inserted) == k:
            break
        cs = scores[cell]
        members = order[boundaries[cell]:boundaries[cell + 1]]
        if members.size == 0:
            continue
        vals = maps[cs.best_feature][members]
        by_error = members[np.argsort(-vals, kind="stable")]
        for pixel in by_error:
            if not updated.has_point(cs.best_feature, int(pixel)):
                updated.add_point(cs.best_feature, int(pixel))
                inserted.append((cs.best_feature, int(pixel)))
                break
    if not inserted:
        raise MaskSaturatedError("no free (feature, pixel) slot in any cell")
    return updated, inserted


def uniform_seed(geom: GridGeometry, catalogue, count: int,
                 seed: int | None = None) -> MaskSet:
    """Initial mask of ``count`` points.

    Colour-value points on a near-square lattice by default (or uniform
    random pixels when ``seed`` is given).  If ``count`` exceeds the pixel
    count, the surplus spills over into the remaining feature types in
    catalogue order, so a full budget can saturate every slot.
    """
    catalogue = tuple(catalogue)
    n = geom.pixel_count
    if count > n * len(catalogue):
        raise ValueError("seed count exceeds the number of available slots")
    masks = MaskSet.empty(geom, catalogue)
    remaining = count
    for feature in range(len(catalogue)):
        take = min(remaining, n)
        if take == 0:
            break
        if take == n:
            pixels = np.arange(n)
        elif seed is not None:
            rng = np.random.default_rng(seed + feature)
            pixels = rng.choice(n, size=take, replace=False)
        else:
            pixels = _lattice_pixels(geom, take)
        for j in pixels:
            masks.add_point(feature, int(j))
        remaining -= take
    return masks


def _lattice_pixels(geom: GridGeometry, count: int) -> np.ndarray:
    """Deterministic near-square lattice of ``count`` distinct pixels."""
    w, h = geom.width, geom.height
    cols = max(1, min(w, round(np.sqrt(count * w / h))))
    rows = -(-count // cols)  # ceil
    if rows > h:
        rows = h
        cols = -(-count // rows)
    xs = np.floor((np.arange(cols) + 0.5) * w / cols).astype(np.int64)
    ys = np.floor((np.arange(rows) + 0.5) * h / rows).astype(np.int64)
    pixels = (ys[:, None] * w + xs[None, :]).reshape(-1)
    return pixels[:count]


def densify(f: PixelGrid, catalogue, cfg: DensifyConfig,
            debug_dir: str | None = None) -> DensifyResult:
    """Construct masks for ``f`` by iterative Voronoi densification.

    Runs ``cfg.iterations`` rounds of insert-then-inpaint; the first
    round's points are the uniform seed, later rounds are guided by the
    previous reconstruction's error maps.  The budget remainder
    ``target_points - iterations * floor(target_points / iterations)`` is
    spread one extra point over the final rounds, so exactly
    ``target_points`` points result from exactly ``iterations`` inpainting
    solves.  With ``debug_dir`` set, per-iteration error maps, integrated
    cell errors, and a Voronoi overlay are written there as PGM images.
    """
    catalogue = tuple(catalogue)
    geom = GridGeometry(f.width, f.height)
    n_iter = cfg.iterations
    base = cfg.target_points // n_iter
    remainder = cfg.target_points - base * n_iter
    batch_sizes = [base + (1 if t >= n_iter - remainder else 0)
                   for t in range(n_iter)]

    masks = uniform_seed(geom, catalogue, batch_sizes[0], cfg.seed)
    values = None
    trace = []
    reconstruction = None
    solves = 0
    for t in range(n_iter):
        if t > 0:
            maps = error_maps(reconstruction, f, catalogue)
            labeling = voronoi_partition(geom, masks.sites())
            if debug_dir is not None:
                _write_debug_maps(debug_dir, t, geom, catalogue, maps, labeling)
            masks, _ = select_and_insert(labeling, maps, masks, batch_sizes[t])
        values = np.stack([extract_feature_values(masks, f.plane(c))
                           for c in range(f.channels)])
        reconstruction, _ = inpaint(InpaintProblem(geom, masks, values,
                                                   cfg.solver_cfg))
        solves += 1
        trace.append({
            "iteration": t,
            "points_total": masks.total_points,
            "points_per_feature": masks.points_per_feature(),
            "mse": mse(reconstruction, f).mse,
        })
    return DensifyResult(masks, values, trace, reconstruction, solves)


def _normalised_grid(geom: GridGeometry, data: np.ndarray) -> PixelGrid:
    peak = data.max()
    scaled = data * (255.0 / peak) if peak > 0 else data
    return PixelGrid(geom.width, geom.height, 1, scaled)


def _write_debug_maps(directory, iteration, geom, catalogue, maps, labeling):
    import os

    from .image import write_pnm

    os.makedirs(directory, exist_ok=True)
    prefix = os.path.join(directory, f"iter{iteration:03d}")
    for i, kind in enumerate(catalogue):
        write_pnm(_normalised_grid(geom, maps[i]),
                  f"{prefix}_error_{kind.value}.pgm")
    scores = score_cells(labeling, maps)
    cell_best = np.array([s.integrated_error for s in scores])
    write_pnm(_normalised_grid(geom, cell_best[labeling.labels]),
              f"{prefix}_integrated.pgm")
    # Voronoi overlay: cell index modulated to grey, sites marked white
    shade = 64.0 + 128.0 * (labeling.labels % 7) / 6.0
    sites = labeling.sites
    shade[sites[:, 2] * geom.width + sites[:, 1]] = 255.0
    write_pnm(PixelGrid(geom.width, geom.height, 1, shade),
              f"{prefix}_voronoi.pgm")

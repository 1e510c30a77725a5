"""Tonal optimisation: least-squares choice of the stored feature values.

Given fixed masks, the stored values that minimise the reconstruction
error are the least-squares solution of the (dense, never formed)
reconstruction map.  CGNR runs on its normal equations, with every
operator product evaluated through a SYMMLQ saddle solve.  The optimal
values need not interpolate the original image's features.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyMaskError
from .image import PixelGrid, mse
from .inpaint import _solve_saddle, reconstruct
from .masks import MaskSet, extract_feature_values
from .solvers import SolverConfig, cgnr

DEFAULT_INNER_CONFIG = SolverConfig(epsilon=1e-6, max_iterations=200000)
DEFAULT_FINAL_CONFIG = SolverConfig(epsilon=1e-9, max_iterations=200000)


@dataclass(frozen=True)
class TonalConfig:
    """Outer CGNR tolerance/cap plus the inner and final solve accuracies.

    The inner solves evaluating the reconstruction map stay looser than
    the final reconstruction so the run spends its time where it matters;
    they must still be tighter than the outer tolerance to keep the
    operator pair consistent for CGNR.
    """

    outer_epsilon: float = 1e-4
    outer_max_iterations: int = 100
    inner_cfg: SolverConfig = DEFAULT_INNER_CONFIG
    final_cfg: SolverConfig = DEFAULT_FINAL_CONFIG


@dataclass
class TonalResult:
    values: np.ndarray            # optimised (channels, m*N)
    reconstruction: PixelGrid
    mse_before: float
    mse_after: float
    reports: list                 # per-channel CGNR SolverReport
    # per channel: (iterations, residual estimate) of every inner saddle
    # solve, so the effect of inexact operator products is observable
    inner_solves: list = field(default_factory=list)


def tonal_optimise(f: PixelGrid, masks: MaskSet,
                   values0: np.ndarray | None = None,
                   cfg: TonalConfig = TonalConfig()) -> TonalResult:
    """Optimise stored values to minimise the reconstruction MSE against f.

    Starts from ``values0`` (the interpolating values of ``f`` if omitted)
    and never degrades: if the optimised values reconstruct worse than the
    start (possible only through inner-solve inexactness), the start is
    returned unchanged.  Channels are optimised independently with the
    shared masks.
    """
    if masks.total_points == 0:
        raise EmptyMaskError("tonal optimisation needs at least one mask point")
    if values0 is None:
        values0 = np.stack([extract_feature_values(masks, f.plane(c))
                            for c in range(f.channels)])
    values0 = np.atleast_2d(np.asarray(values0, dtype=np.float64))

    support = masks.support()
    n = masks.geom.pixel_count
    m_n = len(masks.catalogue) * n
    inner_log = []

    def apply(b):
        u, _, report = _solve_saddle(masks, np.zeros(n), b, cfg.inner_cfg)
        inner_log.append((report.iterations,
                          report.final_estimate_norms.get("cg", 0.0)))
        return u

    def apply_adjoint(v):
        _, lam, report = _solve_saddle(masks, v, np.zeros(m_n), cfg.inner_cfg)
        inner_log.append((report.iterations,
                          report.final_estimate_norms.get("cg", 0.0)))
        lam[~support] = 0.0
        return lam

    out_values = np.zeros_like(values0)
    planes_before = []
    planes_after = []
    reports = []
    inner_solves = []
    for c in range(f.channels):
        inner_log = []
        u0 = reconstruct(masks, values0[c], cfg.final_cfg)
        b_opt, report = cgnr(apply, apply_adjoint, f.plane(c), values0[c],
                             SolverConfig(cfg.outer_epsilon,
                                          cfg.outer_max_iterations))
        u_opt = reconstruct(masks, b_opt, cfg.final_cfg)
        err0 = float(np.mean((u0 - f.plane(c)) ** 2))
        err1 = float(np.mean((u_opt - f.plane(c)) ** 2))
        if err1 > err0:
            b_opt, u_opt = values0[c].copy(), u0
        out_values[c] = b_opt
        planes_before.append(u0)
        planes_after.append(u_opt)
        reports.append(report)
        inner_solves.append(tuple(inner_log))

    before = PixelGrid(f.width, f.height, f.channels, np.stack(planes_before))
    after = PixelGrid(f.width, f.height, f.channels, np.stack(planes_after))
    return TonalResult(out_values, after, mse(before, f).mse, mse(after, f).mse,
                       reports, inner_solves)

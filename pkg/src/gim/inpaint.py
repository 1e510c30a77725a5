"""Generalised inpainting: the saddle-point solve and the reconstruction
operator (the linear map from stored feature values to the inpainted image)
together with its adjoint.

Channels are independent: every solve acts on one flat channel vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyMaskError
from .image import PixelGrid
from .masks import MaskSet
from .operators import GridGeometry, LinearOperator, saddle_operator, stacked_apply
from .solvers import SolverConfig, symmlq

DEFAULT_INPAINT_CONFIG = SolverConfig(epsilon=1e-9, max_iterations=200000)

# extra SYMMLQ passes (residual refresh + re-solve) if the constraint
# residual still exceeds this fraction of max(1, ||b||)
_CONSTRAINT_TOL = 1e-6
_MAX_REFINEMENTS = 2


@dataclass
class InpaintProblem:
    """One reconstruction task: masks, per-channel stored values, solver config.

    The stored values must be zero off the mask support; off-support rows
    of the constraint operator are zero, so nonzero entries there would
    make the system inconsistent.
    """

    geom: GridGeometry
    masks: MaskSet
    values: np.ndarray  # shape (channels, m*N)
    solver_cfg: SolverConfig = DEFAULT_INPAINT_CONFIG

    def __post_init__(self):
        self.values = np.atleast_2d(np.asarray(self.values, dtype=np.float64))
        off = ~self.masks.support()
        if np.any(self.values[:, off] != 0.0):
            raise ValueError("stored values must be zero off the mask support")


def _solve_saddle(masks: MaskSet, rhs_top: np.ndarray, rhs_bottom: np.ndarray,
                  cfg: SolverConfig, x0: np.ndarray | None = None,
                  refine: bool = False) -> tuple:
    """Solve [L A'; A 0][u; lam] = [rhs_top; rhs_bottom]; returns (u, lam, report)."""
    n = masks.geom.pixel_count
    op = saddle_operator(masks)
    rhs = np.concatenate([rhs_top, rhs_bottom])
    x, report = symmlq(op, rhs, x0, cfg)
    if refine:
        scale = max(1.0, float(np.linalg.norm(rhs_bottom)))
        for _ in range(_MAX_REFINEMENTS):
            residual = np.linalg.norm(stacked_apply(masks, x[:n]) - rhs_bottom)
            if residual <= _CONSTRAINT_TOL * scale:
                break
            x, report = symmlq(op, rhs, x, cfg)
    return x[:n], x[n:], report


def inpaint(problem: InpaintProblem) -> tuple:
    """Reconstruct an image from stored feature values.

    Solves the saddle system per channel with right-hand side [0; values]
    and returns (PixelGrid, per-channel SolverReport list).  The returned
    image satisfies the feature constraints to solver tolerance.
    """
    masks = problem.masks
    if masks.total_points == 0:
        raise EmptyMaskError("inpainting needs at least one mask point")
    n = masks.geom.pixel_count
    planes = []
    reports = []
    for b_ch in problem.values:
        u, _, report = _solve_saddle(masks, np.zeros(n), b_ch,
                                     problem.solver_cfg, refine=True)
        planes.append(u)
        reports.append(report)
    grid = PixelGrid(masks.geom.width, masks.geom.height, len(planes),
                     np.stack(planes))
    return grid, reports


def reconstruct(masks: MaskSet, values: np.ndarray,
                cfg: SolverConfig = DEFAULT_INPAINT_CONFIG) -> np.ndarray:
    """Apply the reconstruction operator to one channel of stored values.

    Linear in ``values``; equals the inpainting result for the same system.
    """
    if masks.total_points == 0:
        raise EmptyMaskError("reconstruction needs at least one mask point")
    n = masks.geom.pixel_count
    u, _, _ = _solve_saddle(masks, np.zeros(n), np.asarray(values, float), cfg)
    return u


def reconstruct_adjoint(masks: MaskSet, v: np.ndarray,
                        cfg: SolverConfig = DEFAULT_INPAINT_CONFIG) -> np.ndarray:
    """Apply the adjoint of the reconstruction operator to an image vector.

    Solves the saddle system with right-hand side [v; 0] and returns the
    multiplier block restricted to the mask support (entries off the
    support are exactly zero).
    """
    if masks.total_points == 0:
        raise EmptyMaskError("reconstruction needs at least one mask point")
    m_n = len(masks.catalogue) * masks.geom.pixel_count
    _, lam, _ = _solve_saddle(masks, np.asarray(v, float), np.zeros(m_n), cfg)
    lam[~masks.support()] = 0.0
    return lam


def reconstruction_operator(masks: MaskSet,
                            cfg: SolverConfig = DEFAULT_INPAINT_CONFIG) -> LinearOperator:
    """The reconstruction map and its adjoint bundled as a LinearOperator."""
    n = masks.geom.pixel_count
    m_n = len(masks.catalogue) * n
    return LinearOperator(
        m_n, n,
        lambda b: reconstruct(masks, b, cfg),
        lambda v: reconstruct_adjoint(masks, v, cfg),
    )

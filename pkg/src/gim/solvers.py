"""Krylov solvers: SYMMLQ for symmetric (possibly indefinite or singular)
systems and CGNR for least-squares problems, both fully matrix-free.

SYMMLQ here is the Paige/Saunders method driven by the Lanczos process: a
tridiagonalisation combined with LQ plane rotations, keeping cheap running
estimates of the LQ-, CG- and QR-point residual norms.  It converges for
any symmetric system whose right-hand side lies in the range of the
operator, which covers indefinite saddle matrices and linearly dependent
constraint sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SolverBreakdownError
from .operators import LinearOperator

# below this the Lanczos process has effectively terminated; treat as converged
_BREAKDOWN_BETA = 1e-300


@dataclass(frozen=True)
class SolverConfig:
    """Relative tolerance and iteration cap; deterministic, no randomness."""

    epsilon: float = 1e-9
    max_iterations: int = 100000

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True)
class SolverReport:
    """Outcome of one solver run."""

    iterations: int
    converged: bool
    termination: str  # "tolerance" | "max_iterations" | "breakdown"
    final_estimate_norms: dict = field(default_factory=dict)
    residual_trace: tuple | None = None


def symmlq(op: LinearOperator, b: np.ndarray, x0: np.ndarray | None = None,
           cfg: SolverConfig = SolverConfig()) -> tuple:
    """Solve the symmetric system op(x) = b.

    The operator may be indefinite and may be singular as long as ``b`` is
    in its range.  Starting from ``x0`` (zero if omitted), the LQ iterate
    is updated every step; on exit the solution is transferred to the CG
    point whenever that carries the smaller residual estimate.

    The stopping test compares the CG residual estimate against
    ``epsilon`` scaled by running estimates of the tridiagonal norm and
    the solution norm, i.e. a backward-error style criterion.
    """
    n = op.in_dim
    b = np.asarray(b, dtype=np.float64)
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=np.float64)

    # initial Lanczos step
    u = op.apply(x)
    w = b - u
    beta0 = float(np.linalg.norm(w))
    if beta0 == 0.0:
        return x, SolverReport(0, True, "tolerance",
                               {"lq": 0.0, "cg": 0.0, "qr": 0.0})
    w = w / beta0
    u = op.apply(w)
    alpha = float(w @ u)
    u = u - alpha * w

    beta1 = beta0
    beta2 = float(np.linalg.norm(u))
    lq = cg = qr = beta1
    r1 = beta1
    r2 = 0.0
    gbar = alpha
    dbar = beta2
    s_prod = 1.0
    t_frob2 = alpha * alpha + beta2 * beta2   # running ||T||_F^2
    z2 = 0.0                                  # running ||y||^2 of LQ coefficients
    wbar = w.copy()  # first Lanczos vector; the first LQ direction
    d = gbar

    iterations = 0
    converged = False
    termination = "max_iterations"
    while True:
        d = gbar
        if d == 0.0:
            d = math.sqrt(t_frob2)
        lq = math.hypot(r1, r2)
        qr = beta0 * s_prod
        cg = beta2 * qr / abs(d)
        if cg * cg <= t_frob2 * z2 * cfg.epsilon * cfg.epsilon:
            converged = True
            termination = "tolerance"
            break
        if beta2 <= _BREAKDOWN_BETA:
            # Lanczos space is invariant: the CG point is exact
            converged = True
            termination = "breakdown"
            break
        if iterations >= cfg.max_iterations:
            converged = False
            termination = "max_iterations"
            break
        iterations += 1

        # Lanczos step
        u = u / beta2
        v = op.apply(u)
        alpha = float(u @ v)
        v = v - alpha * u - beta2 * w
        beta1 = beta2
        beta2 = float(np.linalg.norm(v))
        if not (math.isfinite(alpha) and math.isfinite(beta2)):
            raise SolverBreakdownError(
                f"non-finite Lanczos coefficients at iteration {iterations}")

        t_frob2 += alpha * alpha + beta1 * beta1 + beta2 * beta2

        # next plane rotation
        gamma = math.hypot(gbar, beta1)
        cs = gbar / gamma
        sn = beta1 / gamma
        delta = cs * dbar + sn * alpha
        gbar = sn * dbar - cs * alpha
        dbar = -cs * beta2

        # update x and the LQ direction
        zeta = r1 / gamma
        x += (cs * zeta) * wbar + (sn * zeta) * u
        wbar = sn * wbar - cs * u

        s_prod = sn * s_prod
        z2 += zeta * zeta
        r1 = r2 - delta * zeta
        r2 = -sn * beta2 * zeta

        # cycle Lanczos vectors: w takes old u, u takes old v
        u, w = v, u

    # transfer to the CG point when its residual estimate is no worse
    if cg <= lq:
        x += (r1 / d) * wbar

    report = SolverReport(iterations, converged, termination,
                          {"lq": lq, "cg": cg, "qr": qr})
    return x, report


def cgnr(apply, apply_adjoint, f: np.ndarray, b0: np.ndarray,
         cfg: SolverConfig = SolverConfig()) -> tuple:
    """Conjugate gradient on the normal equations: minimise ||apply(b) - f||.

    ``apply`` and ``apply_adjoint`` must form an adjoint pair (this is not
    checked at runtime).  Stops when the normal-equation residual norm
    drops below ``epsilon`` times its initial value.  The recursive
    residual norms are recorded per iteration; the objective is
    non-increasing across iterations.
    """
    f = np.asarray(f, dtype=np.float64)
    b = np.array(b0, dtype=np.float64)
    r = f - apply(b)
    z = apply_adjoint(r)
    z_norm0 = float(np.linalg.norm(z))
    trace = [float(np.linalg.norm(r))]
    if z_norm0 == 0.0:
        return b, SolverReport(0, True, "tolerance",
                               {"normal_residual": 0.0}, tuple(trace))

    gamma = z_norm0 * z_norm0
    p = z.copy()
    iterations = 0
    converged = False
    termination = "max_iterations"
    z_norm = z_norm0
    while iterations < cfg.max_iterations:
        w = apply(p)
        denom = float(w @ w)
        if denom == 0.0:
            termination = "breakdown"
            break
        step = gamma / denom
        b += step * p
        r -= step * w
        z = apply_adjoint(r)
        gamma_next = float(z @ z)
        if not math.isfinite(gamma_next):
            raise SolverBreakdownError("non-finite normal residual in CGNR")
        iterations += 1
        trace.append(float(np.linalg.norm(r)))
        z_norm = math.sqrt(gamma_next)
        if z_norm <= cfg.epsilon * z_norm0:
            converged = True
            termination = "tolerance"
            break
        p = z + (gamma_next / gamma) * p
        gamma = gamma_next

    report = SolverReport(iterations, converged, termination,
                          {"normal_residual": z_norm,
                           "normal_residual_initial": z_norm0},
                          tuple(trace))
    return b, report

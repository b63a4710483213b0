"""Box-constrained low-rank factorization by alternating least squares.

The solver minimises ``0.5 * ||P_Omega(U V' - Y_hat)||_F^2``. Each half-sweep
solves one independent least-squares problem per row of ``U`` (or of ``V``)
through the kernels in :mod:`mfstab._backend`.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from ._backend import kernels
from .errors import InvalidArgument, RankDeficiencyError
from .matcore import ObservedMatrix, project_omega
from .subgeo import PINV_TOL, Subspace

logger = logging.getLogger(__name__)

__all__ = [
    "FactorPair",
    "SolverConfig",
    "SolveResult",
    "objective",
    "box_project",
    "als_solve",
    "subspace_objective",
]

# objective below this fraction of ||P_Omega(Y_hat)||^2 counts as an exact fit
ABS_FLOOR = 1e-26


@dataclass(frozen=True)
class FactorPair:
    U: np.ndarray = field(repr=False)
    V: np.ndarray = field(repr=False)

    def __post_init__(self):
        U = np.atleast_2d(np.asarray(self.U, dtype=float))
        V = np.atleast_2d(np.asarray(self.V, dtype=float))
        if U.shape[1] != V.shape[1]:
            raise InvalidArgument(f"factor ranks differ: {U.shape} vs {V.shape}")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "V", V)

    @property
    def rank(self) -> int:
        return self.U.shape[1]

    @property
    def shape(self):
        return (self.U.shape[0], self.V.shape[0])

    def product(self) -> np.ndarray:
        return self.U @ self.V.T


@dataclass(frozen=True)
class SolverConfig:
    """ALS hyperparameters.

    ``init`` is ``"gaussian-random"`` or ``"svd-of-zero-filled"``;
    ``box_mode`` is ``"ignore"`` or ``"clip-final"``. A tiny ``ridge`` (1e-8)
    keeps every half-step well-posed on starved masks.
    """

    max_iterations: int = 500
    rel_tolerance: float = 1e-9
    ridge: float = 0.0
    init: str = "gaussian-random"
    box_mode: str = "ignore"

    def __post_init__(self):
        if self.max_iterations < 1:
            raise InvalidArgument("max_iterations must be positive")
        if not self.rel_tolerance > 0:
            raise InvalidArgument("rel_tolerance must be positive")
        if self.ridge < 0:
            raise InvalidArgument("ridge must be non-negative")
        if self.init not in ("gaussian-random", "svd-of-zero-filled"):
            raise InvalidArgument(f"unknown init {self.init!r}")
        if self.box_mode not in ("ignore", "clip-final"):
            raise InvalidArgument(f"unknown box_mode {self.box_mode!r}")


@dataclass(frozen=True)
class SolveResult:
    factors: FactorPair
    objective_trace: tuple
    iterations: int
    converged: bool
    k: float = math.inf
    box_mode: str = "ignore"

    @property
    def final_objective(self) -> float:
        return self.objective_trace[-1] if self.objective_trace else math.nan

    def completion(self) -> np.ndarray:
        """``U V'``, clipped to ``[-k, k]`` when ``box_mode == "clip-final"``."""
        Y = self.factors.product()
        if self.box_mode == "clip-final":
            Y = box_project(Y, self.k)
        return Y


def objective(factors: FactorPair, obs: ObservedMatrix) -> float:
    if factors.shape != obs.shape:
        raise InvalidArgument(f"factor shape {factors.shape} vs data {obs.shape}")
    om = obs.omega
    U = np.ascontiguousarray(factors.U)
    V = np.ascontiguousarray(factors.V)
    return 0.5 * kernels.masked_sq_residual(U, V, om.rows, om.cols,
                                            np.ascontiguousarray(obs.observed))


def box_project(X, k) -> np.ndarray:
    if not k > 0:
        raise InvalidArgument("k must be positive")
    return np.clip(np.asarray(X, dtype=float), -k, k)


class _Layout:
    """Observed entries grouped by column (for V-steps) and by row (for U-steps)."""

    def __init__(self, obs: ObservedMatrix):
        m, n = obs.shape
        rows, cols, vals = obs.omega.rows, obs.omega.cols, obs.observed
        # omega.linear is row-major sorted, so the row grouping is free
        self.row_ptr = np.searchsorted(rows, np.arange(m + 1)).astype(np.int64)
        self.row_idx = np.ascontiguousarray(cols, dtype=np.int64)
        self.row_val = np.ascontiguousarray(vals)
        order = np.argsort(cols, kind="stable")
        self.col_ptr = np.searchsorted(cols[order], np.arange(n + 1)).astype(np.int64)
        self.col_idx = np.ascontiguousarray(rows[order], dtype=np.int64)
        self.col_val = np.ascontiguousarray(vals[order])
        self.rows = np.ascontiguousarray(rows, dtype=np.int64)
        self.cols = np.ascontiguousarray(cols, dtype=np.int64)
        self.vals = self.row_val


def _init_factors(obs: ObservedMatrix, r: int, config: SolverConfig, rng):
    m, n = obs.shape
    if config.init == "svd-of-zero-filled":
        p = max(obs.omega.rate, 1.0 / max(m * n, 1))
        Q, s, Wt = np.linalg.svd(obs.zero_filled() / p, full_matrices=False)
        U = Q[:, :r] * np.sqrt(s[:r])
        if np.linalg.matrix_rank(U) == r:
            return U
        # zero-filled data of rank < r: top up with noise so the first step is solvable
        return U + 1e-3 * (np.sqrt(s[0]) if s.size else 1.0) * rng.standard_normal((m, r))
    mag = np.abs(obs.observed)
    scale = math.sqrt(mag.mean()) if mag.size and mag.mean() > 0 else 1.0
    return rng.standard_normal((m, r)) * scale / math.sqrt(r)


def _half_step(F, ptr, idx, val, ridge, out, axis):
    bad = kernels.solve_blocks(F, ptr, idx, val, ridge, out)
    if bad >= 0:
        count = int(ptr[bad + 1] - ptr[bad])
        raise RankDeficiencyError(
            f"{axis} {bad} has {count} observed entries; its least-squares step is "
            f"rank deficient (add ridge > 0 or sample more entries)",
            axis=axis, index=int(bad),
        )


def als_solve(obs: ObservedMatrix, r: int, config: SolverConfig | None = None,
              seed=None) -> SolveResult:
    """Alternating least squares for the masked rank-``r`` factorization.

    The objective is recorded after every half-sweep. A sweep (V-step then
    U-step) that lowers the objective by a relative amount below
    ``config.rel_tolerance``, or reaches an objective at the floating-point
    floor, ends the iteration with ``converged=True``.
    """
    config = config or SolverConfig()
    if r < 1:
        raise InvalidArgument("rank must be at least 1")
    m, n = obs.shape
    rng = np.random.default_rng(seed)
    lay = _Layout(obs)
    U = np.ascontiguousarray(_init_factors(obs, r, config, rng))
    V = np.zeros((n, r))
    floor = ABS_FLOOR * float(lay.vals @ lay.vals)
    trace = []
    prev = math.inf
    converged = False
    it = 0
    for it in range(1, config.max_iterations + 1):
        _half_step(U, lay.col_ptr, lay.col_idx, lay.col_val, config.ridge, V, "column")
        trace.append(0.5 * kernels.masked_sq_residual(U, V, lay.rows, lay.cols, lay.vals))
        _half_step(V, lay.row_ptr, lay.row_idx, lay.row_val, config.ridge, U, "row")
        cur = 0.5 * kernels.masked_sq_residual(U, V, lay.rows, lay.cols, lay.vals)
        trace.append(cur)
        if cur <= floor or (math.isfinite(prev) and prev - cur < config.rel_tolerance * prev):
            converged = True
            break
        prev = cur
    logger.debug("als_solve: %d sweeps, objective %.3e, converged=%s", it, trace[-1], converged)
    return SolveResult(FactorPair(U, V), tuple(trace), it, converged, obs.k, config.box_mode)


def subspace_objective(N: Subspace, obs: ObservedMatrix, pinv_tol=PINV_TOL) -> float:
    """Sum over columns of the squared residual of the observed entries after
    projecting onto the row-restricted basis."""
    m, n = obs.shape
    if N.ambient != m:
        raise InvalidArgument("basis row count does not match the data")
    lay = _Layout(obs)
    total = 0.0
    for j in range(n):
        lo, hi = lay.col_ptr[j], lay.col_ptr[j + 1]
        if lo == hi:
            continue
        y = lay.col_val[lo:hi]
        N1 = N.basis[lay.col_idx[lo:hi]]
        resid = y - N1 @ (np.linalg.pinv(N1, rcond=pinv_tol) @ y)
        total += float(resid @ resid)
    return total

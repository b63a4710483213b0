"""Subspace geometry: bases, canonical angles, projector distances and
column completion through a row-restricted basis."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateMaskError, InvalidArgument, RankDeficiencyError

__all__ = [
    "Subspace",
    "CanonicalAngles",
    "orthonormalize",
    "canonical_angles",
    "sin_theta_norm",
    "projection_distance",
    "complete_column",
    "complete_columns",
    "restricted_sigma_min",
    "coherence_mu0",
    "condition_number",
    "column_space",
    "row_space",
]

ORTHO_TOL = 1e-12
RANK_RTOL = 1e-10
PINV_TOL = 1e-10
ZERO_SIGMA = 1e-14


@dataclass(frozen=True, eq=False)
class Subspace:
    """An r-dimensional subspace of R^m held as an orthonormal ``m x r`` basis."""

    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        B = np.array(self.basis, dtype=float)
        if B.ndim == 1:
            B = B[:, None]
        if B.ndim != 2:
            raise InvalidArgument("basis must be 2-D")
        r = B.shape[1]
        gram_err = np.max(np.abs(B.T @ B - np.eye(r)), initial=0.0)
        # QR/SVD bases drift by O(m eps); allow that on tall bases
        if gram_err > ORTHO_TOL * max(1.0, B.shape[0] / 100):
            raise InvalidArgument(f"basis is not orthonormal (|B'B - I| = {gram_err:.2e})")
        B.setflags(write=False)
        object.__setattr__(self, "basis", B)

    @property
    def ambient(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def project(self, X) -> np.ndarray:
        """Orthogonal projection of the columns of ``X`` onto the subspace."""
        return self.basis @ (self.basis.T @ X)


@dataclass(frozen=True)
class CanonicalAngles:
    """Canonical angles in radians, sorted in descending order."""

    angles: np.ndarray

    def __post_init__(self):
        a = np.clip(np.asarray(self.angles, dtype=float).ravel(), 0.0, math.pi / 2)
        a = np.sort(a)[::-1].copy()
        a.setflags(write=False)
        object.__setattr__(self, "angles", a)

    @property
    def theta1(self) -> float:
        return float(self.angles[0]) if self.angles.size else 0.0

    def __len__(self):
        return self.angles.size


def orthonormalize(U) -> Subspace:
    """Orthonormal basis of ``span(U)`` via a thin SVD."""
    U = np.asarray(U, dtype=float)
    if U.ndim == 1:
        U = U[:, None]
    if U.shape[1] == 0:
        return Subspace(np.zeros((U.shape[0], 0)))
    Q, s, _ = np.linalg.svd(U, full_matrices=False)
    rank = int(np.sum(s > RANK_RTOL * s[0])) if s.size and s[0] > 0 else 0
    if rank < U.shape[1]:
        raise RankDeficiencyError(
            f"matrix has numerical rank {rank} < {U.shape[1]} columns", rank=rank
        )
    return Subspace(Q)


def column_space(Y, r) -> Subspace:
    """Span of the top ``r`` left singular vectors of ``Y``."""
    Q = np.linalg.svd(np.asarray(Y, dtype=float), full_matrices=False)[0]
    return Subspace(Q[:, :r])


def row_space(Y, r) -> Subspace:
    return column_space(np.asarray(Y, dtype=float).T, r)


def _check_pair(A: Subspace, B: Subspace):
    if A.ambient != B.ambient or A.dim != B.dim:
        raise InvalidArgument(
            f"subspace dimensions differ: {A.basis.shape} vs {B.basis.shape}"
        )


def canonical_angles(A: Subspace, B: Subspace) -> CanonicalAngles:
    """Canonical angles between two subspaces of equal dimension.

    Cosines are the singular values of ``A'B`` (clamped to [0, 1]). Angles
    below pi/4 are taken from the sines instead, i.e. the singular values of
    ``(I - AA')B``, because ``arccos`` loses half the digits near 1.
    """
    _check_pair(A, B)
    if A.dim == 0:
        return CanonicalAngles(np.zeros(0))
    cos = np.clip(np.linalg.svd(A.basis.T @ B.basis, compute_uv=False), 0.0, 1.0)
    cos = np.sort(cos)  # ascending cosines <-> descending angles
    resid = B.basis - A.basis @ (A.basis.T @ B.basis)
    sin = np.clip(np.linalg.svd(resid, compute_uv=False), 0.0, 1.0)
    sin = np.sort(sin)[::-1]
    angles = np.where(cos * cos < 0.5, np.arccos(cos), np.arcsin(sin))
    return CanonicalAngles(angles)


def sin_theta_norm(angles: CanonicalAngles, kind="spectral") -> float:
    s = np.sin(angles.angles)
    if kind in ("spectral", 2):
        return float(s.max(initial=0.0))
    if kind in ("frobenius", "fro"):
        return float(np.sqrt(np.sum(s * s)))
    raise InvalidArgument(f"unknown norm kind {kind!r}")


def projection_distance(A: Subspace, B: Subspace, kind="spectral") -> float:
    """Norm of the difference of the orthogonal projectors."""
    _check_pair(A, B)
    D = A.projector() - B.projector()
    if kind in ("frobenius", "fro"):
        return float(np.linalg.norm(D))
    if kind in ("spectral", 2):
        # D is symmetric: spectral norm is the largest |eigenvalue|
        return float(np.max(np.abs(np.linalg.eigvalsh(D)), initial=0.0))
    raise InvalidArgument(f"unknown norm kind {kind!r}")


def _restrict(N: Subspace, rows):
    rows = np.asarray(rows, dtype=np.int64).ravel()
    if rows.size == 0:
        raise InvalidArgument("no observed rows")
    if rows.min() < 0 or rows.max() >= N.ambient:
        raise InvalidArgument("observed row outside the ambient dimension")
    if np.unique(rows).size != rows.size:
        raise InvalidArgument("observed rows must be distinct")
    return rows, N.basis[rows]


def complete_column(N: Subspace, observed_rows, y_obs, pinv_tol=PINV_TOL) -> np.ndarray:
    """Predict a full column from its observed entries: ``N pinv(N_1) y_1``.

    ``N_1`` is ``N`` restricted to ``observed_rows``; singular values below
    ``pinv_tol * sigma_max(N_1)`` are truncated.
    """
    rows, N1 = _restrict(N, observed_rows)
    y_obs = np.asarray(y_obs, dtype=float).ravel()
    if y_obs.size != rows.size:
        raise InvalidArgument("y_obs length does not match observed_rows")
    if N.dim == 0:
        return np.zeros(N.ambient)
    s = np.linalg.svd(N1, compute_uv=False)
    if s[0] <= ZERO_SIGMA:
        raise DegenerateMaskError("restricted basis is numerically zero")
    coef = np.linalg.pinv(N1, rcond=pinv_tol) @ y_obs
    return N.basis @ coef


def complete_columns(N: Subspace, values, omega, pinv_tol=PINV_TOL):
    """Column-by-column completion of a partially observed matrix.

    Returns ``(completion, degenerate)`` where ``degenerate`` lists the columns
    whose restricted basis was empty or numerically zero; those columns are
    left as zeros.
    """
    m, n = omega.shape
    if N.ambient != m:
        raise InvalidArgument("basis row count does not match the matrix")
    values = np.asarray(values, dtype=float)
    out = np.zeros((m, n))
    degenerate = []
    order = np.argsort(omega.cols, kind="stable")
    rows, cols = omega.rows[order], omega.cols[order]
    bounds = np.searchsorted(cols, np.arange(n + 1))
    for j in range(n):
        rj = rows[bounds[j]:bounds[j + 1]]
        if rj.size == 0:
            degenerate.append(j)
            continue
        try:
            out[:, j] = complete_column(N, rj, values[rj, j], pinv_tol)
        except DegenerateMaskError:
            degenerate.append(j)
    return out, degenerate


def restricted_sigma_min(N: Subspace, observed_rows) -> float:
    """r-th singular value of the row restriction ``N_1`` (0 when degenerate)."""
    rows, N1 = _restrict(N, observed_rows)
    if N.dim == 0:
        return 0.0
    if rows.size < N.dim:
        return 0.0
    s = np.linalg.svd(N1, compute_uv=False)[N.dim - 1]
    return 0.0 if s < ZERO_SIGMA else float(s)


def coherence_mu0(N: Subspace) -> float:
    """Row-coherence ``(m / r) max_i ||N_i||^2`` (a proxy, not strong incoherence)."""
    if N.dim == 0:
        return 0.0
    return float(N.ambient / N.dim * np.max(np.sum(N.basis ** 2, axis=1)))


def condition_number(Y, r) -> float:
    """``sigma_1 / sigma_r`` of ``Y``."""
    s = np.linalg.svd(np.asarray(Y, dtype=float), compute_uv=False)
    if r < 1 or r > s.size:
        raise InvalidArgument(f"rank {r} outside [1, {s.size}]")
    if s[r - 1] <= ZERO_SIGMA * s[0] or s[0] == 0:
        raise RankDeficiencyError(f"sigma_{r} is numerically zero", rank=int(np.sum(s > ZERO_SIGMA * s[0])))
    return float(s[0] / s[r - 1])

"""Pure-Python twin of the compiled ALS kernels (same contracts)."""
import numpy as np
from scipy.linalg import solve_triangular

RANK_TOL = 1e-12


def solve_blocks(F, indptr, indices, values, ridge, out):
    """Solve every block; return -1 on success or the first singular block."""
    r = F.shape[1]
    sq = np.sqrt(ridge) if ridge > 0 else 0.0
    for b in range(indptr.shape[0] - 1):
        lo, hi = indptr[b], indptr[b + 1]
        if sq == 0.0 and hi - lo < r:
            return b
        A = F[indices[lo:hi]]
        y = values[lo:hi]
        if sq > 0.0:
            A = np.vstack([A, sq * np.eye(r)])
            y = np.concatenate([y, np.zeros(r)])
        scale = np.sqrt(np.sum(A * A))
        q, R = np.linalg.qr(A)
        if np.any(np.abs(np.diag(R)) <= RANK_TOL * scale):
            return b
        out[b] = solve_triangular(R, q.T @ y)
    return -1


def masked_sq_residual(U, V, rows, cols, values):
    d = np.einsum("ij,ij->i", U[rows], V[cols]) - values
    return float(d @ d)

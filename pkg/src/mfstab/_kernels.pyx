# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled ALS kernels.

Each block of the sparse structure ``(indptr, indices, values)`` is one
masked least-squares problem ``min ||F[rows] x - y||^2 + ridge ||x||^2``,
solved with a Householder QR of the (optionally ridge-augmented) system.
"""
from libc.math cimport sqrt, fabs
from libc.stdlib cimport malloc, free


cdef double RANK_TOL = 1e-12


def solve_blocks(const double[:, ::1] F, const long long[::1] indptr,
                 const long long[::1] indices, const double[::1] values,
                 double ridge, double[:, ::1] out):
    """Solve every block; return -1 on success or the first singular block."""
    cdef Py_ssize_t nb = indptr.shape[0] - 1
    cdef Py_ssize_t r = F.shape[1]
    cdef Py_ssize_t b, i, j, kk, cnt, ld, maxcnt = 0
    cdef double sq = sqrt(ridge) if ridge > 0 else 0.0
    cdef double nrm, alpha, s, vnorm2, scale
    cdef double *W
    cdef double *x
    cdef long long row
    cdef int failed = -1

    for b in range(nb):
        cnt = indptr[b + 1] - indptr[b]
        if cnt > maxcnt:
            maxcnt = cnt
    ld = maxcnt + r
    W = <double *> malloc(ld * (r + 1) * sizeof(double))
    x = <double *> malloc((r + 1) * sizeof(double))
    if W == NULL or x == NULL:
        free(W)
        free(x)
        raise MemoryError()

    with nogil:
        for b in range(nb):
            cnt = indptr[b + 1] - indptr[b]
            if sq == 0.0 and cnt < r:
                failed = b
                break
            ld = cnt + (r if sq > 0.0 else 0)
            # column-major W: column j occupies W[j*ld : (j+1)*ld]
            scale = 0.0
            for i in range(cnt):
                row = indices[indptr[b] + i]
                for j in range(r):
                    W[j * ld + i] = F[row, j]
                    scale += F[row, j] * F[row, j]
                W[r * ld + i] = values[indptr[b] + i]
            if sq > 0.0:
                for i in range(r):
                    for j in range(r):
                        W[j * ld + cnt + i] = sq if i == j else 0.0
                    W[r * ld + cnt + i] = 0.0
                scale += ridge * r
            scale = sqrt(scale)

            for kk in range(r):
                nrm = 0.0
                for i in range(kk, ld):
                    nrm += W[kk * ld + i] * W[kk * ld + i]
                nrm = sqrt(nrm)
                if nrm <= RANK_TOL * scale:
                    failed = b
                    break
                alpha = -nrm if W[kk * ld + kk] >= 0 else nrm
                W[kk * ld + kk] -= alpha
                vnorm2 = 0.0
                for i in range(kk, ld):
                    vnorm2 += W[kk * ld + i] * W[kk * ld + i]
                for j in range(kk + 1, r + 1):
                    s = 0.0
                    for i in range(kk, ld):
                        s += W[kk * ld + i] * W[j * ld + i]
                    s = 2.0 * s / vnorm2
                    for i in range(kk, ld):
                        W[j * ld + i] -= s * W[kk * ld + i]
                W[kk * ld + kk] = alpha
            if failed >= 0:
                break

            for kk in range(r - 1, -1, -1):
                s = W[r * ld + kk]
                for j in range(kk + 1, r):
                    s -= W[j * ld + kk] * x[j]
                x[kk] = s / W[kk * ld + kk]
            for j in range(r):
                out[b, j] = x[j]

    free(W)
    free(x)
    return failed


def masked_sq_residual(const double[:, ::1] U, const double[:, ::1] V,
                       const long long[::1] rows, const long long[::1] cols,
                       const double[::1] values):
    """Sum of squared residuals ``(U[i] . V[j] - y)^2`` over observed entries."""
    cdef Py_ssize_t t, j, r = U.shape[1], nnz = rows.shape[0]
    cdef double acc = 0.0, d
    with nogil:
        for t in range(nnz):
            d = -values[t]
            for j in range(r):
                d += U[rows[t], j] * V[cols[t], j]
            acc += d * d
    return acc

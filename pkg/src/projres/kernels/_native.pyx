# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend.

Mirrors :mod:`projres.kernels._python` routine for routine: same algorithms,
pivoting rules, and tolerances, with the inner loops in C.  Wins where the
work is many small operations (Jacobi rotations, Gram-Schmidt passes on a
handful of vectors); loses to BLAS on large factorizations.
"""

from libc.math cimport fabs, sqrt

import numpy as np

cimport numpy as cnp

from ..errors import ConvergenceError, NotPositiveDefiniteError, SingularMatrixError

cnp.import_array()

DEF MAX_JACOBI_SWEEPS = 60


def mgs(cnp.ndarray[cnp.float64_t, ndim=2] x, double tol):
    """Modified Gram-Schmidt with one re-orthogonalization pass; see the
    Python backend for the contract."""
    cdef Py_ssize_t k = x.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] basis = np.empty((k, d))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] coeffs = np.zeros((k, k))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] w = np.empty(d)
    cdef Py_ssize_t rank = 0
    cdef Py_ssize_t i, j, t, rep
    cdef double norm0, nrm, p
    for i in range(k):
        norm0 = 0.0
        for t in range(d):
            w[t] = x[i, t]
            norm0 += w[t] * w[t]
        norm0 = sqrt(norm0)
        for rep in range(2):
            for j in range(rank):
                p = 0.0
                for t in range(d):
                    p += basis[j, t] * w[t]
                coeffs[i, j] += p
                for t in range(d):
                    w[t] -= p * basis[j, t]
        nrm = 0.0
        for t in range(d):
            nrm += w[t] * w[t]
        nrm = sqrt(nrm)
        if norm0 == 0.0 or nrm <= tol * norm0:
            continue
        coeffs[i, rank] = nrm
        for t in range(d):
            basis[rank, t] = w[t] / nrm
        rank += 1
    return coeffs[:, :rank].copy(), basis[:rank].copy()


def jacobi_eig(cnp.ndarray[cnp.float64_t, ndim=2] a):
    """Cyclic Jacobi eigendecomposition; values descending, vectors in
    columns."""
    cdef Py_ssize_t m = a.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] A = np.array(a, copy=True)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] V = np.eye(m)
    cdef Py_ssize_t p, q, i, sweep
    cdef double scale, stop, off, apq, tau, t, c, s, tmp_p, tmp_q
    cdef bint converged = False
    if m == 1:
        return A[0, :1].copy(), V
    scale = 0.0
    for p in range(m):
        for q in range(m):
            scale += A[p, q] * A[p, q]
    scale = sqrt(scale)
    if scale == 0.0:
        return np.zeros(m), V
    stop = 1e-15 * scale
    for sweep in range(MAX_JACOBI_SWEEPS):
        off = 0.0
        for p in range(m - 1):
            for q in range(p + 1, m):
                off += A[p, q] * A[p, q]
        off = sqrt(2.0 * off)
        if off <= stop:
            converged = True
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                for i in range(m):
                    tmp_p = A[p, i]
                    tmp_q = A[q, i]
                    A[p, i] = c * tmp_p - s * tmp_q
                    A[q, i] = s * tmp_p + c * tmp_q
                for i in range(m):
                    tmp_p = A[i, p]
                    tmp_q = A[i, q]
                    A[i, p] = c * tmp_p - s * tmp_q
                    A[i, q] = s * tmp_p + c * tmp_q
                A[p, q] = 0.0
                A[q, p] = 0.0
                for i in range(m):
                    tmp_p = V[i, p]
                    tmp_q = V[i, q]
                    V[i, p] = c * tmp_p - s * tmp_q
                    V[i, q] = s * tmp_p + c * tmp_q
    if not converged:
        raise ConvergenceError("Jacobi eigensolver did not converge in "
                               f"{MAX_JACOBI_SWEEPS} sweeps (m={m})")
    values = np.empty(m)
    for p in range(m):
        values[p] = A[p, p]
    order = np.argsort(values)[::-1]
    return values[order], np.ascontiguousarray(V[:, order])


def cholesky_solve(cnp.ndarray[cnp.float64_t, ndim=2] a,
                   cnp.ndarray[cnp.float64_t, ndim=1] b):
    """Solve a x = b for SPD a via Cholesky; fails on a nonpositive pivot."""
    cdef Py_ssize_t m = a.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] L = np.zeros((m, m))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] y = b.copy()
    cdef Py_ssize_t i, j, t
    cdef double acc, pivot, ljj
    for j in range(m):
        acc = a[j, j]
        for t in range(j):
            acc -= L[j, t] * L[j, t]
        pivot = acc
        if not pivot > 0.0:
            raise NotPositiveDefiniteError(
                f"nonpositive Cholesky pivot {pivot!r} at index {j}: "
                "matrix is not positive definite")
        ljj = sqrt(pivot)
        L[j, j] = ljj
        for i in range(j + 1, m):
            acc = a[i, j]
            for t in range(j):
                acc -= L[i, t] * L[j, t]
            L[i, j] = acc / ljj
    for i in range(m):
        acc = y[i]
        for t in range(i):
            acc -= L[i, t] * y[t]
        y[i] = acc / L[i, i]
    for i in range(m - 1, -1, -1):
        acc = y[i]
        for t in range(i + 1, m):
            acc -= L[t, i] * y[t]
        y[i] = acc / L[i, i]
    return y


def lu_solve(cnp.ndarray[cnp.float64_t, ndim=2] a,
             cnp.ndarray[cnp.float64_t, ndim=1] b,
             double pivot_tol=1e-12):
    """Gaussian elimination with partial pivoting; see the Python backend."""
    cdef Py_ssize_t m = a.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] U = np.array(a, copy=True)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] x = b.copy()
    cdef Py_ssize_t col, row, t, piv_row
    cdef double limit, piv, best, factor, acc
    limit = 1.0
    for col in range(m):
        for t in range(m):
            if fabs(U[col, t]) > limit:
                limit = fabs(U[col, t])
    limit *= pivot_tol
    for col in range(m):
        piv_row = col
        best = fabs(U[col, col])
        for row in range(col + 1, m):
            if fabs(U[row, col]) > best:
                best = fabs(U[row, col])
                piv_row = row
        piv = U[piv_row, col]
        if fabs(piv) <= limit:
            raise SingularMatrixError(
                f"pivot {piv!r} below tolerance at column {col}")
        if piv_row != col:
            for t in range(col, m):
                acc = U[col, t]
                U[col, t] = U[piv_row, t]
                U[piv_row, t] = acc
            acc = x[col]
            x[col] = x[piv_row]
            x[piv_row] = acc
        for row in range(col + 1, m):
            factor = U[row, col] / piv
            for t in range(col + 1, m):
                U[row, t] -= factor * U[col, t]
            x[row] -= factor * x[col]
    for col in range(m - 1, -1, -1):
        acc = x[col]
        for t in range(col + 1, m):
            acc -= U[col, t] * x[t]
        x[col] = acc / U[col, col]
    return x

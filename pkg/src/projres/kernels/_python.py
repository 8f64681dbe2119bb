"""Pure-Python kernel backend.

Same four routines as the compiled extension, written against numpy array
operations so the inner loops stay at BLAS speed where possible.  Inputs are
assumed validated (C-contiguous float64, finite, shapes checked) by the
wrappers in :mod:`projres.numerics`.
"""

import math

import numpy as np

from ..errors import ConvergenceError, NotPositiveDefiniteError, SingularMatrixError

_MAX_JACOBI_SWEEPS = 60


def mgs(x, tol):
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    x is a (k, d) array whose rows are the input vectors.  Returns
    (coeffs, basis): basis rows are orthonormal, coeffs is (k, rank) with
    x[i] = coeffs[i] @ basis up to the rank tolerance.  Rows whose residual
    norm falls below tol * ||x[i]|| are dropped as linearly dependent and
    contribute no basis vector.
    """
    k, d = x.shape
    basis = np.empty((k, d), dtype=np.float64)
    coeffs = np.zeros((k, k), dtype=np.float64)
    rank = 0
    for i in range(k):
        w = x[i].copy()
        norm0 = math.sqrt(float(w @ w))
        for _ in range(2):
            for j in range(rank):
                p = float(basis[j] @ w)
                coeffs[i, j] += p
                w -= p * basis[j]
        nrm = math.sqrt(float(w @ w))
        if norm0 == 0.0 or nrm <= tol * norm0:
            continue
        coeffs[i, rank] = nrm
        basis[rank] = w / nrm
        rank += 1
    return coeffs[:, :rank].copy(), basis[:rank].copy()


def jacobi_eig(a):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Returns (values, vectors) with eigenvalues sorted descending and the
    matching eigenvectors as columns.  Sweeps row by row, zeroing each
    off-diagonal entry with a Givens rotation, until the off-diagonal
    Frobenius mass drops below 1e-15 of the input scale.
    """
    m = a.shape[0]
    A = np.array(a, dtype=np.float64, copy=True)
    V = np.eye(m)
    if m == 1:
        return A[0, :1].copy(), V
    scale = math.sqrt(float(np.sum(A * A)))
    if scale == 0.0:
        return np.zeros(m), V
    stop = 1e-15 * scale
    for _ in range(_MAX_JACOBI_SWEEPS):
        off = math.sqrt(2.0 * float(np.sum(np.triu(A, 1) ** 2)))
        if off <= stop:
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                rp = A[p, :].copy()
                rq = A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                cp = A[:, p].copy()
                cq = A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
                A[p, q] = 0.0
                A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    else:
        raise ConvergenceError("Jacobi eigensolver did not converge in "
                               f"{_MAX_JACOBI_SWEEPS} sweeps (m={m})")
    values = np.diag(A).copy()
    order = np.argsort(values)[::-1]
    return values[order], np.ascontiguousarray(V[:, order])


def cholesky_solve(a, b):
    """Solve a x = b for SPD a via Cholesky; fails on a nonpositive pivot."""
    m = a.shape[0]
    L = np.zeros((m, m), dtype=np.float64)
    for j in range(m):
        col = a[j:, j] - L[j:, :j] @ L[j, :j]
        pivot = col[0]
        if not pivot > 0.0:
            raise NotPositiveDefiniteError(
                f"nonpositive Cholesky pivot {pivot!r} at index {j}: "
                "matrix is not positive definite")
        ljj = math.sqrt(pivot)
        L[j, j] = ljj
        L[j + 1:, j] = col[1:] / ljj
    y = b.astype(np.float64, copy=True)
    for i in range(m):
        y[i] = (y[i] - L[i, :i] @ y[:i]) / L[i, i]
    for i in range(m - 1, -1, -1):
        y[i] = (y[i] - L[i + 1:, i] @ y[i + 1:]) / L[i, i]
    return y


def lu_solve(a, b, pivot_tol=1e-12):
    """Solve a x = b by Gaussian elimination with partial pivoting.

    Raises SingularMatrixError when the best available pivot is below
    pivot_tol relative to the matrix magnitude.
    """
    m = a.shape[0]
    U = np.array(a, dtype=np.float64, copy=True)
    x = b.astype(np.float64, copy=True)
    limit = pivot_tol * max(1.0, float(np.max(np.abs(U))))
    for col in range(m):
        piv_row = col + int(np.argmax(np.abs(U[col:, col])))
        piv = U[piv_row, col]
        if abs(piv) <= limit:
            raise SingularMatrixError(
                f"pivot {piv!r} below tolerance at column {col}")
        if piv_row != col:
            U[[col, piv_row], col:] = U[[piv_row, col], col:]
            x[col], x[piv_row] = x[piv_row], x[col]
        factors = U[col + 1:, col] / piv
        U[col + 1:, col + 1:] -= np.outer(factors, U[col, col + 1:])
        x[col + 1:] -= factors * x[col]
    for i in range(m - 1, -1, -1):
        x[i] = (x[i] - U[i, i + 1:] @ x[i + 1:]) / U[i, i]
    return x

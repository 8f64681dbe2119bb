"""Validated linear-algebra surface used by every other module.

Thin wrappers around the selected kernel backend: input checking, the
EigenPairs container, and the package-wide tolerance defaults live here.
Matrices and vectors are plain float64 numpy arrays; vector sequences are
(k, d) arrays whose rows are the vectors.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels

DEFAULT_RANK_TOL = 1e-10
DEFAULT_SYM_TOL = 1e-12
DEFAULT_PIVOT_TOL = 1e-12


def _as_matrix(a, name):
    a = np.ascontiguousarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def _as_vector(b, name):
    b = np.ascontiguousarray(b, dtype=np.float64)
    if b.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got shape {b.shape}")
    if not np.all(np.isfinite(b)):
        raise ValueError(f"{name} contains non-finite entries")
    return b


def _check_square(a, b):
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    if a.shape[0] != b.shape[0]:
        raise ValueError(
            f"dimension mismatch: matrix {a.shape} vs vector {b.shape}")


@dataclass(frozen=True)
class EigenPairs:
    """Eigendecomposition result: values sorted descending, the matching
    orthonormal eigenvectors as columns of ``vectors``."""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def size(self):
        return self.values.shape[0]


def mgs(vectors, tol=DEFAULT_RANK_TOL):
    """Orthonormalize a sequence of vectors by modified Gram-Schmidt.

    Returns (coeffs, basis, rank).  ``basis`` is (rank, d) with orthonormal
    rows, ``coeffs`` is (k, rank) lower-staircase so that row i of the input
    equals coeffs[i] @ basis up to the rank tolerance: entries left of the
    step are the projections onto earlier basis vectors, the step entry is
    the residual norm, and everything right of it is exactly zero.  Inputs
    whose residual after orthogonalization is at most tol times their norm
    are dropped as dependent and contribute no basis vector.
    """
    x = np.asarray(vectors, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    x = _as_matrix(x, "vectors")
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    coeffs, basis = kernels.mgs(x, float(tol))
    return coeffs, basis, basis.shape[0]


def sym_eig(a, sym_tol=DEFAULT_SYM_TOL):
    """Eigendecompose a symmetric matrix with cyclic Jacobi rotations.

    Rejects inputs whose asymmetry exceeds sym_tol relative to the matrix
    magnitude, then symmetrizes and iterates; Jacobi keeps the eigenvector
    columns orthonormal to machine precision.
    """
    A = _as_matrix(a, "a")
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"matrix must be square, got shape {A.shape}")
    mag = max(1.0, float(np.max(np.abs(A)))) if A.size else 1.0
    asym = float(np.max(np.abs(A - A.T))) if A.size else 0.0
    if asym > sym_tol * mag:
        raise ValueError(
            f"matrix is not symmetric: max |A - A^T| = {asym:.3e} "
            f"exceeds {sym_tol:.1e} * {mag:.3e}")
    A = (A + A.T) / 2.0
    values, vectors = kernels.jacobi_eig(A)
    return EigenPairs(values=values, vectors=vectors)


def spd_solve(a, b):
    """Solve a x = b for symmetric positive-definite a (Cholesky).

    Raises NotPositiveDefiniteError on a nonpositive pivot, which with a
    positive ridge penalty signals an indefinite Hessian and should not
    occur.
    """
    A = _as_matrix(a, "a")
    rhs = _as_vector(b, "b")
    _check_square(A, rhs)
    return kernels.cholesky_solve(A, rhs)


def lin_solve(a, b, pivot_tol=DEFAULT_PIVOT_TOL):
    """Solve a small square system with partially pivoted elimination.

    Raises SingularMatrixError when no pivot above tolerance exists; for
    the leave-k-out system (I - H_SS) this corresponds to a deleted block
    with leverage approaching one.
    """
    A = _as_matrix(a, "a")
    rhs = _as_vector(b, "b")
    _check_square(A, rhs)
    return kernels.lu_solve(A, rhs, float(pivot_tol))

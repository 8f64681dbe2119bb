"""Hat matrix and leave-k-out predictions at deleted points.

The hat matrix of the ridge smoother is H = X (X^T X + lam I)^-1 X^T.  For a
deletion set S the labels an exactly-retrained model would predict at S are
recoverable without retraining:

    (I - H_SS) e = r_S,      yhat_S = y_S - e,

where r = Y - X theta_full are full-model residuals and H_SS is the k x k
block of H at the deleted rows.  The identity is exact for ridge, so these
synthetic labels feed the gradient and projection-residual updates.

Everything here except the k x k solve is computable before any deletion
request arrives, so HatState holds the Cholesky factor of the normal
equations and serves hat blocks on demand; the full dense H is materialized
lazily and only needed by diagnostics (it is quadratic in n).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from . import numerics
from .errors import DegenerateDeletionError, NotPositiveDefiniteError, SingularMatrixError


@dataclass
class HatState:
    """Precomputed deletion-independent state: penalty, full-model parameters
    and residuals, and the factorization backing hat-matrix blocks."""

    lam: float
    theta_full: np.ndarray
    residuals: np.ndarray
    _X: np.ndarray = field(repr=False)
    _chol: tuple = field(repr=False)
    _H: np.ndarray | None = field(default=None, repr=False)

    @property
    def n(self):
        return self._X.shape[0]

    @property
    def H(self):
        """Dense hat matrix, built on first access and cached."""
        if self._H is None:
            W = cho_solve(self._chol, self._X.T)
            self._H = self._X @ W
        return self._H

    def hat_block(self, idx):
        """The |idx| x |idx| block H[idx, idx] without touching dense H."""
        if self._H is not None:
            return self._H[np.ix_(idx, idx)]
        Xs = self._X[idx]
        return Xs @ cho_solve(self._chol, Xs.T)

    def hat_diag(self, idx):
        return np.diag(self.hat_block(idx)).copy()


def hat_matrix(data, lam, gram=None):
    """Build HatState for a dataset: factor the normal equations, train the
    full model, and record its residuals.  ``gram`` optionally supplies a
    precomputed X^T X."""
    if lam < 0:
        raise ValueError(f"lam must be nonnegative, got {lam}")
    A = (data.X.T @ data.X if gram is None else gram.copy())
    A[np.diag_indices_from(A)] += lam
    try:
        chol = cho_factor(A, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(
            f"singular normal equations (lam={lam}): {exc}") from exc
    theta = cho_solve(chol, data.X.T @ data.Y)
    residuals = data.Y - data.X @ theta
    return HatState(lam=float(lam), theta_full=theta, residuals=residuals,
                    _X=data.X, _chol=chol)


def dk_predict(state, data, req):
    """Predictions of the exactly-retrained model at the deleted points,
    via the direct solve of (I - H_SS) e = r_S.

    Raises DegenerateDeletionError when I - H_SS is singular, i.e. the
    deleted set removes all information along some direction.
    """
    req.check(data.n)
    if req.k < 1:
        raise ValueError("deletion request must contain at least one index")
    idx = req.array()
    system = -state.hat_block(idx)
    system[np.diag_indices_from(system)] += 1.0
    try:
        e = numerics.lin_solve(system, state.residuals[idx])
    except SingularMatrixError as exc:
        raise DegenerateDeletionError(
            f"deleting rows {req.indices} leaves (I - H_SS) singular; "
            "the set carries leverage one along some direction") from exc
    return data.Y[idx] - e


def dk_predict_factored(state, data, req, diag_tol=1e-12):
    """Cross-check path for dk_predict via the diagonal/off-diagonal
    factorization I - H_SS = diag(1 - H_ii) (I - T), T_ij = H_ij / (1 - H_ii)
    off the diagonal.  Produces the same e as the direct solve.
    """
    req.check(data.n)
    if req.k < 1:
        raise ValueError("deletion request must contain at least one index")
    idx = req.array()
    Hss = state.hat_block(idx)
    one_minus = 1.0 - np.diag(Hss)
    if np.any(one_minus <= diag_tol):
        raise DegenerateDeletionError(
            f"leverage reaches one on deleted rows {req.indices}")
    T = Hss / one_minus[:, None]
    np.fill_diagonal(T, 0.0)
    system = -T
    system[np.diag_indices_from(system)] += 1.0
    scaled = state.residuals[idx] / one_minus
    try:
        e = numerics.lin_solve(system, scaled)
    except SingularMatrixError as exc:
        raise DegenerateDeletionError(
            f"deleting rows {req.indices} leaves (I - T) singular") from exc
    return data.Y[idx] - e


__all__ = [
    "HatState",
    "hat_matrix",
    "dk_predict",
    "dk_predict_factored",
]

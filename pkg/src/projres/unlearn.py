"""The five unlearning methods for ridge models.

Given a model trained on the full data and a set S of k rows to delete:

  retrain   -- solve the normal equations on the remaining rows (ground truth)
  newton    -- one Newton step on the post-deletion loss from theta_full;
               exact for this quadratic loss
  influence -- one full-Hessian-preconditioned gradient step
  gradient  -- scalar step along sum_S (theta_full.x_i - yhat_i) x_i using
               leave-k-out labels yhat from dk_predict
  residual  -- the projection-residual update: same direction, but the
               scalar step is replaced by the pseudoinverse of
               N = sum_S x_i x_i^T, which turns the step into the exact
               orthogonal projection of (theta_k - theta_full) onto
               span(x_S) and costs O(k^2 d) once the hat state exists

Each method stamps its own wall time, measured from entry so that only the
per-request work is counted; deletion-independent precomputation (full
model, hat state, Gram matrix) happens outside these calls.
"""

import time
from dataclasses import dataclass, replace

import numpy as np

from . import numerics
from .leverage import dk_predict
from .model import RidgeModel

EIG_CUTOFF = 1e-12


@dataclass(frozen=True)
class LowRankPinv:
    """Pseudoinverse of N = sum_i x_i x_i^T held as eigenpairs: orthonormal
    columns ``vectors`` (d x rank) and the reciprocals of the matching
    positive eigenvalues."""

    inv_values: np.ndarray
    vectors: np.ndarray

    @property
    def rank(self):
        return self.vectors.shape[1]

    def dense(self):
        """Materialized d x d pseudoinverse (testing / small d only)."""
        return (self.vectors * self.inv_values) @ self.vectors.T


@dataclass(frozen=True)
class UnlearnResult:
    method: str
    theta_new: np.ndarray
    wall_time: float
    distance_to_retrain: float | None = None

    def model(self, lam):
        return RidgeModel(theta=self.theta_new, lam=lam)


def retrain_exact(data, req, lam):
    """Train from scratch on the rows outside the request (the oracle)."""
    t0 = time.perf_counter()
    mask = req.keep_mask(data.n)
    Xr = data.X[mask]
    Yr = data.Y[mask]
    gram = Xr.T @ Xr
    gram[np.diag_indices_from(gram)] += lam
    theta = numerics.spd_solve(gram, Xr.T @ Yr)
    return UnlearnResult("retrain", theta, time.perf_counter() - t0)


def _grad_excluding(data, req, model):
    """Gradient of the post-deletion loss at the model's parameters,
    computed as (full-data gradient) - (deleted-row contributions)."""
    theta = model.theta
    pred = data.X @ theta
    grad = data.X.T @ (pred - data.Y) + model.lam * theta
    if req.k:
        idx = req.array()
        Xs = data.X[idx]
        grad -= Xs.T @ (pred[idx] - data.Y[idx])
    return grad


def newton_update(data, req, model_full, gram=None):
    """One Newton step on the post-deletion loss from theta_full.

    ``gram`` optionally carries the precomputed full X^T X so the timed
    region only downdates it by the deleted rows.
    """
    t0 = time.perf_counter()
    req.check(data.n)
    grad = _grad_excluding(data, req, model_full)
    hess = (data.X.T @ data.X if gram is None else gram.copy())
    if req.k:
        Xs = data.X[req.array()]
        hess -= Xs.T @ Xs
    hess[np.diag_indices_from(hess)] += model_full.lam
    theta = model_full.theta - numerics.spd_solve(hess, grad)
    return UnlearnResult("newton", theta, time.perf_counter() - t0)


def influence_update(data, req, model_full, gram=None):
    """Influence-function step: full-data Hessian, post-deletion gradient."""
    t0 = time.perf_counter()
    req.check(data.n)
    grad = _grad_excluding(data, req, model_full)
    hess = (data.X.T @ data.X if gram is None else gram.copy())
    hess[np.diag_indices_from(hess)] += model_full.lam
    theta = model_full.theta - numerics.spd_solve(hess, grad)
    return UnlearnResult("influence", theta, time.perf_counter() - t0)


def gradient_update(data, req, model_full, synthetic_labels, alpha=None):
    """Scalar gradient step on the composite points (x_i, yhat_i), i in S.

    synthetic_labels are the leave-k-out predictions from dk_predict.  The
    default step size is 1/||N||_2 with N = sum_S x_i x_i^T; the update
    direction always lies in span(x_S).
    """
    t0 = time.perf_counter()
    req.check(data.n)
    if req.k < 1:
        raise ValueError("gradient update needs a nonempty deletion request")
    yk = np.asarray(synthetic_labels, dtype=np.float64)
    if yk.shape != (req.k,):
        raise ValueError(
            f"expected {req.k} synthetic labels, got shape {yk.shape}")
    Xs = data.X[req.array()]
    grad = Xs.T @ (Xs @ model_full.theta - yk)
    if alpha is None:
        coeffs, _, rank = numerics.mgs(Xs)
        if rank == 0:
            raise ValueError("all deleted rows are zero; no step direction")
        top = numerics.sym_eig(coeffs.T @ coeffs).values[0]
        alpha = 1.0 / top
    elif alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    theta = model_full.theta - alpha * grad
    return UnlearnResult("gradient", theta, time.perf_counter() - t0)


def pinv_lowrank(deleted_rows, tol=numerics.DEFAULT_RANK_TOL, cutoff=EIG_CUTOFF):
    """Eigenpairs of the pseudoinverse of N = sum_i x_i x_i^T.

    Orthonormalizes the rows (Gram-Schmidt), eigendecomposes the small
    coefficient Gram matrix C = sum_i c_i c_i^T, and maps its eigenvectors
    back through the basis: N = sum_j values_j v_j v_j^T with v_j = basis^T
    a_j.  Eigenvalues below ``cutoff`` relative to the largest are treated
    as zero and excluded, per the Moore-Penrose convention.
    """
    rows = np.atleast_2d(np.asarray(deleted_rows, dtype=np.float64))
    coeffs, basis, rank = numerics.mgs(rows, tol)
    if rank == 0:
        raise ValueError("cannot invert: every input vector has zero norm")
    eig = numerics.sym_eig(coeffs.T @ coeffs)
    keep = eig.values > cutoff * eig.values[0]
    values = eig.values[keep]
    vectors = basis.T @ eig.vectors[:, keep]
    return LowRankPinv(inv_values=1.0 / values, vectors=vectors)


def fast_apply(pinv, g):
    """Apply the low-rank pseudoinverse to a vector in O(rank * d):
    sum_i inv_values_i (v_i . g) v_i."""
    g = np.asarray(g, dtype=np.float64)
    if g.shape != (pinv.vectors.shape[0],):
        raise ValueError(
            f"dimension mismatch: pinv is {pinv.vectors.shape[0]}-dimensional, "
            f"vector has shape {g.shape}")
    return pinv.vectors @ (pinv.inv_values * (pinv.vectors.T @ g))


def residual_update(data, req, model_full, hat):
    """Projection-residual update (the method under study).

    Computes leave-k-out labels via dk_predict, forms the composite-point
    gradient, and applies the pseudoinverse of N = sum_S x_i x_i^T instead
    of a scalar step.  The result equals
    theta_full + proj_span(x_S)(theta_k - theta_full); everything in the
    timed region is independent of the dataset size.
    """
    t0 = time.perf_counter()
    req.check(data.n)
    if req.k < 1:
        raise ValueError("residual update needs a nonempty deletion request")
    yk = dk_predict(hat, data, req)
    Xs = data.X[req.array()]
    grad = Xs.T @ (Xs @ model_full.theta - yk)
    pinv = pinv_lowrank(Xs)
    theta = model_full.theta - fast_apply(pinv, grad)
    return UnlearnResult("residual", theta, time.perf_counter() - t0)


def project_onto_span(vectors, w):
    """Orthogonal projection of w onto the span of the given vectors,
    through a Gram-Schmidt basis."""
    w = np.asarray(w, dtype=np.float64)
    _, basis, rank = numerics.mgs(vectors)
    if rank == 0:
        return np.zeros_like(w)
    if basis.shape[1] != w.shape[0]:
        raise ValueError(
            f"dimension mismatch: span vectors have dim {basis.shape[1]}, "
            f"w has shape {w.shape}")
    return basis.T @ (basis @ w)


def distance_to_retrain(result, data, req, lam):
    """||theta_method - theta_retrain||_2, computed outside any timing."""
    oracle = retrain_exact(data, req, lam)
    return float(np.linalg.norm(result.theta_new - oracle.theta_new))


def with_distance(result, data, req, lam):
    """Copy of the result with distance_to_retrain filled in."""
    return replace(result, distance_to_retrain=distance_to_retrain(result, data, req, lam))


METHODS = ("retrain", "newton", "influence", "gradient", "residual")


def run_method(method, data, req, model_full, hat=None, gram=None, alpha=None):
    """Dispatch a method by tag with shared precomputed state.

    ``hat`` is required for the gradient and residual methods; ``gram``
    (full X^T X) is optional for newton and influence.  For the gradient
    method the timed region covers dk_predict plus the step, matching what
    a deletion request actually costs.
    """
    if method == "retrain":
        return retrain_exact(data, req, model_full.lam)
    if method == "newton":
        return newton_update(data, req, model_full, gram=gram)
    if method == "influence":
        return influence_update(data, req, model_full, gram=gram)
    if method in ("gradient", "residual"):
        if hat is None:
            raise ValueError(f"method {method!r} needs a HatState")
        if method == "residual":
            return residual_update(data, req, model_full, hat)
        t0 = time.perf_counter()
        yk = dk_predict(hat, data, req)
        out = gradient_update(data, req, model_full, yk, alpha=alpha)
        return replace(out, wall_time=time.perf_counter() - t0)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")

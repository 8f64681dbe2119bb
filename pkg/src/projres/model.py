"""Ridge-regularized least-squares model.

Closed-form training on the normal equations, prediction, and loss /
gradient / Hessian evaluation with an optional set of excluded rows.  The
loss is sum_i 0.5*(theta.x_i - y_i)^2 + (lam/2)*||theta||^2 with a
regularization strength that does not scale with the sample count.  There
is no intercept term; append a constant feature column if you need one.
"""

from dataclasses import dataclass, field

import numpy as np

from . import numerics

DEFAULT_LAMBDA = 1e-3


def _frozen(a):
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Dataset:
    """Feature matrix X (n rows, d columns) plus label vector Y (n)."""

    X: np.ndarray
    Y: np.ndarray
    feature_names: tuple | None = None

    def __post_init__(self):
        X = np.ascontiguousarray(self.X, dtype=np.float64)
        Y = np.ascontiguousarray(self.Y, dtype=np.float64)
        if X.ndim != 2:
            raise ValueError(f"X must be 2-dimensional, got shape {X.shape}")
        if Y.ndim != 1 or Y.shape[0] != X.shape[0]:
            raise ValueError(
                f"Y must be 1-dimensional with length {X.shape[0]}, "
                f"got shape {Y.shape}")
        if X.shape[0] < 1:
            raise ValueError("dataset must contain at least one row")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
            raise ValueError("dataset contains non-finite entries")
        if self.feature_names is not None:
            names = tuple(self.feature_names)
            if len(names) != X.shape[1]:
                raise ValueError(
                    f"{len(names)} feature names for {X.shape[1]} columns")
            object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "X", _frozen(X))
        object.__setattr__(self, "Y", _frozen(Y))

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def d(self):
        return self.X.shape[1]

    def restricted_to(self, keep_mask):
        """Dataset with only the rows where keep_mask is True."""
        names = self.feature_names
        return Dataset(self.X[keep_mask].copy(), self.Y[keep_mask].copy(), names)


@dataclass(frozen=True)
class RidgeModel:
    """Trained parameter vector and the penalty it was trained with."""

    theta: np.ndarray
    lam: float

    def __post_init__(self):
        theta = np.ascontiguousarray(self.theta, dtype=np.float64)
        if theta.ndim != 1:
            raise ValueError(f"theta must be 1-dimensional, got {theta.shape}")
        if not np.all(np.isfinite(theta)):
            raise ValueError("theta contains non-finite entries")
        object.__setattr__(self, "theta", _frozen(theta))

    @property
    def d(self):
        return self.theta.shape[0]


@dataclass(frozen=True)
class DeletionRequest:
    """Distinct row indices to delete, kept sorted."""

    indices: tuple = field(default=())

    def __post_init__(self):
        idx = tuple(sorted(int(i) for i in self.indices))
        if len(set(idx)) != len(idx):
            raise ValueError("deletion indices must be distinct")
        if idx and idx[0] < 0:
            raise ValueError(f"negative deletion index {idx[0]}")
        object.__setattr__(self, "indices", idx)

    @property
    def k(self):
        return len(self.indices)

    def check(self, n):
        if self.indices and self.indices[-1] >= n:
            raise IndexError(
                f"deletion index {self.indices[-1]} out of range for n={n}")
        if self.k >= n:
            raise ValueError(f"cannot delete {self.k} of {n} rows")

    def array(self):
        return np.asarray(self.indices, dtype=np.intp)

    def keep_mask(self, n):
        self.check(n)
        mask = np.ones(n, dtype=bool)
        mask[self.array()] = False
        return mask


def train_full(data, lam=DEFAULT_LAMBDA):
    """Fit ridge parameters by solving (X^T X + lam I) theta = X^T Y.

    lam = 0 is allowed when X has full column rank; otherwise the normal
    equations are singular and the solve raises NotPositiveDefiniteError.
    """
    if lam < 0:
        raise ValueError(f"lam must be nonnegative, got {lam}")
    gram = data.X.T @ data.X
    gram[np.diag_indices_from(gram)] += lam
    theta = numerics.spd_solve(gram, data.X.T @ data.Y)
    return RidgeModel(theta=theta, lam=float(lam))


def predict(model, x):
    """Raw regression score theta.x at a single point."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != model.theta.shape:
        raise ValueError(
            f"dimension mismatch: model d={model.d}, point shape {x.shape}")
    return float(model.theta @ x)


def predict_label(score):
    """Binary read-off of a regression score with the cutoff at zero:
    strictly positive scores are the +1 class, the rest are -1."""
    return 1 if score > 0.0 else -1


def loss_derivatives(data, exclude, model):
    """Loss, gradient, and Hessian of the ridge objective over the rows not
    in ``exclude``, evaluated at the model's parameters.

    Returns (loss, grad, hessian) with
    loss    = sum_kept 0.5*(theta.x_i - y_i)^2 + (lam/2)*||theta||^2,
    grad    = sum_kept (theta.x_i - y_i) x_i + lam*theta,
    hessian = X_kept^T X_kept + lam*I.
    """
    exclude = exclude if exclude is not None else DeletionRequest()
    mask = exclude.keep_mask(data.n) if exclude.k else np.ones(data.n, bool)
    Xk = data.X[mask]
    Yk = data.Y[mask]
    theta = model.theta
    err = Xk @ theta - Yk
    loss = 0.5 * float(err @ err) + 0.5 * model.lam * float(theta @ theta)
    grad = Xk.T @ err + model.lam * theta
    hessian = Xk.T @ Xk
    hessian[np.diag_indices_from(hessian)] += model.lam
    return loss, grad, hessian

"""Ridge model training, prediction, and loss derivatives."""

import numpy as np
import pytest

from conftest import random_regression
from projres import numerics
from projres.errors import NotPositiveDefiniteError
from projres.model import (
    Dataset,
    DeletionRequest,
    loss_derivatives,
    predict,
    predict_label,
    train_full,
)


def test_train_mean_of_labels():
    data = Dataset(np.array([[1.0], [1.0]]), np.array([0.0, 2.0]))
    model = train_full(data, lam=0.0)
    np.testing.assert_allclose(model.theta, [1.0], atol=1e-14)


def test_regularization_dominance():
    rng = np.random.default_rng(3)
    X, Y = random_regression(rng, 50, 6)
    data = Dataset(X, Y)
    model = train_full(data, lam=1e6)
    assert np.linalg.norm(model.theta) <= 1e-5 * np.linalg.norm(X.T @ Y)


def test_first_order_optimality():
    rng = np.random.default_rng(4)
    X, Y = random_regression(rng, 100, 10)
    data = Dataset(X, Y)
    model = train_full(data, lam=1e-3)
    _, grad, _ = loss_derivatives(data, DeletionRequest(), model)
    assert np.linalg.norm(grad) <= 1e-8 * (1.0 + np.linalg.norm(X.T @ Y))


def test_lambda_zero_rank_deficient_raises():
    data = Dataset(np.array([[1.0, 1.0], [2.0, 2.0]]), np.array([1.0, 2.0]))
    with pytest.raises(NotPositiveDefiniteError):
        train_full(data, lam=0.0)


def test_predict_zero_model():
    model = train_full(Dataset(np.eye(2), np.zeros(2)), lam=1.0)
    np.testing.assert_allclose(model.theta, 0.0)
    assert predict(model, np.array([3.0, -7.0])) == 0.0


def test_predict_hand_dot():
    from projres.model import RidgeModel
    model = RidgeModel(np.array([1.0, 2.0]), 1.0)
    assert predict(model, np.array([3.0, 4.0])) == 11.0


def test_predict_label_cutoff_zero():
    assert predict_label(-0.5) == -1
    assert predict_label(0.7) == 1
    assert predict_label(0.0) == -1


def test_predict_dimension_mismatch():
    from projres.model import RidgeModel
    model = RidgeModel(np.array([1.0, 2.0]), 1.0)
    with pytest.raises(ValueError, match="mismatch"):
        predict(model, np.array([1.0, 2.0, 3.0]))


def test_loss_single_point_hand():
    from projres.model import RidgeModel
    data = Dataset(np.array([[1.0, 0.0]]), np.array([1.0]))
    model = RidgeModel(np.zeros(2), 0.0)
    loss, grad, hess = loss_derivatives(data, DeletionRequest(), model)
    assert loss == 0.5
    np.testing.assert_allclose(grad, [-1.0, 0.0])
    np.testing.assert_allclose(hess, [[1.0, 0.0], [0.0, 0.0]])


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(11)
    from projres.model import RidgeModel
    for _ in range(20):
        n = int(rng.integers(5, 30))
        d = int(rng.integers(2, 8))
        X, Y = random_regression(rng, n, d)
        data = Dataset(X, Y)
        theta = rng.standard_normal(d)
        lam = float(rng.uniform(0.0, 2.0))
        model = RidgeModel(theta, lam)
        k = int(rng.integers(0, min(3, n - 1) + 1))
        exclude = DeletionRequest(
            sorted(int(i) for i in rng.choice(n, k, replace=False)))
        _, grad, _ = loss_derivatives(data, exclude, model)
        h = 1e-6
        fd = np.empty(d)
        for j in range(d):
            e = np.zeros(d)
            e[j] = h
            lp, _, _ = loss_derivatives(data, exclude, RidgeModel(theta + e, lam))
            lm, _, _ = loss_derivatives(data, exclude, RidgeModel(theta - e, lam))
            fd[j] = (lp - lm) / (2.0 * h)
        scale = max(1.0, np.linalg.norm(grad))
        assert np.linalg.norm(fd - grad) <= 1e-6 * scale


def test_hessian_is_spd_for_positive_lambda():
    rng = np.random.default_rng(12)
    X, Y = random_regression(rng, 20, 6)
    data = Dataset(X, Y)
    model = train_full(data, lam=0.5)
    _, _, hess = loss_derivatives(data, DeletionRequest(), model)
    # all Cholesky pivots positive <=> the factorization succeeds
    numerics.spd_solve(hess, np.ones(6))


def test_exclusion_equals_physical_removal():
    rng = np.random.default_rng(13)
    X, Y = random_regression(rng, 40, 5)
    data = Dataset(X, Y)
    req = DeletionRequest([3, 7, 20])
    lam = 0.2

    # train via normal equations assembled with exclusion semantics
    model_probe = train_full(data, lam)  # any theta works for hess/rhs assembly
    _, _, hess = loss_derivatives(data, req, model_probe)
    mask = req.keep_mask(data.n)
    rhs = data.X[mask].T @ data.Y[mask]
    theta_excl = numerics.spd_solve(hess, rhs)

    theta_phys = train_full(data.restricted_to(mask), lam).theta
    np.testing.assert_allclose(theta_excl, theta_phys, atol=1e-12)


class TestDatasetValidation:
    def test_rejects_nan(self):
        with pytest.raises(ValueError, match="non-finite"):
            Dataset(np.array([[np.nan]]), np.array([1.0]))

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError):
            Dataset(np.ones((2, 2)), np.ones(3))

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            Dataset(np.ones((0, 2)), np.ones(0))

    def test_arrays_are_frozen(self):
        data = Dataset(np.ones((2, 2)), np.ones(2))
        with pytest.raises(ValueError):
            data.X[0, 0] = 5.0


class TestDeletionRequest:
    def test_sorted_unique(self):
        req = DeletionRequest([5, 1, 3])
        assert req.indices == (1, 3, 5)
        assert req.k == 3

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError, match="distinct"):
            DeletionRequest([1, 1])

    def test_range_check(self):
        with pytest.raises(IndexError):
            DeletionRequest([10]).check(5)

    def test_cannot_delete_everything(self):
        with pytest.raises(ValueError):
            DeletionRequest([0, 1]).check(2)

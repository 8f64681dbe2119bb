"""Last-layer unlearning behind a frozen feature map.

A deterministic feature map turns raw inputs into feature vectors, a linear
head is trained on the encoded features, and every unlearning method applies
to the head in encoded space.  The map is frozen during unlearning, which is
what makes the linear machinery exact: with the identity map this reduces
bit-for-bit to the plain-model methods.

Map kinds: ``identity``; ``random-projection`` (seeded Gaussian matrix
scaled by 1/sqrt(dim_out)); ``precomputed-table`` (row-indexed feature vectors from a
numeric CSV with no label column, e.g. embeddings exported from a frozen
network).
"""

import time
from dataclasses import dataclass, replace

import numpy as np

from .data import load_feature_table
from .leverage import dk_predict, hat_matrix
from .model import Dataset, RidgeModel, predict_label
from .unlearn import METHODS, gradient_update, run_method

KINDS = ("identity", "random-projection", "precomputed-table")


@dataclass(frozen=True)
class FeatureMap:
    kind: str
    dim_out: int | None = None
    seed: int | None = None
    table_path: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown feature map kind {self.kind!r}")
        if self.kind == "random-projection":
            if not self.dim_out or self.dim_out < 1:
                raise ValueError("random projection needs dim_out >= 1")
            if self.seed is None:
                raise ValueError("random projection needs a seed")
        if self.kind == "precomputed-table" and not self.table_path:
            raise ValueError("table map needs a table_path")


def identity_map():
    return FeatureMap(kind="identity")


def random_projection_map(dim_out, seed):
    return FeatureMap(kind="random-projection", dim_out=dim_out, seed=seed)


def table_map(path):
    return FeatureMap(kind="precomputed-table", table_path=str(path))


def encode(fmap, data):
    """Apply a feature map to a dataset; labels pass through unchanged.

    Identity returns the dataset object itself so downstream computations
    are bitwise identical to the plain-model path.  Encoding is a pure
    function of (map, input): the projection matrix is regenerated from the
    seed on every call.
    """
    if fmap.kind == "identity":
        return data
    if fmap.kind == "random-projection":
        rng = np.random.default_rng(fmap.seed)
        R = rng.standard_normal((data.d, fmap.dim_out)) / np.sqrt(fmap.dim_out)
        return Dataset(data.X @ R, data.Y.copy())
    table = load_feature_table(fmap.table_path)
    if table.shape[0] != data.n:
        raise ValueError(
            f"feature table has {table.shape[0]} rows for {data.n} inputs")
    return Dataset(table, data.Y.copy())


def train_head(fmap, data, lam):
    """Encode and fit the linear head; returns (encoded dataset, hat state,
    head model)."""
    enc = encode(fmap, data)
    hat = hat_matrix(enc, lam)
    return enc, hat, RidgeModel(hat.theta_full, lam)


def unlearn_head(fmap, data, req, method, lam, alpha=None, rounds=1):
    """Apply one unlearning method to the head in encoded space.

    ``rounds`` > 1 repeats the scalar gradient step from the running
    parameters (the leave-k-out labels are fixed); all other methods are
    single-shot by construction and ignore it.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    enc, hat, head = train_head(fmap, data, lam)
    if method == "gradient" and rounds > 1:
        t0 = time.perf_counter()
        yk = dk_predict(hat, enc, req)
        current = head
        for _ in range(rounds):
            step = gradient_update(enc, req, current, yk, alpha=alpha)
            current = RidgeModel(step.theta_new, lam)
        return replace(step, wall_time=time.perf_counter() - t0)
    return run_method(method, enc, req, head, hat=hat, alpha=alpha)


def head_accuracy(model, data):
    """Classification accuracy of sign read-offs against +/-1 labels."""
    scores = data.X @ model.theta
    labels = np.asarray([predict_label(s) for s in scores], dtype=np.float64)
    return float(np.mean(labels == data.Y))


def accuracy_impact(fmap, train, heldout, req, lam, method="residual"):
    """Held-out accuracy of the full head vs the head after unlearning.

    Returns (full_accuracy, after_accuracy).  The held-out set is encoded
    with the same frozen map.
    """
    enc_train, hat, head = train_head(fmap, train, lam)
    result = run_method(method, enc_train, req, head, hat=hat)
    enc_held = encode(fmap, heldout)
    return (head_accuracy(head, enc_held),
            head_accuracy(RidgeModel(result.theta_new, lam), enc_held))

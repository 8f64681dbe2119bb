"""End-to-end review-classification workflow: corpus -> count vectors ->
binarized labels -> ridge head -> deletion methods."""

import numpy as np

from projres.data import Corpus, binarize_labels, build_bow
from projres.leverage import dk_predict, hat_matrix
from projres.model import Dataset, DeletionRequest, RidgeModel, predict_label
from projres.unlearn import newton_update, residual_update, retrain_exact

POSITIVE = ["great product works perfectly", "love it excellent quality",
            "fantastic value highly recommend", "works great very happy",
            "superb quality love the design", "excellent purchase would buy again"]
NEGATIVE = ["terrible broke after one day", "awful quality waste of money",
            "very disappointed poor build", "stopped working bad support",
            "horrible experience would not recommend", "cheap plastic broke fast"]


def make_review_corpus(n=120, seed=77):
    rng = np.random.default_rng(seed)
    docs = []
    scores = []
    for i in range(n):
        if rng.random() < 0.5:
            base = POSITIVE[int(rng.integers(len(POSITIVE)))]
            score = int(rng.integers(4, 6))
        else:
            base = NEGATIVE[int(rng.integers(len(NEGATIVE)))]
            score = int(rng.integers(1, 4))
        filler = " ".join(f"item{int(rng.integers(30))}" for _ in range(3))
        docs.append((f"{base} {filler}", str(score)))
        scores.append(score)
    return Corpus(tuple(docs)), scores


def test_review_pipeline_end_to_end():
    corpus, scores = make_review_corpus()
    vocab, counts = build_bow(corpus, vocab_cap=200)
    labels = binarize_labels(scores)
    data = Dataset(counts.X, labels, feature_names=vocab.terms)
    lam = 1.0

    hat = hat_matrix(data, lam)
    model = RidgeModel(hat.theta_full, lam)

    # the count-vector classifier separates the sentiment classes
    preds = np.array([predict_label(s) for s in data.X @ model.theta])
    assert np.mean(preds == labels) >= 0.95

    # delete a handful of reviews: leave-k-out labels match retraining and
    # the one-step methods land on (newton) or near (residual) the oracle
    rng = np.random.default_rng(5)
    req = DeletionRequest(sorted(int(i) for i in rng.choice(data.n, 6, replace=False)))
    oracle = retrain_exact(data, req, lam)
    yk = dk_predict(hat, data, req)
    assert np.max(np.abs(yk - data.X[req.array()] @ oracle.theta_new)) <= 1e-8

    newton = newton_update(data, req, model)
    err = np.linalg.norm(newton.theta_new - oracle.theta_new)
    assert err <= 1e-10 * (1.0 + np.linalg.norm(oracle.theta_new))

    res = residual_update(data, req, model, hat)
    assert (np.linalg.norm(res.theta_new - oracle.theta_new)
            <= np.linalg.norm(model.theta - oracle.theta_new) + 1e-12)


def test_vocab_cap_default_matches_distinct_terms():
    corpus, _ = make_review_corpus(n=40)
    vocab, data = build_bow(corpus)
    distinct = len({t for text, _ in corpus.documents
                    for t in text.lower().split()})
    assert len(vocab) == min(1600, distinct)
    assert data.d == len(vocab)

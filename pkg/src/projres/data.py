"""Dataset acquisition: numeric CSV files, text corpora with bag-of-words
count vectors, label binarization, synthetic sparse generation, and light
text augmentation.

File formats
------------
Numeric CSV: comma separated, '.' decimal point, optional single header row,
last column is the label.  Feature tables are the same minus the label
column.  Text corpora are two-column CSV ``label,text`` with RFC-4180
quoting.
"""

import csv
import math
import re
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import DataFormatError
from .model import Dataset

_TOKEN = re.compile(r"[a-z0-9]+")

DEFAULT_VOCAB_CAP = 1600


def tokenize(text):
    """Lowercase and split on non-alphanumeric characters."""
    return _TOKEN.findall(text.lower())


@dataclass(frozen=True)
class Corpus:
    """Sequence of (text, raw label) records."""

    documents: tuple

    def __post_init__(self):
        docs = tuple((str(t), str(l)) for t, l in self.documents)
        if not docs:
            raise DataFormatError("corpus is empty")
        object.__setattr__(self, "documents", docs)

    def __len__(self):
        return len(self.documents)

    @property
    def texts(self):
        return [t for t, _ in self.documents]

    @property
    def labels(self):
        return [l for _, l in self.documents]


@dataclass(frozen=True)
class Vocabulary:
    """Terms ordered by descending corpus frequency (ties lexicographic),
    truncated to the cap."""

    terms: tuple

    def __post_init__(self):
        terms = tuple(self.terms)
        if len(set(terms)) != len(terms):
            raise DataFormatError("vocabulary terms must be unique")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(terms)})

    def __len__(self):
        return len(self.terms)

    def index(self, term):
        return self._index.get(term)


def _numeric_rows(path, header):
    rows = []
    width = None
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, raw in enumerate(reader, start=1):
            if header and lineno == 1:
                continue
            if not raw or (len(raw) == 1 and raw[0].strip() == ""):
                continue
            try:
                vals = [float(v) for v in raw]
            except ValueError as exc:
                raise DataFormatError(f"{path}: row {lineno}: {exc}") from exc
            for v in vals:
                if not math.isfinite(v):
                    raise DataFormatError(
                        f"{path}: row {lineno}: non-finite value {v!r}")
            if width is None:
                width = len(vals)
            elif len(vals) != width:
                raise DataFormatError(
                    f"{path}: row {lineno}: expected {width} columns, "
                    f"got {len(vals)}")
            rows.append(vals)
    if not rows:
        raise DataFormatError(f"{path}: no data rows")
    return np.asarray(rows, dtype=np.float64)


def load_numeric_csv(path, header=False):
    """Numeric CSV into a Dataset; the last column is the label."""
    arr = _numeric_rows(path, header)
    if arr.shape[1] < 2:
        raise DataFormatError(
            f"{path}: need at least one feature column plus the label")
    return Dataset(arr[:, :-1].copy(), arr[:, -1].copy())


def load_feature_table(path, header=False):
    """Numeric CSV into a plain feature array (no label column)."""
    return _numeric_rows(path, header)


def save_numeric_csv(data, path, header=False):
    """Write a Dataset in the same format load_numeric_csv reads."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if header:
            names = data.feature_names or tuple(
                f"f{i}" for i in range(data.d))
            fh.write(",".join([*names, "label"]) + "\n")
        block = np.column_stack([data.X, data.Y])
        np.savetxt(fh, block, fmt="%.17g", delimiter=",")


def load_corpus_csv(path):
    """Two-column ``label,text`` CSV into a Corpus."""
    docs = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, raw in enumerate(reader, start=1):
            if not raw:
                continue
            if len(raw) != 2:
                raise DataFormatError(
                    f"{path}: row {lineno}: expected 'label,text', "
                    f"got {len(raw)} fields")
            docs.append((raw[1], raw[0]))
    if not docs:
        raise DataFormatError(f"{path}: no records")
    return Corpus(tuple(docs))


def _labels_to_floats(labels):
    try:
        return np.asarray([float(l) for l in labels], dtype=np.float64)
    except ValueError:
        codes = {name: float(i) for i, name in enumerate(sorted(set(labels)))}
        return np.asarray([codes[l] for l in labels], dtype=np.float64)


def build_bow(corpus, vocab_cap=DEFAULT_VOCAB_CAP):
    """Count-vectorize a corpus against its own most frequent terms.

    The vocabulary keeps the vocab_cap highest-frequency terms (ties broken
    lexicographically); each document becomes a vector of in-vocabulary
    token counts, out-of-vocabulary tokens are dropped.  Category-name
    labels are mapped to stable integer codes.
    """
    if vocab_cap < 1:
        raise ValueError(f"vocab_cap must be >= 1, got {vocab_cap}")
    freq = Counter()
    tokenized = []
    for text, _ in corpus.documents:
        toks = tokenize(text)
        tokenized.append(toks)
        freq.update(toks)
    ranked = sorted(freq.items(), key=lambda kv: (-kv[1], kv[0]))
    vocab = Vocabulary(tuple(term for term, _ in ranked[:vocab_cap]))
    X = np.zeros((len(corpus), len(vocab)), dtype=np.float64)
    for row, toks in enumerate(tokenized):
        for tok in toks:
            col = vocab.index(tok)
            if col is not None:
                X[row, col] += 1.0
    Y = _labels_to_floats(corpus.labels)
    return vocab, Dataset(X, Y, feature_names=vocab.terms)


def binarize_labels(scores, low=1, high=5, favorable_from=4):
    """Map integer scores to +/-1: scores of favorable_from and above are
    +1, the rest -1.  Scores outside [low, high] are rejected."""
    out = np.empty(len(scores), dtype=np.float64)
    for i, s in enumerate(scores):
        s = int(s)
        if s < low or s > high:
            raise ValueError(
                f"score {s} at position {i} outside [{low}, {high}]")
        out[i] = 1.0 if s >= favorable_from else -1.0
    return out


def gen_synthetic_sparse(n, d, p, seed, noise=0.1):
    """Sparse Gaussian design with linear labels.

    Each feature entry is nonzero with probability p (standard normal when
    present); labels are y = X theta_star + noise * eps with theta_star and
    eps standard normal.  Fully deterministic given the seed.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must be in (0, 1], got {p}")
    if n < 1 or d < 1:
        raise ValueError(f"n and d must be positive, got n={n}, d={d}")
    rng = np.random.default_rng(seed)
    mask = rng.random((n, d)) < p
    X = rng.standard_normal((n, d))
    X *= mask
    theta_star = rng.standard_normal(d)
    Y = X @ theta_star + noise * rng.standard_normal(n)
    return Dataset(X, Y)


def augment_dropout(corpus, drop_prob, seed, shuffle=False):
    """Word-dropout augmentation: each whitespace token is independently
    dropped with probability drop_prob; with shuffle=True the surviving
    tokens are permuted.  Labels are preserved."""
    if not 0.0 <= drop_prob < 1.0:
        raise ValueError(f"drop_prob must be in [0, 1), got {drop_prob}")
    if drop_prob == 0.0 and not shuffle:
        return corpus
    rng = np.random.default_rng(seed)
    docs = []
    for text, label in corpus.documents:
        toks = text.split()
        if drop_prob > 0.0 and toks:
            keep = rng.random(len(toks)) >= drop_prob
            toks = [t for t, k in zip(toks, keep) if k]
        if shuffle and toks:
            toks = [toks[i] for i in rng.permutation(len(toks))]
        docs.append((" ".join(toks), label))
    return Corpus(tuple(docs))

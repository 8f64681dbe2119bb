"""Feature Injection Test harness.

Protocol per trial: generate a synthetic classification dataset, plant an
extra feature that is zero everywhere except on a target group, where it
copies the group's labels, train the full model, delete the group with each
unlearning method, and score a method by the absolute weight it leaves on
the planted feature.  Retraining drives that weight to exactly zero (the
column is identically zero in the remaining rows and the ridge penalty kills
it), so lower scores mean more thorough deletion.

Scores are meaningful under stringent regularization: the suite defaults to
lam = 10, much stiffer than the model default, so that the planted weight
is cheap to re-zero and what survives a method is genuine leftover signal.
Reports carry raw scores and scores normalized by the full-model baseline
weight.
"""

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from statistics import mean, median

import numpy as np

from .data import gen_synthetic_sparse
from .errors import DegenerateDeletionError
from .leverage import hat_matrix
from .model import Dataset, DeletionRequest, RidgeModel
from .unlearn import METHODS, run_method

DEFAULT_FIT_LAMBDA = 10.0


@dataclass(frozen=True)
class FitTrialConfig:
    """Shape of one family of FIT trials."""

    n: int
    d: int
    k: int
    p: float
    lam: float = DEFAULT_FIT_LAMBDA
    seed: int = 0
    methods: tuple = METHODS
    signal_scale: float = 1.0
    classify: bool = True
    noise: float = 0.1

    def __post_init__(self):
        if not 1 <= self.k < self.n:
            raise ValueError(f"need 1 <= k < n, got k={self.k}, n={self.n}")
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"p must be in (0, 1], got {self.p}")
        if self.lam <= 0:
            raise ValueError("FIT requires a positive penalty")
        bad = set(self.methods) - set(METHODS)
        if bad:
            raise ValueError(f"unknown methods {sorted(bad)}")
        object.__setattr__(self, "methods", tuple(self.methods))


def inject_feature(data, group, scale=1.0):
    """Dataset with one extra column: scale * y_i on the group rows, zero
    elsewhere."""
    if group.k < 1:
        raise ValueError("injection group must be nonempty")
    group.check(data.n)
    col = np.zeros(data.n)
    idx = group.array()
    col[idx] = scale * data.Y[idx]
    X = np.hstack([data.X, col[:, None]])
    names = None
    if data.feature_names is not None:
        names = (*data.feature_names, "injected")
    return Dataset(X, data.Y.copy(), feature_names=names)


def fit_score(theta, injected_index):
    """Absolute surviving weight on the injected feature; 0 is perfect."""
    theta = np.asarray(theta, dtype=np.float64)
    if not 0 <= injected_index < theta.shape[0]:
        raise IndexError(
            f"injected index {injected_index} out of range for d={theta.shape[0]}")
    return abs(float(theta[injected_index]))


@dataclass
class MethodAggregate:
    scores: list = field(default_factory=list)
    times_s: list = field(default_factory=list)
    failures: int = 0
    errors: list = field(default_factory=list)

    @property
    def mean_fit(self):
        return mean(self.scores) if self.scores else float("nan")

    @property
    def median_fit(self):
        return median(self.scores) if self.scores else float("nan")

    @property
    def mean_time_ms(self):
        return 1e3 * mean(self.times_s) if self.times_s else float("nan")


@dataclass
class FitReport:
    """Per-method injected-feature weights over a family of trials."""

    config: FitTrialConfig
    trials: int
    per_method: dict
    baseline_weights: list

    @property
    def baseline_mean(self):
        return mean(self.baseline_weights)

    @property
    def baseline_median(self):
        return median(self.baseline_weights)

    def mean_fit(self, method):
        return self.per_method[method].mean_fit

    def median_fit(self, method):
        return self.per_method[method].median_fit

    def ratio_mean(self, method):
        base = self.baseline_mean
        return self.per_method[method].mean_fit / base if base else float("nan")

    def to_dict(self):
        cfg = self.config
        return {
            "config": {
                "n": cfg.n, "d": cfg.d, "k": cfg.k, "p": cfg.p,
                "lambda": cfg.lam, "seed": cfg.seed,
                "signal_scale": cfg.signal_scale, "classify": cfg.classify,
                "noise": cfg.noise, "methods": list(cfg.methods),
            },
            "trials": self.trials,
            "baseline": {
                "mean_weight": self.baseline_mean,
                "median_weight": self.baseline_median,
                "weights": list(self.baseline_weights),
            },
            "methods": {
                m: {
                    "mean_fit": agg.mean_fit,
                    "median_fit": agg.median_fit,
                    "ratio_to_baseline": self.ratio_mean(m),
                    "mean_time_ms": agg.mean_time_ms,
                    "failures": agg.failures,
                    "errors": [list(e) for e in agg.errors],
                    "scores": list(agg.scores),
                }
                for m, agg in self.per_method.items()
            },
        }

    def write_json(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    def csv_rows(self):
        cfg = self.config
        for m in cfg.methods:
            agg = self.per_method[m]
            yield {
                "method": m, "d": cfg.d, "k": cfg.k, "p": cfg.p,
                "trials": self.trials,
                "mean_fit": agg.mean_fit,
                "median_fit": agg.median_fit,
                "mean_time_ms": agg.mean_time_ms,
            }

    def write_csv(self, path):
        fields = ["method", "d", "k", "p", "trials",
                  "mean_fit", "median_fit", "mean_time_ms"]
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=fields)
            writer.writeheader()
            for row in self.csv_rows():
                writer.writerow(row)


def _run_trial(config, trial_seed):
    """One seeded trial; returns (baseline weight, {method: (score, secs)},
    {method: error})."""
    s_data, s_group = trial_seed.spawn(2)
    base = gen_synthetic_sparse(config.n, config.d, config.p, seed=s_data,
                                noise=config.noise)
    if config.classify:
        base = Dataset(base.X, np.where(base.Y > 0, 1.0, -1.0))
    rng = np.random.default_rng(s_group)
    group = DeletionRequest(
        sorted(int(i) for i in rng.choice(config.n, config.k, replace=False)))
    injected = inject_feature(base, group, scale=config.signal_scale)
    j = injected.d - 1

    hat = hat_matrix(injected, config.lam)
    model_full = RidgeModel(hat.theta_full, config.lam)
    gram = None
    if "newton" in config.methods or "influence" in config.methods:
        gram = injected.X.T @ injected.X

    scores, errors = {}, {}
    for m in config.methods:
        try:
            result = run_method(m, injected, group, model_full,
                                hat=hat, gram=gram)
        except DegenerateDeletionError as exc:
            errors[m] = str(exc)
            continue
        scores[m] = (fit_score(result.theta_new, j), result.wall_time)
    return fit_score(model_full.theta, j), scores, errors


def run_fit_suite(config, trials, parallel=None):
    """Run ``trials`` independent seeded trials of the config and aggregate.

    Deterministic given config.seed: trial seeds are spawned up front and
    results are folded in trial order, so the report is identical whether
    trials run serially or on ``parallel`` worker threads.  Degenerate
    deletions are recorded per trial and method, not fatal.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    seeds = np.random.SeedSequence(config.seed).spawn(trials)
    if parallel and parallel > 1:
        with ThreadPoolExecutor(max_workers=parallel) as pool:
            outcomes = list(pool.map(lambda s: _run_trial(config, s), seeds))
    else:
        outcomes = [_run_trial(config, s) for s in seeds]

    per_method = {m: MethodAggregate() for m in config.methods}
    baselines = []
    for trial, (baseline, scores, errors) in enumerate(outcomes):
        baselines.append(baseline)
        for m in config.methods:
            if m in scores:
                score, secs = scores[m]
                per_method[m].scores.append(score)
                per_method[m].times_s.append(secs)
            else:
                per_method[m].failures += 1
                per_method[m].errors.append((trial, errors.get(m, "")))
    return FitReport(config=config, trials=trials, per_method=per_method,
                     baseline_weights=baselines)

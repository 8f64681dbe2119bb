"""Benchmark runner.

Two benchmarks live here:

* ``run_bench`` times the unlearning methods across a sweep of dataset
  sizes.  The timed region is each method's own per-request work; the
  deletion-independent precomputation (Gram matrix, hat state, full model)
  happens outside it unless ``include_precompute`` is set.  Medians over
  repeated runs on a monotonic clock; a warmup run precedes the
  measurements.

* ``kernel_bench`` races the compiled kernel backend against the numpy
  fallback on the four dense kernels, which is the honest answer to "was
  the extension worth compiling": the compiled loops win on the small
  per-request problems, BLAS-backed fallbacks win on large factorizations.
"""

import csv
import json
import statistics
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from threadpoolctl import threadpool_limits

from . import kernels
from .data import gen_synthetic_sparse
from .leverage import hat_matrix
from .model import DeletionRequest, RidgeModel
from .unlearn import METHODS, retrain_exact, run_method

DEFAULT_REPS = 5


@dataclass(frozen=True)
class BenchRow:
    method: str
    n: int
    d: int
    k: int
    reps: int
    median_time_s: float
    distance_to_retrain: float
    fit_score: float | None = None


@dataclass
class BenchReport:
    rows: list
    meta: dict = field(default_factory=dict)

    def to_dict(self):
        return {"meta": self.meta, "rows": [asdict(r) for r in self.rows]}

    def write_json(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    def write_csv(self, path):
        fields = ["method", "n", "d", "k", "reps", "median_time_s",
                  "distance_to_retrain", "fit_score"]
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=fields)
            writer.writeheader()
            for row in self.rows:
                writer.writerow(asdict(row))

    def times(self, method):
        """n -> median seconds for one method, in sweep order."""
        return {r.n: r.median_time_s for r in self.rows if r.method == method}


def _validate_methods(methods):
    methods = tuple(methods)
    bad = set(methods) - set(METHODS)
    if bad:
        raise ValueError(f"unknown methods {sorted(bad)}")
    return methods


def run_bench(n_sweep, d, k, methods, reps=DEFAULT_REPS, seed=0, lam=1e-3,
              p=1.0, include_precompute=False, parent_seed=None):
    """Median per-request times for each (method, n) pair.

    Data is regenerated per n from seeds derived from ``seed``; the same
    deletion request size k applies throughout.  The retrain oracle is
    computed once per n (untimed) to fill the distance column.
    """
    methods = _validate_methods(methods)
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    root = np.random.SeedSequence(seed if parent_seed is None else parent_seed)
    rows = []
    for n, child in zip(n_sweep, root.spawn(len(n_sweep))):
        if k >= n:
            raise ValueError(f"k={k} must be below n={n}")
        s_data, s_req = child.spawn(2)
        data = gen_synthetic_sparse(n, d, p, seed=s_data)
        rng = np.random.default_rng(s_req)
        req = DeletionRequest(
            sorted(int(i) for i in rng.choice(n, k, replace=False)))

        gram = data.X.T @ data.X
        hat = hat_matrix(data, lam, gram=gram)
        model_full = RidgeModel(hat.theta_full, lam)
        oracle = retrain_exact(data, req, lam)

        for method in methods:
            if include_precompute:
                def timed_once():
                    t0 = time.perf_counter()
                    g = data.X.T @ data.X
                    h = hat_matrix(data, lam, gram=g)
                    m = RidgeModel(h.theta_full, lam)
                    out = run_method(method, data, req, m, hat=h, gram=g)
                    return out, time.perf_counter() - t0
            else:
                def timed_once():
                    out = run_method(method, data, req, model_full,
                                     hat=hat, gram=gram)
                    return out, out.wall_time

            # timed measurements run alone on one thread: BLAS pool churn on
            # a busy box otherwise dominates sub-millisecond regions
            with threadpool_limits(limits=1):
                timed_once()  # warmup, excluded
                samples = []
                result = None
                for _ in range(reps):
                    result, elapsed = timed_once()
                    samples.append(elapsed)
            rows.append(BenchRow(
                method=method, n=n, d=d, k=k, reps=reps,
                median_time_s=statistics.median(samples),
                distance_to_retrain=float(
                    np.linalg.norm(result.theta_new - oracle.theta_new)),
            ))
    meta = {
        "seed": seed, "reps": reps, "d": d, "k": k, "lambda": lam, "p": p,
        "n_sweep": list(n_sweep), "methods": list(methods),
        "include_precompute": include_precompute,
        "single_threaded_timing": True,
        "kernel_backend": kernels.BACKEND,
    }
    return BenchReport(rows=rows, meta=meta)


KERNEL_CASES = (
    ("mgs", {"k": 20, "d": 500}),
    ("mgs", {"k": 80, "d": 500}),
    ("jacobi_eig", {"m": 40}),
    ("jacobi_eig", {"m": 80}),
    ("cholesky_solve", {"m": 100}),
    ("cholesky_solve", {"m": 500}),
    ("lu_solve", {"m": 40}),
    ("lu_solve", {"m": 120}),
)


def _kernel_problem(name, params, rng):
    if name == "mgs":
        x = rng.standard_normal((params["k"], params["d"]))
        return lambda impl: impl.mgs(x, 1e-10)
    if name == "jacobi_eig":
        a = rng.standard_normal((params["m"], params["m"]))
        a = (a + a.T) / 2.0
        return lambda impl: impl.jacobi_eig(a)
    if name == "cholesky_solve":
        m = params["m"]
        g = rng.standard_normal((m, m))
        spd = g @ g.T + m * np.eye(m)
        b = rng.standard_normal(m)
        return lambda impl: impl.cholesky_solve(spd, b)
    if name == "lu_solve":
        m = params["m"]
        a = rng.standard_normal((m, m)) + m * np.eye(m)
        b = rng.standard_normal(m)
        return lambda impl: impl.lu_solve(a, b, 1e-12)
    raise ValueError(f"unknown kernel {name!r}")


def kernel_bench(cases=KERNEL_CASES, reps=DEFAULT_REPS, seed=0):
    """Backend shoot-out rows: (kernel, params, backend, median seconds)."""
    rows = []
    rng = np.random.default_rng(seed)
    for name, params in cases:
        call = _kernel_problem(name, params, rng)
        for backend in kernels.available_backends():
            impl = kernels.get_backend(backend)
            call(impl)  # warmup
            samples = []
            for _ in range(reps):
                t0 = time.perf_counter()
                call(impl)
                samples.append(time.perf_counter() - t0)
            rows.append({
                "kernel": name,
                "params": json.dumps(params, sort_keys=True),
                "backend": backend,
                "median_time_s": statistics.median(samples),
            })
    return rows


def write_kernel_bench_csv(rows, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=["kernel", "params", "backend", "median_time_s"])
        writer.writeheader()
        for row in rows:
            writer.writerow(row)

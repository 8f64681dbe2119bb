"""Command-line surface.

Subcommands: ``gen-data`` (synthetic CSV), ``unlearn`` (run deletion methods
on a CSV dataset), ``fit`` (feature-injection suites), ``bench`` (method
timing sweeps), ``kernel-bench`` (compiled vs fallback kernels).

Exit codes: 0 success, 2 usage error, 3 data error, 4 degenerate deletion.
UNLEARN_SEED is the seed fallback when --seed is not given.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import __version__, kernels
from .bench import kernel_bench, run_bench, write_kernel_bench_csv
from .data import gen_synthetic_sparse, load_numeric_csv, save_numeric_csv
from .errors import DataFormatError, DegenerateDeletionError
from .fit import DEFAULT_FIT_LAMBDA, FitTrialConfig, run_fit_suite
from .leverage import hat_matrix
from .model import DEFAULT_LAMBDA, DeletionRequest, RidgeModel
from .unlearn import METHODS, run_method, with_distance

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_DEGENERATE = 4


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _probability(text):
    value = float(text)
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError(f"expected p in (0, 1], got {text}")
    return value


def _positive_float(text):
    value = float(text)
    if not value > 0.0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _nonneg_float(text):
    value = float(text)
    if value < 0.0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative number, got {text}")
    return value


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from exc


def _method_list(text):
    if text.strip() == "all":
        return list(METHODS)
    methods = [m.strip() for m in text.split(",") if m.strip()]
    bad = set(methods) - set(METHODS)
    if bad:
        raise argparse.ArgumentTypeError(
            f"unknown methods {sorted(bad)}; choose from {', '.join(METHODS)} or 'all'")
    return methods


def _seed_default(value):
    if value is not None:
        return value
    return int(os.environ.get("UNLEARN_SEED", "0"))


def _parse_delete(spec, n, seed):
    """Deletion spec: 'i,j,k' or a bare integer names explicit row indices;
    'random:N' samples N rows with the run's seed; 'first:N' takes rows
    0..N-1."""
    spec = spec.strip()
    if spec.startswith("random:"):
        count = int(spec.split(":", 1)[1])
        if not 1 <= count < n:
            raise ValueError(f"random deletion count {count} out of range for n={n}")
        rng = np.random.default_rng(seed)
        return DeletionRequest(sorted(int(i) for i in rng.choice(n, count, replace=False)))
    if spec.startswith("first:"):
        count = int(spec.split(":", 1)[1])
        if not 1 <= count < n:
            raise ValueError(f"deletion count {count} out of range for n={n}")
        return DeletionRequest(range(count))
    return DeletionRequest(_int_list(spec))


def _cmd_gen_data(args):
    seed = _seed_default(args.seed)
    data = gen_synthetic_sparse(args.n, args.d, args.p, seed=seed)
    save_numeric_csv(data, args.out)
    print(f"wrote {args.n}x{args.d + 1} CSV (features + label) to {args.out}")
    return EXIT_OK


def _cmd_unlearn(args):
    seed = _seed_default(args.seed)
    data = load_numeric_csv(args.data, header=args.header)
    req = _parse_delete(args.delete, data.n, seed)
    req.check(data.n)
    methods = _method_list(args.method)

    gram = data.X.T @ data.X
    hat = hat_matrix(data, args.lam, gram=gram)
    model_full = RidgeModel(hat.theta_full, args.lam)

    reports = []
    for method in methods:
        result = run_method(method, data, req, model_full,
                            hat=hat, gram=gram, alpha=args.alpha)
        result = with_distance(result, data, req, args.lam)
        reports.append({
            "method": method,
            "k": req.k,
            "n": data.n,
            "d": data.d,
            "lambda": args.lam,
            "theta_delta_norm": float(np.linalg.norm(result.theta_new - model_full.theta)),
            "wall_time_s": result.wall_time,
            "distance_to_retrain": result.distance_to_retrain,
        })
    if args.json:
        json.dump({"seed": seed, "delete": list(req.indices),
                   "kernel_backend": kernels.BACKEND, "results": reports},
                  sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        for r in reports:
            print(f"{r['method']:>9}: |dtheta| = {r['theta_delta_norm']:.6e}  "
                  f"time = {r['wall_time_s'] * 1e3:.3f} ms  "
                  f"dist(retrain) = {r['distance_to_retrain']:.3e}")
    return EXIT_OK


def _cmd_fit(args):
    seed = _seed_default(args.seed)
    config = FitTrialConfig(
        n=args.n, d=args.d, k=args.k, p=args.p, lam=args.lam, seed=seed,
        methods=tuple(_method_list(args.methods)),
        signal_scale=args.signal_scale, classify=not args.raw_labels)
    report = run_fit_suite(config, args.trials, parallel=args.parallel_trials)
    report.write_csv(args.out + ".csv")
    report.write_json(args.out + ".json")
    for row in report.csv_rows():
        print(f"{row['method']:>9}: mean_fit = {row['mean_fit']:.6g}  "
              f"median_fit = {row['median_fit']:.6g}")
    print(f"baseline weight mean = {report.baseline_mean:.6g}")
    print(f"wrote {args.out}.csv and {args.out}.json")
    return EXIT_OK


def _cmd_bench(args):
    seed = _seed_default(args.seed)
    report = run_bench(args.n_sweep, args.d, args.k, _method_list(args.methods),
                       reps=args.reps, seed=seed, lam=args.lam,
                       include_precompute=args.include_precompute)
    report.write_csv(args.out + ".csv")
    report.write_json(args.out + ".json")
    for row in report.rows:
        print(f"{row.method:>9} n={row.n:>8}: median = {row.median_time_s * 1e3:9.3f} ms  "
              f"dist(retrain) = {row.distance_to_retrain:.3e}")
    print(f"wrote {args.out}.csv and {args.out}.json")
    return EXIT_OK


def _cmd_kernel_bench(args):
    seed = _seed_default(args.seed)
    rows = kernel_bench(reps=args.reps, seed=seed)
    if args.out:
        write_kernel_bench_csv(rows, args.out)
    for row in rows:
        print(f"{row['kernel']:>15} {row['params']:<20} {row['backend']:>7}: "
              f"{row['median_time_s'] * 1e3:9.4f} ms")
    if args.out:
        print(f"wrote {args.out}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="projres",
        description="Projection-residual unlearning for ridge models")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="write a synthetic sparse dataset CSV")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--d", type=_positive_int, required=True)
    p.add_argument("--p", type=_probability, default=1.0)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen_data)

    p = sub.add_parser("unlearn", help="run unlearning methods on a CSV dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--delete", required=True,
                   help="row indices 'i,j,k', or 'random:N' / 'first:N'")
    p.add_argument("--method", default="all",
                   help=f"comma list from {{{','.join(METHODS)}}} or 'all'")
    p.add_argument("--lambda", dest="lam", type=_nonneg_float, default=DEFAULT_LAMBDA)
    p.add_argument("--alpha", type=_nonneg_float, default=None,
                   help="step size for the gradient method (default 1/||N||)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--header", action="store_true",
                   help="CSV has a single header row")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_unlearn)

    p = sub.add_parser("fit", help="run a feature-injection suite")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--d", type=_positive_int, required=True)
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--p", type=_probability, default=1.0)
    p.add_argument("--lambda", dest="lam", type=_positive_float,
                   default=DEFAULT_FIT_LAMBDA)
    p.add_argument("--trials", type=_positive_int, default=50)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--methods", default="all")
    p.add_argument("--signal-scale", type=_positive_float, default=1.0)
    p.add_argument("--raw-labels", action="store_true",
                   help="keep real-valued labels instead of +/-1 thresholding")
    p.add_argument("--parallel-trials", type=_positive_int, default=None)
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("bench", help="time methods across a dataset-size sweep")
    p.add_argument("--n-sweep", type=_int_list, required=True)
    p.add_argument("--d", type=_positive_int, required=True)
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--methods", default="retrain,residual")
    p.add_argument("--reps", type=_positive_int, default=5)
    p.add_argument("--lambda", dest="lam", type=_nonneg_float, default=DEFAULT_LAMBDA)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--include-precompute", action="store_true",
                   help="time the full pipeline, not just the request phase")
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("kernel-bench",
                       help="compare compiled and fallback kernel backends")
    p.add_argument("--reps", type=_positive_int, default=5)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="optional CSV path")
    p.set_defaults(func=_cmd_kernel_bench)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DegenerateDeletionError as exc:
        print(f"degenerate deletion: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (DataFormatError, FileNotFoundError, PermissionError, IsADirectoryError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Command-line driver.

Exit codes: 0 success, 2 usage error, 3 invalid input, 4 solver diverged.
"""

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from .analysis import estimate_srh
from .data import (DatasetFormatError, GenConfig, format_float, generate, read_dataset,
                   trial_rng, write_dataset, write_parameter)
from .experiments import METHODS, SweepConfig, default_eta, run_sweep
from .objectives import make_objective
from .solver import SolverDiverged, SolverOptions, grasp_solve, logit_omp

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_DIVERGED = 4

log = logging.getLogger("grasp")


class InvalidInput(Exception):
    pass


def _floats(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def _ints(text):
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}") from None


def _names(text):
    return tuple(v.strip() for v in text.split(",") if v.strip())


def _common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path)


def build_parser():
    parser = argparse.ArgumentParser(prog="grasp", description="Gradient Support Pursuit tools")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run one solver on a dataset CSV")
    p.add_argument("dataset", type=Path)
    _common(p)
    p.add_argument("--objective", choices=("logistic", "squared_error"), default="logistic")
    p.add_argument("--method", choices=METHODS, default="grasp")
    p.add_argument("--sparsity", type=int, required=True)
    p.add_argument("--eta", type=float, help="l2 weight for grasp_l2*; default (0.2) sqrt(log p / n)")
    p.add_argument("--kappa", type=float)
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--intercept", action=argparse.BooleanOptionalAction, default=False)
    p.add_argument("--p", type=int, dest="expected_p", help="expected number of features")

    p = sub.add_parser("sweep", help="synthetic logistic regression sweep")
    _common(p)
    p.add_argument("--p", type=int, default=200)
    p.add_argument("--sparsity", type=int, default=5)
    p.add_argument("--n-grid", type=_ints, default=tuple(range(20, 201, 20)))
    p.add_argument("--rho-grid", type=_floats, default=(0.0,))
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--method", "--methods", dest="methods", type=_names, default=METHODS)
    p.add_argument("--eta", type=float, help="fixed l2 weight; default is the per-n rule")
    p.add_argument("--kappa", type=float)
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--intercept", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--summary", type=Path)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="add a wall_time column")

    p = sub.add_parser("gen-data", help="draw a synthetic logistic dataset")
    _common(p)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--sparsity", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rho", type=float, default=0.0)
    p.add_argument("--intercept", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--truth", type=Path, help="parameter file; default <out>_truth.csv")

    p = sub.add_parser("certify-srh", help="estimate the restricted Hessian conditioning")
    p.add_argument("dataset", type=Path)
    _common(p)
    p.add_argument("--objective", choices=("logistic", "logistic_l2", "squared_error"), default="logistic_l2")
    p.add_argument("--eta", type=float)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--budget", type=int, default=1000)
    p.add_argument("--exhaustive-cap", type=int, default=20_000)
    p.add_argument("--intercept", action=argparse.BooleanOptionalAction, default=False)
    return parser


def _load(args, kind):
    try:
        ds = read_dataset(args.dataset, binary=kind != "squared_error", intercept=args.intercept)
    except OSError as exc:
        raise InvalidInput(f"{args.dataset}: {exc.strerror or exc}") from None
    except DatasetFormatError as exc:
        raise InvalidInput(str(exc)) from None
    expected = getattr(args, "expected_p", None)
    if expected is not None and expected != ds.p:
        raise InvalidInput(f"{args.dataset}: file has p={ds.p} features, --p says {expected}")
    return ds


def _write_trace(path, report):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iteration", "loss", "grad_norm", "change", "support", "fallback"])
        for r in report.records:
            w.writerow([r.iteration, format_float(r.loss), format_float(r.grad_norm),
                        format_float(r.change), " ".join(map(str, r.support)), int(r.fallback)])


def cmd_solve(args):
    if args.objective == "squared_error" and args.method not in ("grasp", "grasp_debias", "grasp_iht", "logit_omp"):
        raise InvalidInput(f"method {args.method} needs the logistic objective")
    ds = _load(args, args.objective)
    if not 1 <= args.sparsity <= ds.p:
        raise InvalidInput(f"--sparsity must lie in [1, {ds.p}]")
    if args.method.startswith("grasp_l2"):
        eta = args.eta if args.eta is not None else default_eta(ds.p, ds.n)
        obj = make_objective("logistic_l2", ds, eta=eta)
    else:
        obj = make_objective(args.objective, ds)
    if args.method == "logit_omp":
        report = logit_omp(obj, args.sparsity)
    else:
        opts = SolverOptions(
            sparsity=args.sparsity,
            max_outer_iters=args.max_iters,
            iterate_tol=args.tol,
            debias=args.method.endswith("_debias"),
            variant="gradient_step" if args.method == "grasp_iht" else "full_minimize",
            kappa=args.kappa,
        )
        report = grasp_solve(obj, opts)
    x = report.final_estimate
    prefix = args.out if args.out is not None else args.dataset.with_suffix("")
    _write_trace(f"{prefix}_trace.csv", report)
    write_parameter(f"{prefix}_params.csv", x[:ds.p], x[ds.p] if ds.intercept else 0.0)
    print(f"{report.termination} after {report.n_iter} iterations; "
          f"loss {format_float(obj.value(x))}; support {np.flatnonzero(x[:ds.p]).tolist()}")
    return EXIT_OK


def cmd_sweep(args):
    try:
        cfg = SweepConfig(p=args.p, s=args.sparsity, n_grid=args.n_grid, rho_grid=args.rho_grid,
                          trials=args.trials, methods=args.methods, seed=args.seed, eta=args.eta,
                          kappa=args.kappa, intercept=args.intercept, max_outer_iters=args.max_iters,
                          iterate_tol=args.tol, timing=args.timing)
    except ValueError as exc:
        raise InvalidInput(str(exc)) from None
    out = args.out if args.out is not None else Path("sweep.csv")
    summary = args.summary if args.summary is not None else out.with_name(out.stem + "_summary.csv")
    records = run_sweep(cfg, out, summary, workers=args.workers)
    failed = sum(bool(r.error) for r in records)
    print(f"wrote {len(records)} rows to {out} ({failed} failed) and summary to {summary}")
    return EXIT_OK


def cmd_gen_data(args):
    try:
        cfg = GenConfig(p=args.p, s=args.sparsity, rho=args.rho, n=args.n, seed=args.seed,
                        intercept=args.intercept)
    except ValueError as exc:
        raise InvalidInput(str(exc)) from None
    ds, x_star, c = generate(cfg, trial_rng(cfg.seed))
    out = args.out if args.out is not None else Path("data.csv")
    truth = args.truth if args.truth is not None else out.with_name(out.stem + "_truth.csv")
    write_dataset(out, ds)
    write_parameter(truth, x_star, c)
    print(f"wrote {ds.n} samples to {out} and the true parameter to {truth}")
    return EXIT_OK


def cmd_certify_srh(args):
    ds = _load(args, args.objective)
    eta = None
    if args.objective == "logistic_l2":
        eta = args.eta if args.eta is not None else default_eta(ds.p, ds.n)
    try:
        obj = make_objective(args.objective, ds, eta=eta)
        est = estimate_srh(obj, args.k, args.budget, rng=args.seed, exhaustive_cap=args.exhaustive_cap)
    except ValueError as exc:
        raise InvalidInput(str(exc)) from None
    fh = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "mode", "trials", "B_min", "A_max", "mu_k", "valid"])
        w.writerow([est.k, est.mode, est.trials, format_float(est.B_min), format_float(est.A_max),
                    format_float(est.mu_k), int(est.valid)])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "gen-data": cmd_gen_data,
    "certify-srh": cmd_certify_srh,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "methods", None) == ():
        parser.error("--methods must name at least one method")
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SolverDiverged as exc:
        print(f"error: solver diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED


if __name__ == "__main__":
    sys.exit(main())

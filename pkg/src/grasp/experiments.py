"""Synthetic sparse logistic regression sweeps.

For every ``(rho, n, trial)`` cell a fresh parameter, AR(1) design and
label vector are drawn, each requested method is run on the same data,
and one :class:`TrialRecord` per method is emitted. Rows are ordered by
``(rho, n, trial, method)`` regardless of how the trials were scheduled.
"""

import csv
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from .data import GenConfig, format_float, generate, trial_rng
from .objectives import Logistic, LogisticL2
from .solver import SolverDiverged, SolverOptions, grasp_solve, logit_omp

__all__ = [
    "METHODS",
    "SweepConfig",
    "TrialRecord",
    "default_eta",
    "compute_metrics",
    "run_method",
    "run_trial",
    "run_sweep",
    "summarize",
    "write_records",
    "write_summary",
]

METHODS = ("grasp", "grasp_l2", "grasp_debias", "grasp_l2_debias", "grasp_iht", "logit_omp")


def default_eta(p, n, omega=0.8):
    """``(1 - omega) sqrt(log p / n)``."""
    return (1.0 - omega) * math.sqrt(math.log(p) / n)


@dataclass(frozen=True)
class SweepConfig:
    """Grid and method settings for :func:`run_sweep`.

    ``eta=None`` selects the ``default_eta`` rule per sample size; a number
    fixes it. ``kappa`` is the step of ``grasp_iht`` (``None`` means the
    inverse of the estimated restricted Lipschitz constant).
    """

    p: int = 200
    s: int = 5
    n_grid: tuple = tuple(range(20, 201, 20))
    rho_grid: tuple = (0.0,)
    trials: int = 20
    methods: tuple = METHODS
    seed: int = 0
    eta: float = None
    kappa: float = None
    intercept: bool = True
    max_outer_iters: int = 100
    iterate_tol: float = 1e-7
    timing: bool = False

    def __post_init__(self):
        if not self.n_grid or not self.rho_grid:
            raise ValueError("n_grid and rho_grid must be nonempty")
        if not self.methods:
            raise ValueError("at least one method is required")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods {sorted(unknown)}; expected a subset of {METHODS}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.eta is not None and not self.eta > 0:
            raise ValueError("eta must be positive")
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(self, "rho_grid", tuple(float(r) for r in self.rho_grid))
        object.__setattr__(self, "methods", tuple(self.methods))

    def eta_for(self, n):
        return default_eta(self.p, n) if self.eta is None else float(self.eta)


@dataclass
class TrialRecord:
    rho: float
    n: int
    trial: int
    method: str
    loss: float = math.nan
    loss_truth: float = math.nan
    rel_error: float = math.nan
    precision: float = math.nan
    recall: float = math.nan
    iterations: int = 0
    wall_time: float = math.nan
    error: str = field(default="")


def compute_metrics(estimate, x_star, obj, c=0.0):
    """Loss at the estimate and at the truth, relative error and support
    precision/recall.

    ``obj`` is the loss to report (the plain logistic loss in sweeps).
    Relative error and support metrics use the feature coordinates only;
    undefined ratios come back as NaN.
    """
    estimate = np.asarray(estimate, dtype=float)
    x_star = np.asarray(x_star, dtype=float)
    p = x_star.size
    truth = np.append(x_star, c) if obj.free.size else x_star
    if estimate.shape != truth.shape:
        raise ValueError("estimate and truth have different lengths")
    xs = estimate[:p]
    nrm = np.linalg.norm(x_star)
    est_S = set(np.flatnonzero(xs).tolist())
    true_S = set(np.flatnonzero(x_star).tolist())
    hit = len(est_S & true_S)
    return {
        "loss": obj.value(estimate),
        "loss_truth": obj.value(truth),
        "rel_error": float(np.linalg.norm(xs - x_star) / nrm) if nrm > 0 else math.nan,
        "precision": hit / len(est_S) if est_S else math.nan,
        "recall": hit / len(true_S) if true_S else math.nan,
    }


def run_method(method, dataset, s, eta=None, kappa=None, max_outer_iters=100, iterate_tol=1e-7):
    """Run one named method and return its :class:`SolverReport`."""
    if method == "logit_omp":
        return logit_omp(Logistic(dataset), s)
    obj = LogisticL2(dataset, eta) if method.startswith("grasp_l2") else Logistic(dataset)
    opts = SolverOptions(
        sparsity=s,
        max_outer_iters=max_outer_iters,
        iterate_tol=iterate_tol,
        debias=method.endswith("_debias"),
        variant="gradient_step" if method == "grasp_iht" else "full_minimize",
        kappa=kappa,
    )
    return grasp_solve(obj, opts)


def run_trial(cfg, rho_idx, n_idx, trial):
    """All methods on one freshly drawn dataset."""
    rho, n = cfg.rho_grid[rho_idx], cfg.n_grid[n_idx]
    gen = GenConfig(p=cfg.p, s=cfg.s, rho=rho, n=n, seed=cfg.seed, intercept=cfg.intercept)
    dataset, x_star, c = generate(gen, trial_rng(cfg.seed, rho_idx, n_idx, trial))
    loss_obj = Logistic(dataset)
    out = []
    for method in cfg.methods:
        rec = TrialRecord(rho=rho, n=n, trial=trial, method=method)
        t0 = time.perf_counter()
        try:
            report = run_method(method, dataset, cfg.s, eta=cfg.eta_for(n), kappa=cfg.kappa,
                                max_outer_iters=cfg.max_outer_iters, iterate_tol=cfg.iterate_tol)
        except SolverDiverged as exc:
            rec.error = f"diverged: {exc}"
        else:
            for key, val in compute_metrics(report.final_estimate, x_star, loss_obj, c).items():
                setattr(rec, key, val)
            rec.iterations = report.n_iter
        rec.wall_time = time.perf_counter() - t0
        out.append(rec)
    return out


def _run_cell(args):
    return run_trial(*args)


def run_sweep(cfg, out_path=None, summary_path=None, workers=1):
    """Run the whole grid.

    Parameters
    ----------
    cfg : SweepConfig
    out_path, summary_path : path, optional
        Where to write the per-trial and the aggregated CSV.
    workers : int
        Number of worker processes; results do not depend on it.

    Returns
    -------
    list of TrialRecord
    """
    cells = [(cfg, i, j, t)
             for i in range(len(cfg.rho_grid))
             for j in range(len(cfg.n_grid))
             for t in range(cfg.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_cell, cells))
    else:
        chunks = [_run_cell(c) for c in cells]
    records = [rec for chunk in chunks for rec in chunk]
    if out_path is not None:
        write_records(out_path, records, timing=cfg.timing)
    if summary_path is not None:
        write_summary(summary_path, summarize(records))
    return records


def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format_float(v)


def write_records(path, records, timing=False):
    """Per-trial CSV. ``wall_time`` is only written when ``timing`` is set,
    which keeps the default output byte-reproducible."""
    names = [f.name for f in fields(TrialRecord) if timing or f.name != "wall_time"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for rec in records:
            w.writerow([_fmt(getattr(rec, k)) for k in names])


SUMMARY_STATS = ("loss", "loss_truth", "rel_error", "precision", "recall", "iterations")


def _mean_std(vals):
    vals = np.asarray(vals, dtype=float)
    vals = vals[~np.isnan(vals)]
    if vals.size == 0:
        return math.nan, math.nan
    std = float(np.std(vals, ddof=1)) if vals.size > 1 else math.nan
    return float(np.mean(vals)), std


def summarize(records):
    """Mean and sample standard deviation per ``(rho, n, method)`` cell.

    NaN entries (undefined metrics, failed runs) are skipped.
    """
    groups = {}
    for rec in records:
        groups.setdefault((rec.rho, rec.n, rec.method), []).append(rec)
    rows = []
    for (rho, n, method), recs in groups.items():
        ok = [r for r in recs if not r.error]
        row = {"rho": rho, "n": n, "method": method, "trials": len(recs), "errors": len(recs) - len(ok)}
        for key in SUMMARY_STATS:
            row[f"{key}_mean"], row[f"{key}_std"] = _mean_std([getattr(r, key) for r in ok])
        rows.append(row)
    return rows


def write_summary(path, rows):
    if not rows:
        raise ValueError("nothing to summarize")
    names = list(rows[0])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in rows:
            w.writerow([_fmt(row[k]) for k in names])

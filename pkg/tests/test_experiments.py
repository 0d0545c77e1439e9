import csv
import math
from pathlib import Path

import numpy as np
import pytest

from grasp.experiments import (METHODS, SweepConfig, TrialRecord, compute_metrics, default_eta, run_sweep,
                               summarize, write_records)
from grasp.objectives import Dataset, Logistic

GOLDEN = Path(__file__).parent / "golden" / "sweep_seed42.csv"


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def tiny_config(**kw):
    base = dict(p=30, s=3, n_grid=(30, 60), rho_grid=(0.0, 0.5), trials=2, methods=METHODS, seed=3)
    base.update(kw)
    return SweepConfig(**base)


def test_metrics_examples():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((20, 5))
    obj = Logistic(Dataset(A, (rng.random(20) < 0.5).astype(float)))
    x = np.array([0.0, 1.5, 0.0, -2.0, 0.0])
    m = compute_metrics(x, x, obj)
    assert m["rel_error"] == 0 and m["precision"] == 1 and m["recall"] == 1
    assert m["loss"] == m["loss_truth"]
    assert compute_metrics(np.zeros(5), x, obj)["rel_error"] == 1.0
    m = compute_metrics(2 * x, x, obj)
    assert m["rel_error"] == 1.0 and m["recall"] == 1.0
    assert math.isnan(compute_metrics(x, np.zeros(5), obj)["rel_error"])


def test_metrics_skip_intercept():
    rng = np.random.default_rng(1)
    obj = Logistic(Dataset(rng.standard_normal((10, 3)), np.ones(10), intercept=True))
    x = np.array([1.0, 0.0, 0.0])
    m = compute_metrics(np.array([1.0, 0.0, 0.0, 9.0]), x, obj, c=0.5)
    assert m["rel_error"] == 0 and m["precision"] == 1
    assert m["loss_truth"] == obj.value(np.array([1.0, 0.0, 0.0, 0.5]))


def test_default_eta():
    assert default_eta(1000, 100) == pytest.approx(0.2 * math.sqrt(math.log(1000) / 100))


def test_row_count_and_order():
    cfg = tiny_config()
    recs = run_sweep(cfg)
    assert len(recs) == 2 * 2 * 2 * len(METHODS)
    keys = [(r.rho, r.n, r.trial, METHODS.index(r.method)) for r in recs]
    assert keys == sorted(keys)
    assert all(r.rel_error >= 0 and np.isfinite(r.loss) for r in recs if not r.error)


def test_sweep_byte_identical_and_worker_independent(tmp_path):
    cfg = tiny_config()
    run_sweep(cfg, tmp_path / "a.csv", tmp_path / "a_sum.csv")
    run_sweep(cfg, tmp_path / "b.csv", tmp_path / "b_sum.csv", workers=2)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a_sum.csv").read_bytes() == (tmp_path / "b_sum.csv").read_bytes()


def test_summary_means_match_rows(tmp_path):
    run_sweep(tiny_config(), tmp_path / "r.csv", tmp_path / "s.csv")
    rows = read_rows(tmp_path / "r.csv")
    for srow in read_rows(tmp_path / "s.csv"):
        cell = [r for r in rows if (r["rho"], r["n"], r["method"]) == (srow["rho"], srow["n"], srow["method"])
                and not r["error"]]
        for key in ("loss", "loss_truth", "rel_error", "iterations"):
            vals = [float(r[key]) for r in cell if r[key] != "nan"]
            assert abs(float(srow[f"{key}_mean"]) - sum(vals) / len(vals)) <= 1e-12 * max(1, abs(sum(vals)))


def test_golden_row(tmp_path):
    cfg = SweepConfig(p=30, s=3, n_grid=(60,), trials=1, methods=("grasp",), seed=42)
    run_sweep(cfg, tmp_path / "g.csv")
    (got,), (want,) = read_rows(tmp_path / "g.csv"), read_rows(GOLDEN)
    assert got.keys() == want.keys()
    for key in want:
        if key in ("method", "error", "trial", "n", "iterations"):
            assert got[key] == want[key]
        else:
            assert float(got[key]) == pytest.approx(float(want[key]), rel=1e-9)


def binary_entropy_oracle(s, draws, seed):
    """E[loss at truth] when x* has s standard normal entries, c ~ N(0, 1)
    and rows are white: <a, x*> + c ~ N(0, ||x*||^2 + c^2), and the expected
    loss given the margin t is the entropy of Bernoulli(sigmoid(t))."""
    rng = np.random.default_rng(seed)
    sigma = np.sqrt(rng.chisquare(s + 1, draws))
    t = sigma * rng.standard_normal(draws)
    q = 1 / (1 + np.exp(-t))
    h = -(q * np.log(q) + (1 - q) * np.log1p(-q))
    return np.mean(h)


def test_loss_at_truth_matches_monte_carlo():
    cfg = SweepConfig(p=40, s=4, n_grid=(200,), trials=60, methods=("logit_omp",), seed=8)
    recs = run_sweep(cfg)
    vals = np.array([r.loss_truth for r in recs])
    oracle = binary_entropy_oracle(4, 2_000_000, 0)
    assert abs(vals.mean() - oracle) <= 2 * vals.std(ddof=1) / np.sqrt(vals.size)


def test_timing_column_optional(tmp_path):
    recs = [TrialRecord(rho=0.0, n=10, trial=0, method="grasp", wall_time=0.5)]
    write_records(tmp_path / "a.csv", recs)
    write_records(tmp_path / "b.csv", recs, timing=True)
    assert "wall_time" not in read_rows(tmp_path / "a.csv")[0]
    assert read_rows(tmp_path / "b.csv")[0]["wall_time"] == "0.5"


def test_errors_are_marked_not_raised(monkeypatch):
    from grasp import experiments
    from grasp.solver import SolverDiverged

    def boom(*a, **k):
        raise SolverDiverged("boom")

    monkeypatch.setattr(experiments, "grasp_solve", boom)
    recs = run_sweep(tiny_config(n_grid=(30,), rho_grid=(0.0,), trials=1, methods=("grasp", "logit_omp")))
    assert recs[0].error.startswith("diverged") and math.isnan(recs[0].loss)
    assert not recs[1].error
    row = summarize(recs)[0]
    assert row["errors"] == 1 and math.isnan(row["loss_mean"])


def test_config_validation():
    with pytest.raises(ValueError):
        SweepConfig(methods=())
    with pytest.raises(ValueError):
        SweepConfig(methods=("lasso",))
    with pytest.raises(ValueError):
        SweepConfig(n_grid=())

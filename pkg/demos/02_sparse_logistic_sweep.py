"""
Sparse logistic regression on AR(1) features
============================================

A scaled-down version of the synthetic benchmark: ``p = 200`` features, a
5-sparse parameter plus intercept, labels drawn from the logistic model.
For each sample size we compare the empirical logistic loss reached by
each method with the loss at the true parameter, and the relative
estimation error.
"""

import numpy as np

from grasp.experiments import SweepConfig, run_sweep, summarize

cfg = SweepConfig(
    p=200, s=5,
    n_grid=(40, 80, 120, 160, 200),
    rho_grid=(0.0,),
    trials=10,
    methods=("grasp", "grasp_debias", "grasp_l2", "grasp_l2_debias", "logit_omp"),
    seed=1,
)
rows = summarize(run_sweep(cfg, workers=4))

###############################################################################
# Loss gap to the truth and relative error, per sample size.
print(f"{'n/p':>5} {'method':<16} {'loss':>8} {'truth':>8} {'rel.err':>9}")
for r in rows:
    print(f"{r['n'] / cfg.p:5.2f} {r['method']:<16} {r['loss_mean']:8.4f} "
          f"{r['loss_truth_mean']:8.4f} {r['rel_error_mean']:9.3g}")

###############################################################################
# Optional figure, in the style of the loss-versus-sampling-ratio plots.
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, ax = plt.subplots()
    for method in cfg.methods:
        sel = [r for r in rows if r["method"] == method]
        ax.plot([r["n"] / cfg.p for r in sel], [r["rel_error_mean"] for r in sel], marker="o", label=method)
    ax.set_yscale("log")
    ax.set_xlabel("n / p")
    ax.set_ylabel("mean relative error")
    ax.legend()
    fig.savefig("sparse_logistic_sweep.png", dpi=120)
    print("saved sparse_logistic_sweep.png")

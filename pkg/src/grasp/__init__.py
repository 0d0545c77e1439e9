"""Gradient Support Pursuit for sparsity-constrained minimization."""

from .analysis import (ChernoffParams, SrhEstimate, SrlEstimate, approx_error_bound,
                       chernoff_sample_bound, empirical_gradient_at_truth, estimate_srh,
                       estimate_srl, h_tau, srh_extremes, srh_mu_bound)
from .data import GenConfig, generate, read_dataset, write_dataset
from .objectives import Dataset, Logistic, LogisticL2, Quadratic, SquaredError, make_objective
from .solver import (SolverDiverged, SolverOptions, SolverReport, grasp_iterate, grasp_solve,
                     logit_omp, restricted_minimize, variant_step)
from .sparse_core import best_k_term, restrict, support, top_k_support

__version__ = "0.1.0"

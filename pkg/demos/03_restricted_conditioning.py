"""
Checking restricted Hessian conditioning
========================================

An objective can be well conditioned on sparse directions without being
convex. ``f(x) = 0.5 x^T Q x`` with ``Q = 2 * 11^T - I`` has unit
curvature along every coordinate axis, but the 2x2 principal blocks of
``Q`` have eigenvalues -1 and 3.

For the l2-regularized logistic loss, sampled conditioning estimates are
compared with the closed-form high-probability bound.
"""

import math

import numpy as np

from grasp import LogisticL2, Quadratic, estimate_srh, estimate_srl
from grasp.analysis import (ChernoffParams, ar1_covariance, chernoff_sample_bound, max_restricted_row_norm,
                            srh_mu_bound, theta_extremes)
from grasp.data import GenConfig, generate

Q = 2 * np.ones((6, 6)) - np.eye(6)
for k in (1, 2):
    est = estimate_srh(Quadratic(Q), k, budget=10)
    print(f"k={k}: B_min={est.B_min:+.3f}  A_max={est.A_max:.3f}  valid={est.valid}  mu={est.mu_k}")

###############################################################################
# Same question through Bregman divergences, using only values and gradients.
srl = estimate_srl(Quadratic(Q), 2, budget=50, rng=0)
print(f"SRL sampled: beta_min={srl.beta_min:+.3f} valid={srl.valid}")

###############################################################################
# l2-regularized logistic loss on correlated AR(1) features.
p, k, rho, tau = 30, 3, 0.5, 1.0
ds, _, _ = generate(GenConfig(p=p, s=k, rho=rho, n=2000, seed=3, intercept=False))
theta_bar, theta_tilde = theta_extremes(ar1_covariance(p, rho), k)
for eta in (0.01, 0.1, 1.0):
    est = estimate_srh(LogisticL2(ds, eta), k, budget=300, rng=0, mode="sampled")
    print(f"eta={eta:<5} sampled mu_k={est.mu_k:7.3f}   bound {srh_mu_bound(eta, theta_bar, tau):8.3f}")

###############################################################################
# How many samples the bound asks for, with R taken from the drawn data.
R = max_restricted_row_norm(ds.features, k)
params = ChernoffParams(R=R, theta_bar=theta_bar, theta_tilde=theta_tilde, tau=tau, eps=0.05)
print(f"R={R:.2f}, theta in [{theta_tilde:.3f}, {theta_bar:.3f}]: "
      f"n >= {chernoff_sample_bound(params, k, p)} (vs R k log(p/k) = {R * k * math.log(p / k):.0f})")

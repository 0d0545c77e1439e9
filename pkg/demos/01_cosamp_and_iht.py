"""
GraSP on least squares: CoSaMP and IHT as special cases
=======================================================

With the squared error ``0.5 ||y - A x||^2`` the gradient is the negated
CoSaMP proxy ``A^T (y - A x)`` and minimizing over a support is a least
squares solve, so every GraSP iteration is a CoSaMP iteration. Replacing
the minimization by one gradient step with unit step size gives IHT.
"""

import numpy as np

from grasp import Dataset, SolverOptions, SquaredError, grasp_iterate, grasp_solve

rng = np.random.default_rng(0)
n, p, s = 100, 256, 8
A = rng.standard_normal((n, p)) / np.sqrt(n)
x_star = np.zeros(p)
x_star[rng.choice(p, s, replace=False)] = rng.standard_normal(s)
obj = SquaredError(Dataset(A, A @ x_star))

###############################################################################
# Full GraSP: the error drops at least geometrically, then hits machine precision.
report = grasp_solve(obj, SolverOptions(sparsity=s))
for rec in report.records:
    err = np.linalg.norm(rec.estimate - x_star) / np.linalg.norm(x_star)
    print(f"iter {rec.iteration}: |T|={rec.merged.size:2d}  relative error {err:.2e}")

###############################################################################
# One CoSaMP iteration written out by hand, compared with one GraSP iteration.
proxy = A.T @ (y := A @ x_star)
T = np.sort(np.argsort(-np.abs(proxy), kind="stable")[:2 * s])
b = np.zeros(p)
b[T] = np.linalg.lstsq(A[:, T], y, rcond=None)[0]
keep = np.argsort(-np.abs(b))[:s]
cosamp = np.zeros(p)
cosamp[keep] = b[keep]
print("first GraSP iterate equals CoSaMP:", np.allclose(grasp_iterate(obj, np.zeros(p), SolverOptions(s)), cosamp))

###############################################################################
# The restricted gradient variant with kappa = 1 is IHT. IHT needs ||A|| <= 1.
A1 = A / np.linalg.norm(A, 2)
obj1 = SquaredError(Dataset(A1, A1 @ x_star))
iht = SolverOptions(sparsity=s, variant="gradient_step", kappa=1.0, max_outer_iters=500)
rep = grasp_solve(obj1, iht)
print(f"IHT variant: {rep.n_iter} iterations, "
      f"relative error {np.linalg.norm(rep.final_estimate - x_star) / np.linalg.norm(x_star):.2e}")

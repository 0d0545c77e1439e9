"""Restricted conditioning of cost functions and the logistic-loss bounds.

The stable restricted Hessian (SRH) constant of order ``k`` bounds the
condition number of ``H_f(x)`` restricted to index sets ``K`` with
``|supp(x) | K| <= k``. The stable restricted linearization (SRL) constant
plays the same role with Bregman-divergence ratios in place of Hessian
quadratic forms.

Both constants are suprema over a continuum of points, so the estimators
here can only ever *under*-estimate them. A reported estimate certifies a
violation (``valid=False`` or a large ``mu_k``); it never proves that a
bound holds.
"""

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .sparse_core import as_support, restrict, top_k_support

__all__ = [
    "SrhEstimate",
    "SrlEstimate",
    "ChernoffParams",
    "srh_extremes",
    "estimate_srh",
    "estimate_srl",
    "h_tau",
    "chernoff_sample_bound",
    "srh_mu_bound",
    "approx_error_bound",
    "empirical_gradient_at_truth",
    "ar1_covariance",
    "theta_extremes",
    "max_restricted_row_norm",
]

EXHAUSTIVE_CAP = 20_000
SYMMETRY_TOL = 1e-8


@dataclass(frozen=True)
class SrhEstimate:
    k: int
    B_min: float
    A_max: float
    mu_k: float
    mode: str
    trials: int
    valid: bool


@dataclass(frozen=True)
class SrlEstimate:
    k: int
    beta_min: float
    alpha_max: float
    mu_k: float
    mode: str
    trials: int
    valid: bool


@dataclass(frozen=True)
class ChernoffParams:
    """Constants of the sample-size bound for the l2-regularized logistic
    loss.

    ``R`` bounds ``||a|_J||^2`` over ``k``-subsets ``J``; ``theta_bar`` and
    ``theta_tilde`` are the largest and smallest values over ``J`` of
    ``lambda_max(C_JJ)`` with ``C = E[a a^T]``.
    """

    R: float
    theta_bar: float
    theta_tilde: float
    tau: float
    eps: float

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError("R must be positive")
        if not 0 < self.theta_tilde <= self.theta_bar:
            raise ValueError("need 0 < theta_tilde <= theta_bar")
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")


def _symmetric_eigvals(H):
    asym = np.max(np.abs(H - H.T)) if H.size else 0.0
    if asym > SYMMETRY_TOL * max(1.0, np.max(np.abs(H))):
        raise RuntimeError(f"restricted Hessian is not symmetric (asymmetry {asym:.3g})")
    return np.linalg.eigvalsh(0.5 * (H + H.T))


def srh_extremes(obj, x, K):
    """Smallest and largest eigenvalue of ``H_f(x)`` restricted to ``K``.

    Returns
    -------
    (B, A) : tuple of float
    """
    K = as_support(K, obj.dim)
    if K.size == 0:
        raise ValueError("K must be nonempty")
    lam = _symmetric_eigvals(obj.restricted_hessian(x, K))
    return float(lam[0]), float(lam[-1])


def _random_pair(rng, dim, k):
    """Random k-subset K and a point x supported on a random part of K."""
    K = np.sort(rng.choice(dim, size=k, replace=False))
    m = int(rng.integers(0, k + 1))
    x = np.zeros(dim)
    if m:
        x[rng.choice(K, size=m, replace=False)] = rng.standard_normal(m)
    return x, K


def _check_budget(obj, k, budget):
    if int(budget) < 1:
        raise ValueError("budget must be at least 1")
    if not 1 <= k <= obj.dim:
        raise ValueError(f"k must lie in [1, {obj.dim}], got {k}")


def estimate_srh(obj, k, budget, rng=None, exhaustive_cap=EXHAUSTIVE_CAP, mode="auto"):
    """Estimate the SRH constant of order ``k``.

    Every evaluated pair ``(x, K)`` contributes the extreme eigenvalues of
    the restricted Hessian. ``mu_k`` is the worst condition number seen;
    ``valid`` is ``False`` as soon as a nonpositive smallest eigenvalue
    shows up (and ``mu_k`` is then infinite).

    Parameters
    ----------
    obj : Objective
    k : int
    budget : int
        Number of random ``(x, K)`` pairs. In exhaustive mode every
        ``k``-subset is evaluated at ``x = 0``, and for objectives whose
        Hessian depends on ``x`` the random pairs are added on top.
    rng : int, Generator or None
    exhaustive_cap : int
        Largest number of ``k``-subsets enumerated in ``"auto"`` mode.
    mode : {"auto", "exhaustive", "sampled"}
    """
    _check_budget(obj, k, budget)
    rng = np.random.default_rng(rng)
    n_subsets = math.comb(obj.dim, k)
    if mode == "auto":
        mode = "exhaustive" if n_subsets <= exhaustive_cap else "sampled"
    if mode not in ("exhaustive", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")

    pairs = []
    if mode == "exhaustive":
        zero = np.zeros(obj.dim)
        pairs.extend((zero, np.array(K)) for K in combinations(range(obj.dim), k))
    if mode == "sampled" or not obj.constant_hessian:
        pairs.extend(_random_pair(rng, obj.dim, k) for _ in range(int(budget)))

    B_min, A_max, mu = np.inf, -np.inf, 1.0
    for x, K in pairs:
        B, A = srh_extremes(obj, x, K)
        B_min, A_max = min(B_min, B), max(A_max, A)
        if B > 0:
            mu = max(mu, A / B)
    valid = bool(B_min > 0)
    return SrhEstimate(k=k, B_min=B_min, A_max=A_max, mu_k=mu if valid else np.inf,
                       mode=mode, trials=len(pairs), valid=valid)


def _bregman_ratio(obj, x, fx, gx, delta):
    xp = x + delta
    b = obj.value(xp) - fx - float(gx @ delta)
    return b / float(delta @ delta)


def estimate_srl(obj, k, budget, rng=None, directions=8, refine_iters=30, radius=1.0):
    """Monte Carlo estimate of the SRL constant of order ``k``.

    For each of ``budget`` random pairs ``(x, K)`` the Bregman ratio
    ``B_f(x + D || x) / ||D||^2`` is evaluated over ``directions`` random
    perturbations ``D`` supported on ``K`` with norm ``radius * E``,
    ``E ~ Exp(1)``. Each start is then pushed towards the extreme ratios
    by power iterations on gradient differences, which only needs the
    first-order oracle. Per pair, ``alpha / beta`` is the largest over
    smallest ratio; ``mu_k`` is the worst such ratio.
    """
    _check_budget(obj, k, budget)
    rng = np.random.default_rng(rng)
    alpha_max, beta_min, mu = -np.inf, np.inf, 1.0
    valid = True
    for _ in range(int(budget)):
        x, K = _random_pair(rng, obj.dim, k)
        fx = obj.value(x)
        gx = obj.gradient(x)
        ratios = []
        for _ in range(directions):
            r = radius * rng.exponential()
            u = np.zeros(obj.dim)
            u[K] = rng.standard_normal(k)
            u /= np.linalg.norm(u)
            ratios.append(_bregman_ratio(obj, x, fx, gx, r * u))
            if refine_iters and k > 1:
                ratios.extend(_refine(obj, x, fx, gx, K, u, r, refine_iters))
        alpha, beta = max(ratios), min(ratios)
        alpha_max, beta_min = max(alpha_max, alpha), min(beta_min, beta)
        if beta > 0:
            mu = max(mu, alpha / beta)
        else:
            valid = False
    return SrlEstimate(k=k, beta_min=beta_min, alpha_max=alpha_max,
                       mu_k=mu if valid else np.inf, mode="sampled",
                       trials=int(budget), valid=valid)


def _refine(obj, x, fx, gx, K, u, r, iters):
    """Shifted power iterations using secant products
    ``(grad f(x + r u) - grad f(x)) / r`` restricted to ``K``."""

    def secant(v):
        return (obj.gradient(x + r * v) - gx)[K] / r

    out = []
    shift = 2.0 * np.linalg.norm(secant(u)) + 1e-12
    for sign in (1.0, -1.0):
        v = u.copy()
        for _ in range(iters):
            w = np.zeros(obj.dim)
            w[K] = shift * v[K] + sign * secant(v)
            nrm = np.linalg.norm(w)
            if nrm == 0:
                break
            v = w / nrm
        out.append(_bregman_ratio(obj, x, fx, gx, r * v))
    return out


def h_tau(tau):
    """``(1 + tau) log(1 + tau) - tau``."""
    tau = float(tau)
    if not tau > -1:
        raise ValueError(f"tau must exceed -1, got {tau}")
    return (1.0 + tau) * math.log1p(tau) - tau


def chernoff_sample_bound(params, k, p, integer=True):
    """Samples sufficient for the SRH guarantee of the regularized
    logistic loss to hold with probability ``1 - eps``.

    ``n >= R (log k + k (1 + log(p/k)) - log eps) / (theta_tilde h(tau))``,
    rounded up unless ``integer`` is false.
    """
    if not 1 <= k <= p:
        raise ValueError(f"need 1 <= k <= p, got k={k}, p={p}")
    raw = params.R * (math.log(k) + k * (1.0 + math.log(p / k)) - math.log(params.eps))
    raw /= params.theta_tilde * h_tau(params.tau)
    return math.ceil(raw) if integer else raw


def srh_mu_bound(eta, theta_bar, tau):
    """``1 + (1 + tau) theta_bar / (4 eta)``."""
    if not eta > 0:
        raise ValueError("eta must be positive")
    if theta_bar < 0 or tau < 0:
        raise ValueError("theta_bar and tau must be nonnegative")
    return 1.0 + (1.0 + tau) * theta_bar / (4.0 * eta)


def approx_error_bound(eta, theta_bar, tau, x_star_norm):
    """High-probability bound on ``||grad f(x*)|_I||`` for the regularized
    logistic loss: ``sqrt((1 + tau) theta_bar) / 2 + eta ||x*||``."""
    if min(eta, theta_bar, tau, x_star_norm) < 0:
        raise ValueError("arguments must be nonnegative")
    return 0.5 * math.sqrt((1.0 + tau) * theta_bar) + eta * x_star_norm


def empirical_gradient_at_truth(obj, x_star, s):
    """Norm of the ``3s`` largest gradient entries at ``x_star``.

    Free coordinates (the intercept) are left out.
    """
    g = obj.gradient(x_star)
    g[obj.free] = 0.0
    I = top_k_support(g, min(3 * int(s), obj.dim))
    return float(np.linalg.norm(restrict(g, I)))


def ar1_covariance(p, rho):
    """``C_ij = rho^|i - j|``, the covariance of the unit-variance AR(1) rows."""
    idx = np.arange(p)
    return float(rho) ** np.abs(idx[:, None] - idx[None, :])


def theta_extremes(C, k, rng=None, exhaustive_cap=EXHAUSTIVE_CAP, budget=2000):
    """``(theta_bar, theta_tilde)``: largest and smallest ``lambda_max`` of
    ``k x k`` principal submatrices of ``C``.

    Exact when there are at most ``exhaustive_cap`` subsets; otherwise
    ``budget`` random subsets are used and the result is an inner
    approximation (``theta_bar`` too small, ``theta_tilde`` too large).
    """
    C = np.asarray(C, dtype=float)
    p = C.shape[0]
    if not 1 <= k <= p:
        raise ValueError(f"need 1 <= k <= p, got k={k}, p={p}")
    if math.comb(p, k) <= exhaustive_cap:
        subsets = combinations(range(p), k)
    else:
        rng = np.random.default_rng(rng)
        subsets = (rng.choice(p, size=k, replace=False) for _ in range(budget))
    lam = [np.linalg.eigvalsh(C[np.ix_(J, J)])[-1] for J in map(list, subsets)]
    return float(max(lam)), float(min(lam))


def max_restricted_row_norm(A, k):
    """Largest ``||a_i|_J||^2`` over rows ``i`` and ``k``-subsets ``J``;
    the empirical counterpart of ``R``."""
    sq = np.sort(np.asarray(A, dtype=float) ** 2, axis=1)[:, ::-1]
    return float(np.max(np.sum(sq[:, :k], axis=1)))

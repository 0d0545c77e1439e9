"""Gradient Support Pursuit and a forward-selection baseline.

Each GraSP iteration

1. evaluates the gradient ``z`` at the current estimate,
2. picks the ``2s`` largest-magnitude coordinates of ``z``,
3. merges them with the support of the estimate into ``T``,
4. minimizes the objective over vectors supported on ``T`` (or takes a
   single restricted Newton / gradient step, depending on the variant),
5. keeps the ``s`` largest entries of the result, optionally re-minimizing
   over that support (debiasing).

Coordinates listed in ``obj.free`` (the intercept) never count against the
sparsity budget and belong to every support the solver forms.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .sparse_core import as_support, best_k_term, top_k_support

__all__ = [
    "SolverOptions",
    "SolverReport",
    "IterationRecord",
    "SolverDiverged",
    "VARIANTS",
    "grasp_iterate",
    "grasp_solve",
    "restricted_minimize",
    "variant_step",
    "logit_omp",
]

log = logging.getLogger(__name__)

VARIANTS = ("full_minimize", "newton_step", "gradient_step")

ARMIJO = 1e-4
BACKTRACK = 0.5
MAX_BACKTRACKS = 60
# restricted Hessians worse conditioned than this are treated as singular
SINGULAR_COND = 1e12


class SolverDiverged(RuntimeError):
    """Raised when the objective becomes non-finite.

    ``last_iterate`` holds the last finite iterate; ``report`` the partial
    trace when raised from :func:`grasp_solve` or :func:`logit_omp`.
    """

    def __init__(self, message, last_iterate=None, report=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.report = report


@dataclass
class SolverOptions:
    """Settings for :func:`grasp_solve`.

    ``kappa`` is the step size of the ``newton_step`` and
    ``gradient_step`` variants. When left as ``None`` it defaults to 1 for
    Newton steps and to ``1 / L`` for gradient steps, ``L`` being the
    largest eigenvalue magnitude of the restricted Hessian.

    ``newton_form="printed"`` multiplies the inverse restricted Hessian by
    the restricted iterate instead of the restricted gradient; it is kept
    only for comparison experiments and does not converge in general.
    """

    sparsity: int
    max_outer_iters: int = 100
    iterate_tol: float = 1e-7
    inner_grad_tol: float = 1e-8
    inner_max_iters: int = 100
    variant: str = "full_minimize"
    kappa: float = None
    debias: bool = False
    newton_form: str = "gradient"

    def __post_init__(self):
        if int(self.sparsity) != self.sparsity or self.sparsity < 1:
            raise ValueError(f"sparsity must be a positive integer, got {self.sparsity}")
        self.sparsity = int(self.sparsity)
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        if self.newton_form not in ("gradient", "printed"):
            raise ValueError(f"unknown newton_form {self.newton_form!r}")
        if self.kappa is not None and not self.kappa >= 0:
            raise ValueError("kappa must be nonnegative")
        if not (self.iterate_tol > 0 and self.inner_grad_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_outer_iters < 0 or self.inner_max_iters < 0:
            raise ValueError("iteration caps must be nonnegative")


@dataclass
class IterationRecord:
    iteration: int
    loss: float
    grad_norm: float
    support: np.ndarray
    change: float
    estimate: np.ndarray = field(repr=False)
    selected: np.ndarray = field(default=None, repr=False)
    merged: np.ndarray = field(default=None, repr=False)
    fallback: bool = False


@dataclass
class SolverReport:
    final_estimate: np.ndarray
    records: list
    termination: str
    best_iteration: int = 0
    saturated: bool = False

    @property
    def losses(self):
        return np.array([r.loss for r in self.records])

    @property
    def iterates(self):
        return [r.estimate for r in self.records]

    @property
    def n_iter(self):
        return len(self.records)


def _sparse_mask(obj):
    mask = np.ones(obj.dim, dtype=bool)
    mask[obj.free] = False
    return mask


def _select(v, k, mask):
    """top_k_support over the sparse coordinates only."""
    return top_k_support(np.where(mask, v, 0.0), k)


def _prune(b, s, mask):
    out = best_k_term(np.where(mask, b, 0.0), s)
    out[~mask] = b[~mask]
    return out


def _finite_value(obj, x):
    if not np.all(np.isfinite(x)):
        return np.inf
    f = obj.value(x)
    return f if np.isfinite(f) else np.inf


def restricted_minimize(obj, T, x0, grad_tol=1e-8, max_iters=100, callback=None):
    """Minimize ``obj`` over vectors supported on ``T``.

    Damped Newton on the coordinates in ``T`` with Armijo backtracking;
    when the restricted Hessian cannot be solved (or does not give a
    descent direction) the step falls back to steepest descent. The loss
    is non-increasing across iterations.

    Parameters
    ----------
    obj : Objective
    T : array_like of int
        Support to optimize over.
    x0 : ndarray
        Starting point, supported on ``T``.
    grad_tol : float
        Stop once ``||grad f(x)|_T||_2 <= grad_tol``.
    max_iters : int
    callback : callable, optional
        Called as ``callback(x, loss)`` after every accepted step.

    Returns
    -------
    ndarray
        The minimizer estimate, supported on ``T``.
    """
    T = as_support(T, obj.dim)
    x = np.asarray(x0, dtype=float).copy()
    outside = np.ones(obj.dim, dtype=bool)
    outside[T] = False
    if np.any(x[outside] != 0):
        raise ValueError("x0 must be supported on T")
    f = _finite_value(obj, x)
    if not np.isfinite(f):
        raise SolverDiverged("non-finite loss at the starting point", last_iterate=x)
    if T.size == 0:
        return x

    for _ in range(max_iters):
        g = obj.gradient(x)[T]
        if np.linalg.norm(g) <= grad_tol:
            break
        H = obj.restricted_hessian(x, T)
        d = _newton_direction(H, g)
        t = 1.0
        if d is None:
            d = -g
            scale = np.linalg.norm(H, 2)
            t = 1.0 / scale if scale > 0 else 1.0
        slope = float(g @ d)
        for _ in range(MAX_BACKTRACKS):
            xn = x.copy()
            xn[T] += t * d
            fn = _finite_value(obj, xn)
            if fn <= f + ARMIJO * t * slope:
                break
            t *= BACKTRACK
        else:
            break
        if fn > f:
            break
        x, f = xn, fn
        if callback is not None:
            callback(x, f)
    return x


def _newton_direction(H, g):
    try:
        if np.linalg.cond(H) > SINGULAR_COND:
            return None
        d = -np.linalg.solve(H, g)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(d)) or g @ d >= 0:
        return None
    return d


def _lmax(H):
    """Largest eigenvalue magnitude of a symmetric matrix."""
    return float(np.max(np.abs(np.linalg.eigvalsh(H)))) if H.size else 0.0


def _variant_step(obj, x_hat, T, opts):
    """Returns ``(b, fell_back)`` for the step variants."""
    T = as_support(T, obj.dim)
    g = obj.gradient(x_hat)[T]
    b = np.zeros(obj.dim)
    if T.size == 0:
        return b, False
    if opts.variant == "newton_step":
        H = obj.restricted_hessian(x_hat, T)
        rhs = g if opts.newton_form == "gradient" else x_hat[T]
        kappa = 1.0 if opts.kappa is None else opts.kappa
        try:
            if np.linalg.cond(H) > SINGULAR_COND:
                raise np.linalg.LinAlgError("restricted Hessian is singular")
            b[T] = x_hat[T] - kappa * np.linalg.solve(H, rhs)
            return b, False
        except np.linalg.LinAlgError:
            log.debug("singular restricted Hessian on %d coordinates; taking a gradient step", T.size)
            kappa = None
            fell_back = True
    else:
        kappa = opts.kappa
        fell_back = False
    if kappa is None:
        L = _lmax(obj.restricted_hessian(x_hat, T))
        kappa = 1.0 / L if L > 0 else 1.0
    b[T] = x_hat[T] - kappa * g
    return b, fell_back


def variant_step(obj, x_hat, T, opts):
    """One restricted Newton or gradient step over ``T``.

    Gradient form: ``b|_T = x_hat|_T - kappa * grad f(x_hat)|_T``.
    Newton form: ``b|_T = x_hat|_T - kappa * H_T^{-1} grad f(x_hat)|_T``,
    falling back to a gradient step when ``H_T`` is singular.
    ``b`` is zero outside ``T``.
    """
    return _variant_step(obj, np.asarray(x_hat, dtype=float), T, opts)[0]


def _grasp_step(obj, x_hat, opts, grad=None):
    s = opts.sparsity
    mask = _sparse_mask(obj)
    z = obj.gradient(x_hat) if grad is None else grad
    Z = _select(z, min(2 * s, int(mask.sum())), mask)
    T = np.union1d(np.union1d(Z, np.flatnonzero(x_hat)), obj.free).astype(np.int64)
    fell_back = False
    if opts.variant == "full_minimize":
        x0 = np.zeros(obj.dim)
        x0[T] = x_hat[T]
        b = restricted_minimize(obj, T, x0, opts.inner_grad_tol, opts.inner_max_iters)
    else:
        b, fell_back = _variant_step(obj, x_hat, T, opts)
    x_new = _prune(b, s, mask)
    if opts.debias:
        S = np.union1d(np.flatnonzero(x_new), obj.free).astype(np.int64)
        x_new = restricted_minimize(obj, S, x_new, opts.inner_grad_tol, opts.inner_max_iters)
    return x_new, Z, T, fell_back


def grasp_iterate(obj, x_hat, opts):
    """One GraSP iteration from ``x_hat``; returns the pruned estimate."""
    x_hat = np.asarray(x_hat, dtype=float)
    mask = _sparse_mask(obj)
    if np.count_nonzero(x_hat[mask]) > opts.sparsity:
        raise ValueError("x_hat has more than s nonzeros")
    return _grasp_step(obj, x_hat, opts)[0]


def _stationarity(obj, x, g, s, mask):
    """Norm of the gradient over supp(x), its top 2s entries and the free
    coordinates."""
    Z = _select(g, min(2 * s, int(mask.sum())), mask)
    T = np.union1d(np.union1d(Z, np.flatnonzero(x)), obj.free).astype(np.int64)
    return float(np.linalg.norm(g[T]))


def grasp_solve(obj, opts):
    """Run GraSP from the zero vector.

    Stops when the relative iterate change drops below
    ``opts.iterate_tol`` (``"converged"``), when the loss increases on two
    consecutive iterations (``"stalled"``) or after
    ``opts.max_outer_iters`` iterations (``"max_iters"``). The returned
    estimate is the lowest-loss iterate seen.
    """
    mask = _sparse_mask(obj)
    s = opts.sparsity
    x = np.zeros(obj.dim)
    loss = _finite_value(obj, x)
    if not np.isfinite(loss):
        raise SolverDiverged("non-finite loss at the zero vector", last_iterate=x)
    g = obj.gradient(x)
    records = []
    report = SolverReport(final_estimate=x.copy(), records=records, termination="max_iters",
                          saturated=3 * s >= mask.sum())
    best_loss = np.inf
    increases = 0
    for it in range(1, opts.max_outer_iters + 1):
        try:
            x_new, Z, T, fell_back = _grasp_step(obj, x, opts, grad=g)
        except SolverDiverged as exc:
            exc.report = report
            raise
        new_loss = _finite_value(obj, x_new)
        if not np.isfinite(new_loss):
            raise SolverDiverged(f"non-finite loss at iteration {it}", last_iterate=x, report=report)
        g = obj.gradient(x_new)
        change = float(np.linalg.norm(x_new - x))
        records.append(IterationRecord(
            iteration=it,
            loss=new_loss,
            grad_norm=_stationarity(obj, x_new, g, s, mask),
            support=np.flatnonzero(np.where(mask, x_new, 0.0)).astype(np.int64),
            change=change,
            estimate=x_new,
            selected=Z,
            merged=T,
            fallback=fell_back,
        ))
        if new_loss < best_loss:
            best_loss = new_loss
            report.final_estimate = x_new.copy()
            report.best_iteration = it
        increases = increases + 1 if new_loss > loss else 0
        scale = max(np.linalg.norm(x), np.linalg.norm(x_new))
        x, loss = x_new, new_loss
        if increases >= 2:
            report.termination = "stalled"
            break
        if change <= opts.iterate_tol * scale:
            report.termination = "converged"
            break
    return report


def logit_omp(obj, s, grad_tol=1e-8, max_iters=100):
    """Forward selection driven by the gradient.

    Starting from the free coordinates only, repeatedly add the coordinate
    with the largest gradient magnitude and re-minimize over the grown
    support. Stops early if the gradient vanishes off the support.
    """
    s = int(s)
    if s < 0:
        raise ValueError("s must be nonnegative")
    mask = _sparse_mask(obj)
    S = obj.free.copy()
    x = np.zeros(obj.dim)
    records = []
    report = SolverReport(final_estimate=x, records=records, termination="completed")
    try:
        if S.size:
            x = restricted_minimize(obj, S, x, grad_tol, max_iters)
        for it in range(1, s + 1):
            g = obj.gradient(x)
            cand = np.abs(g)
            cand[~mask] = -1.0
            cand[S] = -1.0
            j = int(np.argmax(cand))
            if cand[j] <= 0:
                report.termination = "stationary"
                break
            prev = x
            S = np.union1d(S, [j]).astype(np.int64)
            x = restricted_minimize(obj, S, x, grad_tol, max_iters)
            records.append(IterationRecord(
                iteration=it,
                loss=obj.value(x),
                grad_norm=float(np.linalg.norm(obj.gradient(x)[S])),
                support=np.flatnonzero(np.where(mask, x, 0.0)).astype(np.int64),
                change=float(np.linalg.norm(x - prev)),
                estimate=x,
                selected=np.array([j], dtype=np.int64),
                merged=S,
            ))
    except SolverDiverged as exc:
        exc.report = report
        raise
    report.final_estimate = x
    report.best_iteration = len(records)
    return report

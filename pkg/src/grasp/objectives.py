"""Cost functions for sparsity-constrained minimization.

Every objective exposes the same small interface used by the solver and
the conditioning estimators:

``value(x)``, ``gradient(x)``, ``restricted_hessian(x, S)`` and
``bregman_divergence(x, xp)``, plus ``dim`` (length of ``x``) and
``free`` (coordinates exempt from the sparsity budget, i.e. the
intercept).

When a dataset carries the intercept flag, a constant-one column is
appended to the design, so the intercept lives at coordinate ``p``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .sparse_core import as_support

__all__ = [
    "Dataset",
    "Objective",
    "SquaredError",
    "Logistic",
    "LogisticL2",
    "Quadratic",
    "make_objective",
    "OBJECTIVE_KINDS",
]


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature rows ``a_i`` with their responses.

    Parameters
    ----------
    features : ndarray, shape (n, p)
    labels : ndarray, shape (n,)
        Binary (0/1) for the logistic objectives; any real value is
        accepted for least squares.
    intercept : bool
        Append a constant-one column when building an objective.
    """

    features: np.ndarray
    labels: np.ndarray
    intercept: bool = False

    def __post_init__(self):
        A = np.asarray(self.features, dtype=float)
        y = np.asarray(self.labels, dtype=float)
        if A.ndim != 2:
            raise ValueError("features must be a 2-D array")
        n, p = A.shape
        if n < 1 or p < 1:
            raise ValueError(f"dataset needs n >= 1 and p >= 1, got n={n}, p={p}")
        if y.shape != (n,):
            raise ValueError(f"labels must have shape ({n},), got {y.shape}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(y))):
            raise ValueError("dataset has non-finite entries")
        A.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", A)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "intercept", bool(self.intercept))

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def p(self):
        return self.features.shape[1]

    @property
    def is_binary(self):
        return bool(np.all((self.labels == 0) | (self.labels == 1)))

    def design(self):
        """Design matrix, with the constant column appended if requested."""
        if not self.intercept:
            return self.features
        A = np.hstack([self.features, np.ones((self.n, 1))])
        A.setflags(write=False)
        return A


class Objective:
    """Base class; subclasses implement ``value``, ``gradient`` and
    ``hessian``."""

    kind = None
    constant_hessian = False
    dim = 0
    free = np.zeros(0, dtype=np.int64)

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"expected a vector of length {self.dim}, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise ValueError("x has non-finite entries")
        return x

    def value(self, x):
        raise NotImplementedError

    def gradient(self, x):
        raise NotImplementedError

    def hessian(self, x):
        """Full ``dim x dim`` Hessian."""
        return self.restricted_hessian(x, np.arange(self.dim))

    def restricted_hessian(self, x, S):
        raise NotImplementedError

    def bregman_divergence(self, x, xp):
        """``f(xp) - f(x) - <grad f(x), xp - x>``."""
        x = self._check(x)
        xp = self._check(xp)
        return self.value(xp) - self.value(x) - float(self.gradient(x) @ (xp - x))

    def __call__(self, x):
        return self.value(x)


class SquaredError(Objective):
    """``f(x) = 0.5 * ||y - A x||^2`` (no 1/n factor)."""

    kind = "squared_error"
    constant_hessian = True

    def __init__(self, dataset):
        self.dataset = dataset
        self.A = dataset.design()
        self.y = dataset.labels
        self.dim = self.A.shape[1]
        self.free = np.array([dataset.p], dtype=np.int64) if dataset.intercept else np.zeros(0, np.int64)

    def value(self, x):
        x = self._check(x)
        r = self.A @ x - self.y
        return 0.5 * float(r @ r)

    def gradient(self, x):
        x = self._check(x)
        return self.A.T @ (self.A @ x - self.y)

    def restricted_hessian(self, x, S):
        self._check(x)
        S = as_support(S, self.dim)
        AS = self.A[:, S]
        return AS.T @ AS

    def bregman_divergence(self, x, xp):
        x = self._check(x)
        xp = self._check(xp)
        d = self.A @ (xp - x)
        return 0.5 * float(d @ d)


def _log1pexp(t):
    # log(1 + e^t) without overflow
    return np.maximum(t, 0.0) + np.log1p(np.exp(-np.abs(t)))


class Logistic(Objective):
    """Average negative log-likelihood of the logistic model.

    ``g(x) = (1/n) sum_i log(1 + exp(<a_i, x>)) - y_i <a_i, x>``
    """

    kind = "logistic"

    def __init__(self, dataset):
        if not dataset.is_binary:
            raise ValueError("logistic objectives need labels in {0, 1}")
        self.dataset = dataset
        self.A = dataset.design()
        self.y = dataset.labels
        self.n = dataset.n
        self.dim = self.A.shape[1]
        self.free = np.array([dataset.p], dtype=np.int64) if dataset.intercept else np.zeros(0, np.int64)

    def value(self, x):
        x = self._check(x)
        t = self.A @ x
        return float(np.mean(_log1pexp(t) - self.y * t))

    def gradient(self, x):
        x = self._check(x)
        t = self.A @ x
        return self.A.T @ (expit(t) - self.y) / self.n

    def curvature_weights(self, x):
        """Per-sample weights ``sigmoid'(t_i) = sech^2(t_i / 2) / 4``."""
        sig = expit(self.A @ x)
        return sig * (1.0 - sig)

    def restricted_hessian(self, x, S):
        x = self._check(x)
        S = as_support(S, self.dim)
        AS = self.A[:, S]
        w = self.curvature_weights(x)
        return (AS.T * w) @ AS / self.n


class LogisticL2(Logistic):
    """Logistic loss plus ``(eta / 2) ||x||^2``.

    The intercept coordinate, when present, is not penalized.
    """

    kind = "logistic_l2"

    def __init__(self, dataset, eta):
        eta = float(eta)
        if not eta > 0 or not np.isfinite(eta):
            raise ValueError(f"eta must be positive, got {eta}")
        super().__init__(dataset)
        self.eta = eta
        self._penalized = np.ones(self.dim)
        self._penalized[self.free] = 0.0

    def value(self, x):
        x = self._check(x)
        xp = x * self._penalized
        return super().value(x) + 0.5 * self.eta * float(xp @ xp)

    def gradient(self, x):
        x = self._check(x)
        return super().gradient(x) + self.eta * self._penalized * x

    def restricted_hessian(self, x, S):
        S = as_support(S, self.dim)
        H = super().restricted_hessian(x, S)
        H[np.diag_indices_from(H)] += self.eta * self._penalized[S]
        return H


class Quadratic(Objective):
    """``f(x) = 0.5 x^T Q x - b^T x`` for a symmetric, possibly indefinite ``Q``."""

    kind = "quadratic"
    constant_hessian = True

    def __init__(self, Q, b=None):
        Q = np.asarray(Q, dtype=float)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise ValueError("Q must be square")
        if not np.allclose(Q, Q.T, rtol=0, atol=1e-12):
            raise ValueError("Q must be symmetric")
        self.Q = Q
        self.dim = Q.shape[0]
        self.b = np.zeros(self.dim) if b is None else np.asarray(b, dtype=float)
        if self.b.shape != (self.dim,):
            raise ValueError("b has the wrong length")

    def value(self, x):
        x = self._check(x)
        return 0.5 * float(x @ self.Q @ x) - float(self.b @ x)

    def gradient(self, x):
        x = self._check(x)
        return self.Q @ x - self.b

    def restricted_hessian(self, x, S):
        self._check(x)
        S = as_support(S, self.dim)
        return self.Q[np.ix_(S, S)].copy()

    def bregman_divergence(self, x, xp):
        x = self._check(x)
        d = self._check(xp) - x
        return 0.5 * float(d @ self.Q @ d)


OBJECTIVE_KINDS = ("squared_error", "logistic", "logistic_l2")


def make_objective(kind, dataset, eta=None):
    """Build an objective by name.

    ``eta`` is required for ``"logistic_l2"`` and rejected otherwise.
    """
    if kind == "logistic_l2":
        if eta is None:
            raise ValueError("logistic_l2 needs eta")
        return LogisticL2(dataset, eta)
    if eta is not None:
        raise ValueError(f"eta is only meaningful for logistic_l2, not {kind}")
    if kind == "squared_error":
        return SquaredError(dataset)
    if kind == "logistic":
        return Logistic(dataset)
    raise ValueError(f"unknown objective kind {kind!r}; expected one of {OBJECTIVE_KINDS}")

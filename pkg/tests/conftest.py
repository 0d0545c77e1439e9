import numpy as np
import pytest

from grasp.objectives import Dataset, SquaredError


def gaussian_instance(seed, n=100, p=256, s=8, noise=0.0):
    """Noiseless (by default) compressed-sensing instance with A ~ N(0, 1/n)."""
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, p)) / np.sqrt(n)
    x = np.zeros(p)
    S = rng.choice(p, size=s, replace=False)
    x[S] = rng.standard_normal(s)
    y = A @ x + noise * rng.standard_normal(n)
    return A, y, x


def squared_error(A, y):
    return SquaredError(Dataset(A, y))


def cosamp_step(A, y, x_hat, s):
    """Reference CoSaMP iteration written directly from its textbook form:
    proxy, 2s largest, merge, least squares over the merge, prune.

    Returns (new estimate, proxy support, merged support, pruned support).
    """
    proxy = A.T @ (y - A @ x_hat)
    order = np.argsort(-np.abs(proxy), kind="stable")[:2 * s]
    Z = np.sort(order[proxy[order] != 0])
    T = np.union1d(Z, np.flatnonzero(x_hat))
    b = np.zeros(A.shape[1])
    b[T] = np.linalg.lstsq(A[:, T], y, rcond=None)[0]
    keep = np.argsort(-np.abs(b), kind="stable")[:s]
    keep = np.sort(keep[b[keep] != 0])
    x_new = np.zeros_like(b)
    x_new[keep] = b[keep]
    return x_new, Z, T, keep


def iht_step(A, y, x_hat, s):
    w = x_hat + A.T @ (y - A @ x_hat)
    keep = np.argsort(-np.abs(w), kind="stable")[:s]
    out = np.zeros_like(w)
    out[keep] = w[keep]
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

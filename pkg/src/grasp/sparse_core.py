"""Support-set algebra and best k-term approximation.

A support set is represented as a sorted, duplicate-free ``int64`` array of
indices. All functions are pure and never modify their inputs.
"""

import numpy as np

__all__ = [
    "as_support",
    "support",
    "best_k_term",
    "top_k_support",
    "restrict",
]


def _as_vector(v):
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


def as_support(indices, p):
    """Validate ``indices`` against ambient dimension ``p``.

    Returns the indices sorted and de-duplicated.
    """
    S = np.unique(np.asarray(indices, dtype=np.int64).ravel())
    if S.size and (S[0] < 0 or S[-1] >= p):
        raise ValueError(f"support index out of range for dimension {p}")
    return S


def support(v):
    """Indices of the nonzero entries of ``v`` (exact-zero semantics)."""
    v = _as_vector(v)
    return np.flatnonzero(v).astype(np.int64)


def top_k_support(v, k):
    """Indices of the ``k`` largest-magnitude nonzero entries of ``v``.

    Ties in magnitude are broken in favour of the lowest index. When ``v``
    has fewer than ``k`` nonzeros only those are returned; zero entries
    are never used to pad the result.

    Parameters
    ----------
    v : array_like, shape (p,)
    k : int
        Number of entries to keep, ``0 <= k <= p``.

    Returns
    -------
    ndarray of int64
        Sorted support set.
    """
    v = _as_vector(v)
    k = int(k)
    if k < 0 or k > v.size:
        raise ValueError(f"k must lie in [0, {v.size}], got {k}")
    # stable sort on -|v| orders equal magnitudes by increasing index
    order = np.argsort(-np.abs(v), kind="stable")[:k]
    order = order[v[order] != 0]
    return np.sort(order).astype(np.int64)


def best_k_term(v, k):
    """Best ``k``-term approximation of ``v`` in the l2 sense."""
    v = _as_vector(v)
    out = np.zeros_like(v)
    S = top_k_support(v, k)
    out[S] = v[S]
    return out


def restrict(v, S):
    """Copy of ``v`` with every coordinate outside ``S`` set to zero."""
    v = _as_vector(v)
    S = as_support(S, v.size)
    out = np.zeros_like(v)
    out[S] = v[S]
    return out

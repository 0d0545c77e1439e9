"""Synthetic sparse logistic data and CSV persistence.

Random streams come from numpy's ``PCG64`` bit generator. Every trial of a
sweep gets its own stream, derived from the base seed and the trial
coordinates through :class:`numpy.random.SeedSequence`, so results do not
depend on execution order. Gaussian draws use numpy's ziggurat sampler.

File formats
------------
Dataset CSV::

    y,x1,...,xp
    1,0.123...,...

Parameter CSV (nonzero coordinates, then the intercept)::

    index,value
    3,-0.71...
    c,0.25...
"""

import csv
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .objectives import Dataset

__all__ = [
    "GenConfig",
    "DatasetFormatError",
    "trial_rng",
    "gen_sparse_parameter",
    "gen_ar1_features",
    "gen_labels",
    "generate",
    "format_float",
    "read_dataset",
    "write_dataset",
    "read_parameter",
    "write_parameter",
]


class DatasetFormatError(ValueError):
    """Malformed dataset or parameter file."""

    def __init__(self, path, line, message):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


@dataclass(frozen=True)
class GenConfig:
    p: int
    s: int
    rho: float
    n: int
    seed: int = 0
    intercept: bool = True

    def __post_init__(self):
        if self.p < 1 or self.n < 1:
            raise ValueError("p and n must be positive")
        if not 0 <= self.s <= self.p:
            raise ValueError(f"need 0 <= s <= p, got s={self.s}, p={self.p}")
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must lie in [0, 1], got {self.rho}")


def trial_rng(seed, *key):
    """Independent generator for the stream identified by ``(seed, *key)``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def gen_sparse_parameter(cfg, rng):
    """Draw ``(x_star, c)``: uniform random support of size ``s`` with
    standard normal nonzeros, and a standard normal intercept (zero when
    the config has no intercept)."""
    x = np.zeros(cfg.p)
    S = rng.choice(cfg.p, size=cfg.s, replace=False)
    x[np.sort(S)] = rng.standard_normal(cfg.s)
    c = float(rng.standard_normal()) if cfg.intercept else 0.0
    return x, c


def gen_ar1_features(cfg, rng):
    """``n x p`` features, each row an AR(1) sequence with unit variance:
    ``a_{j+1} = rho a_j + sqrt(1 - rho^2) z_j``."""
    z = rng.standard_normal((cfg.n, cfg.p))
    a = np.empty_like(z)
    a[:, 0] = z[:, 0]
    w = np.sqrt(1.0 - cfg.rho ** 2)
    for j in range(1, cfg.p):
        a[:, j] = cfg.rho * a[:, j - 1] + w * z[:, j]
    return a


def gen_labels(features, x_star, c, rng):
    """Bernoulli labels with ``P(y = 1 | a) = sigmoid(<a, x_star> + c)``."""
    features = np.asarray(features, dtype=float)
    x_star = np.asarray(x_star, dtype=float)
    if features.shape[1] != x_star.size:
        raise ValueError("features and x_star disagree on p")
    prob = expit(features @ x_star + c)
    return (rng.random(features.shape[0]) < prob).astype(float)


def generate(cfg, rng=None):
    """Draw parameter, features and labels in a fixed order.

    Returns ``(dataset, x_star, c)``.
    """
    if rng is None:
        rng = trial_rng(cfg.seed)
    x_star, c = gen_sparse_parameter(cfg, rng)
    A = gen_ar1_features(cfg, rng)
    y = gen_labels(A, x_star, c, rng)
    return Dataset(A, y, intercept=cfg.intercept), x_star, c


def format_float(v):
    """17 significant digits; round-trips every float64 exactly."""
    return format(float(v), ".17g")


def _format_label(v):
    return str(int(v)) if v in (0.0, 1.0) else format_float(v)


def write_dataset(path, dataset):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["y"] + [f"x{j + 1}" for j in range(dataset.p)])
        for yi, row in zip(dataset.labels, dataset.features):
            w.writerow([_format_label(yi)] + [format_float(v) for v in row])


def read_dataset(path, binary=True, intercept=False):
    """Read a dataset CSV.

    Parameters
    ----------
    path : str or Path
    binary : bool
        Require labels to be exactly ``0`` or ``1``. Set to ``False`` for
        least-squares data with real responses.
    intercept : bool
        Intercept flag of the returned :class:`Dataset`.

    Raises
    ------
    DatasetFormatError
        On an empty file, a bad header, ragged or non-numeric rows, a
        non-binary label, or a file without samples.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DatasetFormatError(path, 1, "empty file")
    header = [h.strip() for h in rows[0]]
    p = len(header) - 1
    if p < 1 or header != ["y"] + [f"x{j + 1}" for j in range(p)]:
        raise DatasetFormatError(path, 1, "header must be y,x1,...,xp")
    labels, feats = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != p + 1:
            raise DatasetFormatError(path, lineno, f"expected {p + 1} fields, got {len(row)}")
        if binary and row[0].strip() not in ("0", "1"):
            raise DatasetFormatError(path, lineno, f"label must be 0 or 1, got {row[0]!r}")
        try:
            vals = [float(v) for v in row]
        except ValueError as exc:
            raise DatasetFormatError(path, lineno, str(exc)) from None
        if not np.all(np.isfinite(vals)):
            raise DatasetFormatError(path, lineno, "non-finite value")
        labels.append(vals[0])
        feats.append(vals[1:])
    if not labels:
        raise DatasetFormatError(path, len(rows), "no samples")
    return Dataset(np.array(feats), np.array(labels), intercept=intercept)


def write_parameter(path, x, c=0.0):
    x = np.asarray(x, dtype=float)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "value"])
        for j in np.flatnonzero(x):
            w.writerow([int(j), format_float(x[j])])
        w.writerow(["c", format_float(c)])


def read_parameter(path, p):
    """Read a parameter CSV into ``(x, c)`` with ``x`` of length ``p``."""
    x = np.zeros(p)
    c = 0.0
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or [h.strip() for h in rows[0]] != ["index", "value"]:
        raise DatasetFormatError(path, 1, "header must be index,value")
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise DatasetFormatError(path, lineno, "expected 2 fields")
        try:
            value = float(row[1])
            if row[0].strip() == "c":
                c = value
                continue
            j = int(row[0])
        except ValueError as exc:
            raise DatasetFormatError(path, lineno, str(exc)) from None
        if not 0 <= j < p:
            raise DatasetFormatError(path, lineno, f"index {j} out of range for p={p}")
        x[j] = value
    return x, c

import numpy as np
import pytest

from grasp.data import (DatasetFormatError, GenConfig, gen_ar1_features, gen_labels, gen_sparse_parameter,
                        generate, read_dataset, read_parameter, trial_rng, write_dataset, write_parameter)
from grasp.objectives import Dataset


def test_sparse_parameter():
    cfg = GenConfig(p=50, s=7, rho=0.0, n=10, seed=1)
    x, c = gen_sparse_parameter(cfg, trial_rng(1))
    assert np.count_nonzero(x) == 7 and c != 0
    x0, c0 = gen_sparse_parameter(GenConfig(p=50, s=0, rho=0.0, n=10, intercept=False), trial_rng(1))
    assert not x0.any() and c0 == 0.0
    again, c2 = gen_sparse_parameter(cfg, trial_rng(1))
    assert np.array_equal(x, again) and c == c2


def test_support_is_uniform():
    cfg = GenConfig(p=10, s=2, rho=0.0, n=1)
    counts = np.zeros(10)
    for t in range(5000):
        counts += gen_sparse_parameter(cfg, trial_rng(3, t))[0] != 0
    # each index is chosen with probability 0.2
    assert np.all(np.abs(counts / 5000 - 0.2) < 4 * np.sqrt(0.16 / 5000))


@pytest.mark.parametrize("rho", [0.0, 1 / 3, 0.5, np.sqrt(2) / 2])
def test_unit_column_variance(rho):
    A = gen_ar1_features(GenConfig(p=40, s=1, rho=rho, n=10_000), trial_rng(5))
    var = A.var(axis=0)
    assert np.all((var > 0.9) & (var < 1.1))


def test_rho_extremes():
    n = 10_000
    A0 = gen_ar1_features(GenConfig(p=5, s=1, rho=0.0, n=n), trial_rng(6))
    assert np.all(np.abs(A0.var(axis=0) - 1) < 4 / np.sqrt(n))
    A1 = gen_ar1_features(GenConfig(p=5, s=1, rho=1.0, n=20), trial_rng(6))
    assert np.all(A1 == A1[:, :1])


def test_lag_one_correlation():
    n = 10_000
    A = gen_ar1_features(GenConfig(p=6, s=1, rho=0.5, n=n), trial_rng(7))
    for j in range(5):
        assert abs(np.corrcoef(A[:, j], A[:, j + 1])[0, 1] - 0.5) < 4 / np.sqrt(n)


def test_labels():
    rng = trial_rng(8)
    n = 4000
    A = rng.standard_normal((n, 3))
    y = gen_labels(A, np.zeros(3), 0.0, rng)
    assert abs(y.mean() - 0.5) < 4 / np.sqrt(n)
    assert np.all(gen_labels(A[:, :1] * 0, np.zeros(1), 50.0, rng) == 1)


def test_label_frequency_by_decile():
    cfg = GenConfig(p=20, s=4, rho=0.3, n=20_000, seed=9)
    ds, x, c = generate(cfg)
    prob = 1 / (1 + np.exp(-(ds.features @ x + c)))
    edges = np.quantile(prob, np.linspace(0, 1, 11))
    bins = np.clip(np.searchsorted(edges, prob, side="right") - 1, 0, 9)
    for b in range(10):
        m = bins == b
        expect = prob[m].mean()
        # 99% band of a binomial proportion, widened for within-bin spread
        band = 2.576 * np.sqrt(expect * (1 - expect) / m.sum()) + 1e-3
        assert abs(ds.labels[m].mean() - expect) <= band


def test_dataset_round_trip(tmp_path):
    ds, x, c = generate(GenConfig(p=7, s=2, rho=0.5, n=25, seed=3))
    path = tmp_path / "d.csv"
    write_dataset(path, ds)
    back = read_dataset(path, intercept=True)
    assert np.array_equal(back.features, ds.features)
    assert np.array_equal(back.labels, ds.labels)
    text = path.read_text()
    assert text.startswith("y,x1,x2,x3,x4,x5,x6,x7\n") and "\r" not in text


def test_parameter_round_trip(tmp_path):
    x = np.zeros(9)
    x[[1, 8]] = [0.1, -1 / 3]
    write_parameter(tmp_path / "p.csv", x, 0.7)
    back, c = read_parameter(tmp_path / "p.csv", 9)
    assert np.array_equal(back, x) and c == 0.7
    assert (tmp_path / "p.csv").read_text().splitlines()[-1] == "c,0.69999999999999996"


def test_real_labels_allowed_when_not_binary(tmp_path):
    ds = Dataset(np.eye(2), [0.25, -3.0])
    write_dataset(tmp_path / "r.csv", ds)
    with pytest.raises(DatasetFormatError):
        read_dataset(tmp_path / "r.csv")
    assert read_dataset(tmp_path / "r.csv", binary=False).labels.tolist() == [0.25, -3.0]


@pytest.mark.parametrize("body,line", [
    ("", 1),
    ("y,x1\n", 1),
    ("y,x2\n1,0.5\n", 1),
    ("y,x1,x2\n1,0.5\n", 2),
    ("y,x1\n1,0.5\n2,0.1\n", 3),
    ("y,x1\n1,abc\n", 2),
    ("y,x1\n1,inf\n", 2),
])
def test_parse_errors(tmp_path, body, line):
    path = tmp_path / "bad.csv"
    path.write_text(body)
    with pytest.raises(DatasetFormatError) as info:
        read_dataset(path)
    assert info.value.line == line


def test_determinism(tmp_path):
    cfg = GenConfig(p=12, s=3, rho=1 / 3, n=40, seed=11)
    for name in ("a.csv", "b.csv"):
        write_dataset(tmp_path / name, generate(cfg)[0])
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_config_validation():
    with pytest.raises(ValueError):
        GenConfig(p=3, s=4, rho=0.0, n=5)
    with pytest.raises(ValueError):
        GenConfig(p=3, s=1, rho=1.5, n=5)

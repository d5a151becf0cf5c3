import numpy as np
import pytest

from utils.errors import SingularMatrixError
from utils.numerics import RngStream, kfold, log_grid, solve_spd, spearman, standardize


def test_rng_stream_same_path_reproduces_draws():
    a = RngStream(7, ("ds", "split")).generator().random(5)
    b = RngStream(7, ("ds", "split")).generator().random(5)
    np.testing.assert_array_equal(a, b)


def test_rng_stream_children_differ_from_parent_and_siblings():
    root = RngStream(7, ("ds",))
    draws = [s.generator().random(4) for s in (root, root.child("a"), root.child("b"))]
    assert not np.array_equal(draws[0], draws[1])
    assert not np.array_equal(draws[1], draws[2])
    assert root.child("a", "b").path == ("ds", "a", "b")


def test_rng_stream_root_seed_matters():
    assert not np.array_equal(RngStream(0, ("x",)).generator().random(3),
                              RngStream(1, ("x",)).generator().random(3))


def test_solve_spd_identity_and_diagonal():
    np.testing.assert_allclose(solve_spd(np.eye(3), np.array([1.0, 2.0, 3.0])), [1, 2, 3])
    np.testing.assert_allclose(solve_spd(np.diag([2.0, 2.0]), np.array([2.0, 4.0])), [1, 2])


def test_solve_spd_random_round_trip():
    gen = np.random.default_rng(3)
    M = gen.standard_normal((8, 8))
    A = M @ M.T + 8 * np.eye(8)
    b = gen.standard_normal(8)
    x = solve_spd(A, b)
    assert np.max(np.abs(A @ x - b)) <= 1e-8 * (1 + np.max(np.abs(b)))


def test_solve_spd_errors():
    with pytest.raises(SingularMatrixError):
        solve_spd(np.array([[1.0, 0.0], [0.0, 0.0]]), np.array([1.0, 1.0]))
    with pytest.raises(SingularMatrixError):
        solve_spd(np.array([[1.0, 2.0], [2.0, 1.0]]), np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        solve_spd(np.eye(2), np.array([1.0, 2.0, 3.0]))
    with pytest.raises(ValueError):
        solve_spd(np.array([[1.0, np.nan], [np.nan, 1.0]]), np.array([1.0, 1.0]))


def test_log_grid():
    np.testing.assert_allclose(log_grid(-4, 5, 10), [10.0 ** e for e in range(-4, 6)], rtol=1e-12)
    assert log_grid(0, 0, 1) == [1.0]
    np.testing.assert_allclose(log_grid(0, 1, 2), [1.0, 10.0])
    with pytest.raises(ValueError):
        log_grid(0, 1, 0)


@pytest.mark.parametrize("a, b, expected", [
    ((1, 2, 3), (10, 20, 30), 1.0),
    ((1, 2, 3), (3, 2, 1), -1.0),
    ((1, 2, 3, 4), (1, 3, 2, 4), 0.8),
])
def test_spearman_examples(a, b, expected):
    assert spearman(a, b) == pytest.approx(expected, abs=1e-12)


def test_spearman_monotone_invariance_and_ties():
    a = np.array([0.3, -1.2, 2.5, 0.0, 4.1])
    b = np.array([1.0, 0.5, 3.0, 0.5, 2.0])
    assert spearman(a, a) == pytest.approx(1.0)
    assert spearman(a, -a) == pytest.approx(-1.0)
    assert spearman(np.exp(a), b) == pytest.approx(spearman(a, b), abs=1e-12)


def test_spearman_rejects_degenerate_input():
    with pytest.raises(ValueError):
        spearman([1.0], [2.0])
    with pytest.raises(ValueError):
        spearman([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        spearman([1.0, 2.0], [1.0, 2.0, 3.0])


def test_kfold_partitions_indices(rng):
    folds = kfold(5, 2, rng)
    assert sorted(len(f) for f in folds) == [2, 3]
    np.testing.assert_array_equal(np.sort(np.concatenate(folds)), np.arange(5))

    folds = kfold(4, 2, rng)
    assert [len(f) for f in folds] == [2, 2]
    assert not set(folds[0]) & set(folds[1])


def test_kfold_is_deterministic(rng):
    first = kfold(100, 5, rng)
    second = kfold(100, 5, rng)
    for a, b in zip(first, second):
        np.testing.assert_array_equal(a, b)


def test_kfold_rejects_bad_k(rng):
    with pytest.raises(ValueError):
        kfold(5, 1, rng)
    with pytest.raises(ValueError):
        kfold(3, 4, rng)


def test_standardize_two_point_and_constant_columns():
    Z, mean, scale = standardize(np.array([[1.0, 5.0], [3.0, 5.0]]))
    np.testing.assert_allclose(Z[:, 0], [-1.0, 1.0])
    np.testing.assert_allclose(Z[:, 1], [0.0, 0.0])
    np.testing.assert_allclose(mean, [2.0, 5.0])
    np.testing.assert_allclose(scale, [1.0, 1.0])


def test_standardize_centers_random_matrix():
    X = np.random.default_rng(0).normal(3.0, 2.0, size=(50, 3))
    Z, _, _ = standardize(X)
    assert np.all(np.abs(Z.mean(axis=0)) < 1e-10)
    with pytest.raises(ValueError):
        standardize(np.array([[np.inf, 1.0], [0.0, 1.0]]))

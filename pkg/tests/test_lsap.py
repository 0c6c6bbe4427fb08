import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from graphcf.ged import lsap
from graphcf.ged import _lsap_py


def _random_matrices(count, quantize_every=3):
    rng = np.random.default_rng(77)
    for trial in range(count):
        n = int(rng.integers(1, 16))
        matrix = rng.random((n, n)) * 10
        if trial % quantize_every == 0:
            # quantized entries force ties, exercising the tie-break rules
            matrix = np.round(matrix * 2) / 2
        yield matrix


def test_matches_scipy_optimal_cost():
    for matrix in _random_matrices(200):
        _, total = lsap.solve(matrix)
        rows, cols = linear_sum_assignment(matrix)
        assert total == pytest.approx(matrix[rows, cols].sum(), abs=1e-9)


def test_pure_python_and_selected_backend_agree_exactly():
    for matrix in _random_matrices(200):
        selected = lsap._impl.solve(np.ascontiguousarray(matrix))
        pure = _lsap_py.solve(np.ascontiguousarray(matrix))
        assert (selected == pure).all()


def test_compiled_backend_if_built_matches_pure():
    compiled = pytest.importorskip("graphcf.ged._lsap_c")
    for matrix in _random_matrices(120):
        matrix = np.ascontiguousarray(matrix)
        assert (compiled.solve(matrix) == _lsap_py.solve(matrix)).all()


def test_assignment_is_valid_permutation():
    for matrix in _random_matrices(50):
        assignment, _ = lsap.solve(matrix)
        n = matrix.shape[0]
        assert sorted(assignment.tolist()) == list(range(n))


def test_zero_diagonal_recovers_identity():
    rng = np.random.default_rng(5)
    for _ in range(50):
        n = int(rng.integers(2, 12))
        matrix = rng.random((n, n)) + 0.1
        np.fill_diagonal(matrix, 0.0)
        assignment, total = lsap.solve(matrix)
        assert total == 0.0
        assert (assignment == np.arange(n)).all()


def test_big_sentinel_entries_avoided():
    matrix = np.array([
        [1.0, lsap.BIG, lsap.BIG],
        [lsap.BIG, 2.0, lsap.BIG],
        [lsap.BIG, lsap.BIG, 3.0],
    ])
    assignment, total = lsap.solve(matrix)
    assert (assignment == np.arange(3)).all()
    assert total == 6.0


def test_rejects_non_square():
    with pytest.raises(ValueError):
        lsap.solve(np.zeros((2, 3)))


def test_empty_matrix():
    assignment, total = lsap.solve(np.zeros((0, 0)))
    assert assignment.size == 0 and total == 0.0

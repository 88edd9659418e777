import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from beltrack.assignment import build_cost_matrix, solve_assignment
from beltrack.core import BoundingBox


def brute_force_min(costs):
    """Exhaustive minimum over all maximum-cardinality one-to-one matchings."""
    n_rows, n_cols = costs.shape
    if n_rows == 0 or n_cols == 0:
        return 0.0
    if n_rows <= n_cols:
        return min(sum(costs[i, p[i]] for i in range(n_rows))
                   for p in itertools.permutations(range(n_cols), n_rows))
    return min(sum(costs[p[j], j] for j in range(n_cols))
               for p in itertools.permutations(range(n_rows), n_cols))


def brute_force_smallest(costs):
    """Lexicographically smallest minimum-cost maximum-cardinality matching."""
    n_rows, n_cols = costs.shape
    if n_rows <= n_cols:
        candidates = [[(i, p[i]) for i in range(n_rows)]
                      for p in itertools.permutations(range(n_cols), n_rows)]
    else:
        candidates = [sorted((p[j], j) for j in range(n_cols))
                      for p in itertools.permutations(range(n_rows), n_cols)]
    return min(candidates, key=lambda m: (sum(costs[i, j] for i, j in m), m))


def assert_partition(result, n_rows, n_cols):
    rows = [i for i, _ in result.matches] + result.unmatched_tracks
    cols = [j for _, j in result.matches] + result.unmatched_detections
    assert sorted(rows) == list(range(n_rows))
    assert sorted(cols) == list(range(n_cols))


cost_matrices = arrays(np.float64,
                       st.tuples(st.integers(0, 6), st.integers(0, 6)),
                       elements=st.floats(0, 1, allow_nan=False))


def test_build_cost_matrix_examples():
    a = BoundingBox(0, 0, 2, 2)
    assert build_cost_matrix([a], [a]).tolist() == [[0.0]]
    assert build_cost_matrix([a], [BoundingBox(5, 5, 1, 1)]).tolist() == [[1.0]]
    np.testing.assert_allclose(build_cost_matrix([a], [BoundingBox(1, 0, 2, 2)]), [[2 / 3.0]])


def test_build_cost_matrix_shapes():
    a = BoundingBox(0, 0, 2, 2)
    assert build_cost_matrix([], []).shape == (0, 0)
    assert build_cost_matrix([a, a], []).shape == (2, 0)
    assert build_cost_matrix([], [a]).shape == (0, 1)


def test_gating_example():
    costs = np.array([[1.0, 2.0], [2.0, 4.0]])
    result = solve_assignment(costs, max_cost=1.0)
    assert result.matches == []
    assert result.unmatched_tracks == [0, 1]
    assert result.unmatched_detections == [0, 1]

    result = solve_assignment(costs, max_cost=2.0)
    assert result.matches == [(0, 1), (1, 0)]
    assert result.total_cost(costs) == 4.0


def test_single_perfect_match():
    result = solve_assignment(np.array([[0.0]]), 0.5)
    assert result.matches == [(0, 0)]


@pytest.mark.parametrize('shape', [(0, 0), (0, 3), (3, 0)])
def test_degenerate_matrices(shape):
    result = solve_assignment(np.zeros(shape), 0.5)
    assert result.matches == []
    assert result.unmatched_tracks == list(range(shape[0]))
    assert result.unmatched_detections == list(range(shape[1]))


def test_rejects_negative_max_cost():
    with pytest.raises(ValueError):
        solve_assignment(np.zeros((1, 1)), -0.1)


def test_matches_brute_force_on_random_matrices():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        n_rows, n_cols = rng.integers(1, 8, 2)
        costs = rng.uniform(0, 10, (n_rows, n_cols))
        result = solve_assignment(costs, np.inf)
        assert len(result.matches) == min(n_rows, n_cols)
        assert result.total_cost(costs) == pytest.approx(brute_force_min(costs), abs=1e-9)
        assert_partition(result, n_rows, n_cols)


def test_brute_force_agrees_on_integer_costs():
    rng = np.random.default_rng(99)
    for _ in range(200):
        n_rows, n_cols = rng.integers(1, 6, 2)
        costs = rng.integers(0, 4, (n_rows, n_cols)).astype(float)
        result = solve_assignment(costs, np.inf)
        assert result.total_cost(costs) == brute_force_min(costs)


@given(cost_matrices, st.floats(0, 1))
def test_partition_property(costs, max_cost):
    result = solve_assignment(costs, max_cost)
    assert_partition(result, *costs.shape)
    for i, j in result.matches:
        assert costs[i, j] <= max_cost


def test_row_constant_invariance():
    rng = np.random.default_rng(8)
    for _ in range(300):
        n_rows = int(rng.integers(1, 6))
        n_cols = int(rng.integers(n_rows, 8))
        costs = rng.uniform(0, 1, (n_rows, n_cols))
        shifted = costs.copy()
        shifted[int(rng.integers(n_rows))] += rng.uniform(0, 5)
        assert (solve_assignment(costs, np.inf).matches ==
                solve_assignment(shifted, np.inf).matches)


def test_ties_prefer_lowest_row_then_lowest_column():
    result = solve_assignment(np.array([[0, 0, 0], [1, 1, 1], [0, 1, 1]]), 1.0)
    assert result.matches == [(0, 1), (1, 2), (2, 0)]
    assert solve_assignment(np.ones((3, 3)), 1.0).matches == [(0, 0), (1, 1), (2, 2)]


def test_ties_prefer_matching_lower_rows():
    # one column, three equally good rows
    result = solve_assignment(np.zeros((3, 1)), 1.0)
    assert result.matches == [(0, 0)]
    assert result.unmatched_tracks == [1, 2]
    result = solve_assignment(np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 1.0]]), 1.0)
    assert result.matches == [(0, 1), (1, 0)]


def test_ties_match_lexicographic_brute_force():
    rng = np.random.default_rng(29)
    for _ in range(500):
        shape = tuple(rng.integers(1, 6, size=2))
        costs = rng.integers(0, 2, size=shape).astype(float)
        result = solve_assignment(costs, 1.0)
        assert result.matches == brute_force_smallest(costs)

import numpy as np
import pytest

from qconf.errors import InvariantError
from qconf.lp import lexmin_optimal_vertex, solve_covering_lp


def test_simple_cover():
    # x1 + x2 >= 1, x1 >= 0.3 ; min x1 + x2
    res = solve_covering_lp([[1, 1], [1, 0]], [1, 0.3], [1, 1])
    assert abs(res.value - 1) < 1e-12
    assert np.all(np.array([[1, 1], [1, 0]]) @ res.x >= np.array([1, 0.3]) - 1e-12)


def test_weighted_objective():
    res = solve_covering_lp([[1, 1]], [2], [3, 1])
    assert abs(res.value - 2) < 1e-12 and np.allclose(res.x, [0, 2])


def test_strong_duality():
    rng = np.random.default_rng(0)
    for _ in range(20):
        a = rng.integers(0, 2, size=(5, 3)).astype(float)
        a[a.sum(axis=1) == 0, 0] = 1
        b = rng.uniform(-1, 2, size=5)
        c = rng.uniform(0.5, 2, size=3)
        res = solve_covering_lp(a, b, c)
        assert abs(c @ res.x - res.value) < 1e-9
        assert abs(b @ res.y - res.value) < 1e-9
        assert np.all(a @ res.x >= b - 1e-9)


def test_infeasible_raises():
    with pytest.raises(InvariantError):
        solve_covering_lp([[0.0, 0.0]], [1.0], [1.0, 1.0])


def test_lexmin_prefers_small_leading_coordinates():
    # x1 + x2 >= 1 has optimal face x1 + x2 = 1; lexmin is (0, 1)
    total, x = lexmin_optimal_vertex([[1, 1]], [1])
    assert abs(total - 1) < 1e-12 and np.allclose(x, [0, 1], atol=1e-9)


def test_lexmin_three():
    a = [[1, 1, 0], [0, 1, 1], [1, 0, 1]]
    total, x = lexmin_optimal_vertex(a, [1, 1, 1])
    assert abs(total - 1.5) < 1e-9
    assert np.allclose(x, [0.5, 0.5, 0.5], atol=1e-8)

import itertools

import numpy as np
import pytest

from qconf.errors import InputError
from qconf.trees import EdgeWeightGraph, tree_ghz_rate, tree_rate

import oracles


def test_all_ones_triangle():
    res = tree_ghz_rate(EdgeWeightGraph(3, {(0, 1): 1, (0, 2): 1, (1, 2): 1}))
    best, _ = oracles.best_tree_rate(3, lambda i, j: 1.0)
    assert abs(res.rate - 0.5) < 1e-12 and abs(best - 0.5) < 1e-12
    # lexicographic tie-break picks the first two edges
    assert res.tree == [(0, 1), (0, 2)]


def test_weighted_triangle():
    g = EdgeWeightGraph(3, {(0, 1): 2, (0, 2): 2, (1, 2): 1})
    rates = sorted(tree_rate(g, t) for t in oracles.prufer_trees(3))
    assert rates == pytest.approx([2 / 3, 2 / 3, 1.0])
    res = tree_ghz_rate(g)
    assert abs(res.rate - 1.0) < 1e-12 and res.tree == [(0, 1), (0, 2)]


def test_star_with_dead_leaf():
    g = EdgeWeightGraph(4, {(0, 1): 1, (0, 2): 1, (0, 3): 0})
    res = tree_ghz_rate(g)
    assert res.rate == 0 and res.tree == [] and not res.to_dict()["connected"]


def test_rejects_small_and_negative():
    with pytest.raises(InputError):
        tree_ghz_rate(EdgeWeightGraph(1, {}))
    with pytest.raises(InputError):
        EdgeWeightGraph(3, {(0, 1): -1})
    with pytest.raises(InputError):
        EdgeWeightGraph(3, {(0, 3): 1})


def test_prufer_count():
    for m in range(2, 7):
        trees = list(oracles.prufer_trees(m))
        assert len(trees) == m ** (m - 2)
        assert len({tuple(t) for t in trees}) == len(trees)


@pytest.mark.parametrize("m", [2, 3, 4, 5, 6])
def test_matches_enumeration(m):
    rng = np.random.default_rng(m)
    for _ in range(5):
        w = {e: float(rng.choice([0.0, 0.5, 1.0, 2.0])) for e in itertools.combinations(range(m), 2)}
        g = EdgeWeightGraph(m, w)
        res = tree_ghz_rate(g)
        best, ties = oracles.best_tree_rate(m, g.weight)
        assert abs(res.rate - best) <= 1e-9
        if best > 0:
            assert res.tree in ties

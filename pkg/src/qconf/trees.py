"""GHZ rates from EPR pairs distilled along a spanning tree.

With EPR rates w_e on the edges of a spanning tree, time sharing yields GHZ
states at rate (sum_e 1/w_e)^-1. Maximizing over trees is a minimum spanning
tree problem with edge costs 1/w_e.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import InputError
from .rates import eoa_lower_bound
from .states import MultipartiteState


@dataclass
class EdgeWeightGraph:
    """Complete graph on m vertices; absent edges carry weight 0."""

    m: int
    weights: dict = field(default_factory=dict)
    labels: list[str] | None = None

    def __post_init__(self):
        norm = {}
        for (i, j), w in self.weights.items():
            i, j = int(i), int(j)
            if i == j or not (0 <= i < self.m and 0 <= j < self.m):
                raise InputError(f"invalid edge ({i}, {j}) for {self.m} vertices")
            if w < 0:
                raise InputError(f"edge ({i}, {j}) has negative weight {w}")
            norm[(min(i, j), max(i, j))] = float(w)
        self.weights = norm
        if self.labels is None:
            self.labels = [f"A{k + 1}" for k in range(self.m)]

    def weight(self, i: int, j: int) -> float:
        return self.weights.get((min(i, j), max(i, j)), 0.0)

    def edges(self):
        return list(itertools.combinations(range(self.m), 2))


@dataclass
class TreeResult:
    rate: float
    tree: list[tuple[int, int]]
    graph: EdgeWeightGraph

    def to_dict(self) -> dict:
        lab = self.graph.labels
        return {
            "theorem": "ghz-tree",
            "raw": self.rate,
            "clamped": self.rate,
            "tree": [[lab[i], lab[j]] for i, j in self.tree],
            "weights": {f"{lab[i]}-{lab[j]}": w for (i, j), w in sorted(self.graph.weights.items())},
            "connected": bool(self.tree) or self.graph.m < 2,
        }


def tree_rate(graph: EdgeWeightGraph, tree) -> float:
    """(sum over tree edges of 1/w)^-1, zero if an edge has weight 0."""
    inv = 0.0
    for i, j in tree:
        w = graph.weight(i, j)
        if w <= 0:
            return 0.0
        inv += 1.0 / w
    return 1.0 / inv


def tree_ghz_rate(graph: EdgeWeightGraph) -> TreeResult:
    """Best spanning-tree GHZ rate via Kruskal on costs 1/w."""
    m = graph.m
    if m < 2:
        raise InputError("a spanning-tree rate needs at least two parties")
    candidates = sorted(
        ((1.0 / w, e) for e, w in graph.weights.items() if w > 0),
        key=lambda t: (t[0], t[1]),
    )
    parent = list(range(m))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    tree = []
    for _, (i, j) in candidates:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            tree.append((i, j))
    if len(tree) < m - 1:
        return TreeResult(0.0, [], graph)
    return TreeResult(tree_rate(graph, tree), sorted(tree), graph)


def eoa_graph(state: MultipartiteState) -> EdgeWeightGraph:
    """Edge weights max(0, identity-map entanglement-of-assistance bound)."""
    rho = state.legitimate()
    m = rho.m
    weights = {(i, j): max(0.0, eoa_lower_bound(rho, i, j)) for i, j in itertools.combinations(range(m), 2)}
    return EdgeWeightGraph(m, weights, rho.party_labels)


def tree_ghz_rate_from_state(state: MultipartiteState) -> TreeResult:
    return tree_ghz_rate(eoa_graph(state))

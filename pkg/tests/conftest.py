from __future__ import annotations

import numpy as np
import pytest

from dynembed.graph import WeightedGraph
from dynembed.harness import synthetic_graph


def random_graph(seed: int, n: int, w_max: int, extra: int | None = None,
                 init_upper: int | None = None) -> WeightedGraph:
    rng = np.random.default_rng(seed)
    return synthetic_graph(n, w_max, rng, extra_edges=extra, init_w_upper=init_upper)


def bellman_ford(g: WeightedGraph, source: int) -> list[int]:
    """Independent O(n*m) shortest-path oracle."""
    inf = float("inf")
    dist = [inf] * g.n
    dist[source] = 0
    edges = g.edge_list()
    for _ in range(g.n - 1):
        changed = False
        for u, v, w in edges:
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                changed = True
            if dist[v] + w < dist[u]:
                dist[u] = dist[v] + w
                changed = True
        if not changed:
            break
    return dist


@pytest.fixture
def path3() -> WeightedGraph:
    return WeightedGraph(3, [(0, 1, 1), (1, 2, 1)], w_max=8)

"""Backend equivalence and kernel-level checks."""

from __future__ import annotations

import numpy as np
import pytest

from dynembed.decomposition import draw_radii
from dynembed.kernels import UNREACHED, _python as kpy

try:
    from dynembed.kernels import _numba as knb

    BACKENDS = [("python", kpy), ("numba", knb)]
except ImportError:  # pragma: no cover
    knb = None
    BACKENDS = [("python", kpy)]

from conftest import random_graph


def _filtered(g, thr):
    w2 = 2 * g.weights
    w2[g.weights <= thr] = 0
    return w2


@pytest.mark.parametrize("name,kern", BACKENDS)
def test_dijkstra_path(name, kern, path3):
    dist = kern.dijkstra(path3.indptr, path3.indices, path3.weights, 0, -1)
    assert dist.tolist() == [0, 1, 2]


@pytest.mark.parametrize("name,kern", BACKENDS)
def test_dijkstra_cap_omits(name, kern, path3):
    dist = kern.dijkstra(path3.indptr, path3.indices, path3.weights, 0, 1)
    assert dist.tolist() == [0, 1, UNREACHED]


@pytest.mark.skipif(knb is None, reason="numba unavailable")
def test_backends_identical():
    rng = np.random.default_rng(5)
    for trial in range(25):
        n = int(rng.integers(2, 50))
        g = random_graph(100 + trial, n, 32, extra=int(rng.integers(0, 3 * n)))
        w2 = _filtered(g, int(rng.integers(0, 4)))
        src = int(rng.integers(0, n))
        cap = int(rng.integers(0, 40)) if rng.random() < 0.7 else -1
        assert np.array_equal(
            kpy.dijkstra(g.indptr, g.indices, w2, src, cap),
            knb.dijkstra(g.indptr, g.indices, w2, src, cap),
        )
        assert np.array_equal(
            kpy.all_pairs(g.indptr, g.indices, w2),
            knb.all_pairs(g.indptr, g.indices, w2),
        )
        radii = draw_radii(0.3, int(rng.integers(0, 20)), n, np.random.default_rng(trial))
        la, ca = kpy.carve(g.indptr, g.indices, w2, radii)
        lb, cb = knb.carve(g.indptr, g.indices, w2, radii)
        assert np.array_equal(la, lb)
        assert np.array_equal(ca, cb)


@pytest.mark.parametrize("name,kern", BACKENDS)
def test_carve_covers_and_respects_radii(name, kern):
    rng = np.random.default_rng(9)
    for trial in range(10):
        n = int(rng.integers(3, 40))
        g = random_graph(300 + trial, n, 16, extra=int(rng.integers(0, 2 * n)))
        w2 = _filtered(g, int(rng.integers(0, 3)))
        radii = draw_radii(0.4, int(rng.integers(0, 12)), n, np.random.default_rng(trial))
        labels, centers = kern.carve(g.indptr, g.indices, w2, radii)
        assert (labels >= 0).all()
        k = len(centers)
        assert set(labels.tolist()) == set(range(k))
        # members were absorbed at induced distance <= radius; the global
        # filtered distance can only be smaller, so it must satisfy the cap too
        for c in range(k):
            src = int(centers[c])
            assert labels[src] == c
            dist = kern.dijkstra(g.indptr, g.indices, w2, src, -1)
            members = np.flatnonzero(labels == c)
            assert (dist[members] <= radii[c]).all()


@pytest.mark.parametrize("name,kern", BACKENDS)
def test_carve_zero_weight_components_stay_whole(name, kern):
    # 0-weight edges bind vertices into one cluster no matter the radius
    g = random_graph(17, 12, 8, extra=10)
    w2 = _filtered(g, 8)  # every edge zeroed
    radii = np.zeros(12, dtype=np.int64)
    labels, centers = kern.carve(g.indptr, g.indices, w2, radii)
    assert len(centers) == 1
    assert (labels == 0).all()

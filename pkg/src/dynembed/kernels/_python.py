"""Pure-Python/numpy reference implementations of the hot kernels.

Same contracts and bit-identical outputs as the numba backend in
``_numba.py``; selected via the ``DYNEMBED_NO_NUMBA`` environment flag
(see ``kernels/__init__.py``).

All kernels operate on CSR adjacency arrays (``indptr``, ``indices``,
``weights``) with int64 weights >= 0. ``UNREACHED`` marks vertices that
are unreachable or beyond the distance cap.
"""

from __future__ import annotations

import heapq

import numpy as np

UNREACHED = np.int64(2**62)


def dijkstra(indptr, indices, weights, source, cap):
    """Single-source shortest paths, optionally capped.

    Parameters
    ----------
    indptr, indices, weights : CSR arrays (int64 weights >= 0).
    source : vertex id.
    cap : max distance to settle; vertices farther than ``cap`` are left
        at ``UNREACHED``. Negative means no cap.

    Returns
    -------
    dist : int64 array of length n.
    """
    n = indptr.shape[0] - 1
    lim = int(cap) if cap >= 0 else int(UNREACHED) - 1
    dist = np.full(n, UNREACHED, dtype=np.int64)
    dist[source] = 0
    heap = [(0, int(source))]
    done = np.zeros(n, dtype=bool)
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        if d > lim:
            break
        done[u] = True
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            nd = d + weights[e]
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (int(nd), int(v)))
    dist[dist > lim] = UNREACHED
    return dist


def all_pairs(indptr, indices, weights):
    """Exact all-pairs distances as an (n, n) int64 matrix."""
    n = indptr.shape[0] - 1
    out = np.empty((n, n), dtype=np.int64)
    for s in range(n):
        out[s] = dijkstra(indptr, indices, weights, s, -1)
    return out


def carve(indptr, indices, weights, radii):
    """Greedy ball carving over the graph, in ascending vertex-id order.

    Visits vertices 0..n-1; each still-unlabelled vertex seeds cluster k
    and absorbs every unlabelled vertex within distance ``radii[k]`` of
    it, where distances are measured in the subgraph induced on the
    unlabelled vertices (so every cluster is internally connected).

    Returns
    -------
    labels : int64 array, labels[v] = cluster index.
    centers : int64 array of length k, centers[k] = seeding vertex.
    """
    n = indptr.shape[0] - 1
    labels = np.full(n, -1, dtype=np.int64)
    centers = np.empty(n, dtype=np.int64)
    dist = np.full(n, UNREACHED, dtype=np.int64)
    k = 0
    for c in range(n):
        if labels[c] != -1:
            continue
        r = radii[k]
        touched = [c]
        dist[c] = 0
        heap = [(0, c)]
        while heap:
            d, u = heapq.heappop(heap)
            if labels[u] != -1 or d > dist[u]:
                continue
            if d > r:
                break
            labels[u] = k
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                if labels[v] != -1:
                    continue
                nd = d + weights[e]
                if nd < dist[v]:
                    if dist[v] == UNREACHED:
                        touched.append(int(v))
                    dist[v] = nd
                    heapq.heappush(heap, (int(nd), int(v)))
        for v in touched:
            dist[v] = UNREACHED
        centers[k] = c
        k += 1
    return labels, centers[:k]

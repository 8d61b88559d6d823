"""Numba-compiled hot kernels: capped Dijkstra, all-pairs sweep, ball carving.

Bit-identical to ``_python.py`` (the heap orders by (dist, vertex) like
Python's tuple heap, so even pop order matches).
"""

from __future__ import annotations

import numpy as np
from numba import njit

UNREACHED = np.int64(2**62)


@njit(cache=True)
def _heap_push(hd, hv, size, d, v):
    i = size
    hd[i] = d
    hv[i] = v
    while i > 0:
        p = (i - 1) >> 1
        if hd[p] > hd[i] or (hd[p] == hd[i] and hv[p] > hv[i]):
            hd[p], hd[i] = hd[i], hd[p]
            hv[p], hv[i] = hv[i], hv[p]
            i = p
        else:
            break
    return size + 1


@njit(cache=True)
def _heap_pop(hd, hv, size):
    d = hd[0]
    v = hv[0]
    size -= 1
    hd[0] = hd[size]
    hv[0] = hv[size]
    i = 0
    while True:
        l = 2 * i + 1
        if l >= size:
            break
        m = l
        r = l + 1
        if r < size and (hd[r] < hd[l] or (hd[r] == hd[l] and hv[r] < hv[l])):
            m = r
        if hd[m] < hd[i] or (hd[m] == hd[i] and hv[m] < hv[i]):
            hd[i], hd[m] = hd[m], hd[i]
            hv[i], hv[m] = hv[m], hv[i]
            i = m
        else:
            break
    return d, v, size


@njit(cache=True)
def _sssp(indptr, indices, weights, source, lim, dist, done, hd, hv):
    dist[source] = 0
    done[source] = False
    hsize = _heap_push(hd, hv, 0, 0, source)
    while hsize > 0:
        d, u, hsize = _heap_pop(hd, hv, hsize)
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
                hsize = _heap_push(hd, hv, hsize, nd, v)


@njit(cache=True)
def dijkstra(indptr, indices, weights, source, cap):
    n = indptr.shape[0] - 1
    lim = cap if cap >= 0 else UNREACHED - 1
    dist = np.full(n, UNREACHED, dtype=np.int64)
    done = np.zeros(n, dtype=np.bool_)
    hcap = 2 * indices.shape[0] + n + 2
    hd = np.empty(hcap, dtype=np.int64)
    hv = np.empty(hcap, dtype=np.int64)
    _sssp(indptr, indices, weights, source, lim, dist, done, hd, hv)
    for v in range(n):
        if dist[v] > lim:
            dist[v] = UNREACHED
    return dist


@njit(cache=True)
def all_pairs(indptr, indices, weights):
    n = indptr.shape[0] - 1
    out = np.empty((n, n), dtype=np.int64)
    lim = UNREACHED - 1
    hcap = 2 * indices.shape[0] + n + 2
    hd = np.empty(hcap, dtype=np.int64)
    hv = np.empty(hcap, dtype=np.int64)
    dist = np.empty(n, dtype=np.int64)
    done = np.empty(n, dtype=np.bool_)
    for s in range(n):
        for v in range(n):
            dist[v] = UNREACHED
            done[v] = False
        _sssp(indptr, indices, weights, s, lim, dist, done, hd, hv)
        out[s] = dist
    return out


@njit(cache=True)
def carve(indptr, indices, weights, radii):
    n = indptr.shape[0] - 1
    labels = np.full(n, -1, dtype=np.int64)
    centers = np.empty(n, dtype=np.int64)
    dist = np.full(n, UNREACHED, dtype=np.int64)
    touched = np.empty(n, dtype=np.int64)
    hcap = 2 * indices.shape[0] + n + 2
    hd = np.empty(hcap, dtype=np.int64)
    hv = np.empty(hcap, dtype=np.int64)
    k = 0
    for c in range(n):
        if labels[c] != -1:
            continue
        r = radii[k]
        ntouched = 0
        touched[ntouched] = c
        ntouched += 1
        dist[c] = 0
        hsize = _heap_push(hd, hv, 0, 0, c)
        while hsize > 0:
            d, u, hsize = _heap_pop(hd, hv, hsize)
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
                        touched[ntouched] = v
                        ntouched += 1
                    dist[v] = nd
                    hsize = _heap_push(hd, hv, hsize, nd, v)
        for t in range(ntouched):
            dist[touched[t]] = UNREACHED
        centers[k] = c
        k += 1
    return labels, centers[:k]

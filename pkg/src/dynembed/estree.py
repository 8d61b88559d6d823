"""Bounded-depth decremental shortest-path structure (per-cluster).

Maintains exact distances from a fixed center to the members of one
cluster, measured in the subgraph induced on the members with the
level's zero filter applied (raw weight <= zero_w_max counts as 0) and
scaled x2. Supports edge-weight increases via a two-phase repair:
phase 1 finds the vertices whose distance must grow, phase 2 re-settles
them Dijkstra-style from the unaffected boundary. Members pushed beyond
``cap2`` (or disconnected) are reported as overflow; the caller splits
them off and builds fresh structures, so an overflowing tree is never
reused.

Zero-weight edges create equal-distance support cycles that the classic
repair mis-handles, so phase 1 processes each distance value as one
batch closed under zero edges and seeds support only from outside the
batch.
"""

from __future__ import annotations

import heapq

import numpy as np

from .graph import WeightedGraph

_INF = 2**62


class EsTree:
    """Center-rooted distances over one cluster, valid while dist <= cap2."""

    def __init__(
        self,
        g: WeightedGraph,
        members,
        center: int,
        cap2: int,
        zero_w_max: int,
    ):
        self.g = g
        self.members = np.array(sorted(int(v) for v in members), dtype=np.int64)
        self.in_members = np.zeros(g.n, dtype=bool)
        self.in_members[self.members] = True
        self.center = int(center)
        if not self.in_members[self.center]:
            raise ValueError("center must be a member")
        self.cap2 = int(cap2)
        self.zero_w_max = int(zero_w_max)
        self.dist: dict[int, int] = {}
        self.overflow_at_build = self._rebuild()

    def _eff2(self, w_raw: int) -> int:
        return 0 if w_raw <= self.zero_w_max else 2 * w_raw

    def _neighbors_eff(self, v: int):
        g = self.g
        for e in range(g.indptr[v], g.indptr[v + 1]):
            z = int(g.indices[e])
            if self.in_members[z]:
                yield z, self._eff2(int(g.weights[e]))

    def _rebuild(self) -> list[int]:
        """Capped Dijkstra from the center; returns members left beyond cap2."""
        self.dist = {}
        best = {self.center: 0}
        heap = [(0, self.center)]
        while heap:
            d, u = heapq.heappop(heap)
            if u in self.dist or d > best.get(u, _INF):
                continue
            if d > self.cap2:
                break
            self.dist[u] = d
            for z, w2 in self._neighbors_eff(u):
                nd = d + w2
                if z not in self.dist and nd < best.get(z, _INF):
                    best[z] = nd
                    heapq.heappush(heap, (nd, z))
        return [int(v) for v in self.members if int(v) not in self.dist]

    def distance2(self, v: int) -> int:
        return self.dist[v]

    def increase(self, u: int, v: int, w_old_raw: int, w_new_raw: int) -> list[int]:
        """Repair after edge (u, v) rose from w_old_raw to w_new_raw.

        The underlying graph must already hold the new weight. Returns the
        members whose distance now exceeds cap2 (they are removed from the
        structure); empty if the increase was absorbed.
        """
        old2 = self._eff2(w_old_raw)
        new2 = self._eff2(w_new_raw)
        if old2 == new2:
            return []
        du, dv = self.dist[u], self.dist[v]
        if du > dv:
            u, v, du, dv = v, u, dv, du
        if dv != du + old2:
            return []  # edge was not on any shortest path
        # A zero edge supports both endpoints (equal distance): seed both.
        seeds = [v] if dv > du else [u, v]

        affected = self._find_affected(seeds, dv)
        if not affected:
            return []
        return self._regrow(affected)

    def _find_affected(self, seeds: list[int], d0: int) -> set[int]:
        dist = self.dist
        aff: set[int] = set()
        resolved: set[int] = set()
        heap = [(d0, s) for s in seeds]
        heapq.heapify(heap)
        while heap:
            d, x0 = heapq.heappop(heap)
            if x0 in resolved or x0 in aff or dist.get(x0) != d:
                continue
            # batch: every candidate at distance d, closed under zero edges
            batch = {x0}
            queue = [x0]
            while heap and heap[0][0] == d:
                _, y = heapq.heappop(heap)
                if y not in batch and y not in resolved and y not in aff and dist.get(y) == d:
                    batch.add(y)
                    queue.append(y)
            while queue:
                y = queue.pop()
                for z, w2 in self._neighbors_eff(y):
                    if (
                        w2 == 0
                        and z not in batch
                        and z not in resolved
                        and z not in aff
                        and dist.get(z) == d
                    ):
                        batch.add(z)
                        queue.append(z)
            # support seeds from outside the batch (current weights); the
            # center's distance is axiomatically 0, it never needs support
            sup: set[int] = set()
            stack = []
            for y in batch:
                if y == self.center:
                    sup.add(y)
                    stack.append(y)
                    continue
                for z, w2 in self._neighbors_eff(y):
                    if z in batch or z in aff:
                        continue
                    dz = dist.get(z)
                    if dz is not None and dz + w2 == d:
                        sup.add(y)
                        stack.append(y)
                        break
            # propagate support along zero edges inside the batch
            while stack:
                y = stack.pop()
                for z, w2 in self._neighbors_eff(y):
                    if w2 == 0 and z in batch and z not in sup:
                        sup.add(z)
                        stack.append(z)
            for y in batch:
                resolved.add(y)
                if y in sup:
                    continue
                aff.add(y)
                for z, w2 in self._neighbors_eff(y):
                    if w2 > 0 and z not in aff and z not in resolved:
                        dz = dist.get(z)
                        if dz is not None and dz == d + w2:
                            heapq.heappush(heap, (dz, z))
        return aff

    def _regrow(self, affected: set[int]) -> list[int]:
        dist = self.dist
        best: dict[int, int] = {}
        heap = []
        for x in affected:
            b = _INF
            for z, w2 in self._neighbors_eff(x):
                if z in affected:
                    continue
                dz = dist.get(z)
                if dz is not None and dz + w2 < b:
                    b = dz + w2
            if b < _INF:
                best[x] = b
                heapq.heappush(heap, (b, x))
        settled: set[int] = set()
        while heap:
            d, x = heapq.heappop(heap)
            if x in settled or d > best.get(x, _INF):
                continue
            if d > self.cap2:
                break
            settled.add(x)
            dist[x] = d
            for z, w2 in self._neighbors_eff(x):
                if z in affected and z not in settled:
                    nd = d + w2
                    if nd < best.get(z, _INF):
                        best[z] = nd
                        heapq.heappush(heap, (nd, z))
        overflow = sorted(x for x in affected if x not in settled)
        for x in overflow:
            dist.pop(x, None)
        return overflow

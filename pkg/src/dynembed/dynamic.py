"""Decremental maintenance of the multi-scale embedding.

One ScaleMaintainer per ladder level keeps a live clustering of the
level's zero-filtered metric, a center-rooted depth-bounded structure
per cluster, and one coin-flip side bit per cluster. A weight increase
is forwarded to a level only when it changes that level's filtered
weight; if a cluster member is pushed past the depth cap the cluster
splits (never merges): the in-cap remainder keeps its center, the
overflow region is re-carved into fresh balls, and the larger side
keeps the old side bit while every other piece flips a fresh coin.

Every update yields an EmbeddingDelta listing exactly the coordinates
that changed (net, per vertex and level); replaying the delta log from
t=0 reproduces the embedding bit-for-bit.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from . import kernels
from .decomposition import build_cut, draw_radii, ldrd, radius_cap2
from .embedding import MultiScaleEmbedding, build_scale_ladder, level_rng
from .estree import EsTree
from .graph import (
    UpdateEvent,
    WeightedGraph,
    all_pairs_distances,
    apply_weight_increase,
)


@dataclass
class ClusterState:
    center: int
    bit: int
    tree: EsTree

    @property
    def members(self) -> np.ndarray:
        return self.tree.members


class ScaleMaintainer:
    """Live (beta, R_i)-decomposition plus side bits for one ladder level."""

    def __init__(self, g: WeightedGraph, level, rng: np.random.Generator, c0: float = 2.0):
        self.g = g
        self.level = level
        self.r2 = level.r2
        self.zero_w_max = level.zero_w_max
        self.beta = level.beta
        self.cap2 = radius_cap2(level.r2, g.n)
        self.rng = rng
        clustering = ldrd(g, level.r2, rng, c0)
        cut = build_cut(clustering, rng)  # same draw order as the static build
        self.cluster_of = clustering.cluster_of.astype(np.int64).copy()
        self.clusters: dict[int, ClusterState] = {}
        for k in range(clustering.k):
            tree = EsTree(
                g, clustering.members[k], int(clustering.centers[k]), self.cap2, self.zero_w_max
            )
            if tree.overflow_at_build:
                raise AssertionError("fresh carve exceeded the depth cap")
            self.clusters[k] = ClusterState(
                center=int(clustering.centers[k]), bit=int(cut.side_bit[k]), tree=tree
            )
        self.next_key = clustering.k
        self.split_count = np.zeros(g.n, dtype=np.int64)

    def _eff2(self, w_raw: int) -> int:
        return 0 if w_raw <= self.zero_w_max else 2 * w_raw

    def vertex_bit(self, v: int) -> int:
        return self.clusters[int(self.cluster_of[v])].bit

    def bits_array(self) -> np.ndarray:
        return np.array(
            [self.clusters[int(k)].bit for k in self.cluster_of], dtype=np.uint8
        )

    def apply_increase(self, u: int, v: int, w_old: int, w_new: int):
        """Forward one weight increase; returns net (vertex, old_bit, new_bit) changes."""
        if self._eff2(w_old) == self._eff2(w_new):
            return []  # still below the zero threshold at this level
        ku, kv = int(self.cluster_of[u]), int(self.cluster_of[v])
        if ku != kv:
            return []  # inter-cluster edge: induced structures unaffected
        overflow = self.clusters[ku].tree.increase(u, v, w_old, w_new)
        if not overflow:
            return []
        _, changes = self.split_cluster(ku, overflow)
        return changes

    def split_cluster(self, cluster_key: int, overflow_vertices):
        """Carve the overflow region off cluster ``cluster_key``.

        Returns (new_cluster_keys, net bit changes). Cascades if removing
        the overflow pushes further remainder members past the cap.
        """
        new_keys: list[int] = []
        raw_changes: list[tuple[int, int, int]] = []
        work = [(cluster_key, [int(x) for x in overflow_vertices])]
        while work:
            key, overflow = work.pop()
            cs = self.clusters[key]
            mem = set(int(x) for x in cs.members)
            over = sorted(set(overflow))
            if not over or not all(o in mem for o in over):
                raise ValueError("overflow must be a nonempty subset of the cluster")
            if cs.center in over:
                raise ValueError("cluster center cannot overflow its own root")
            keep = sorted(mem - set(over))
            old_bit = cs.bit
            parts = self._carve_region(over)
            draws = self.rng.integers(0, 2, size=len(parts) + 1)
            if len(keep) >= len(over):
                keeper = -1  # remainder keeps the bit
            else:
                keeper = int(np.argmax([len(pm) for _, pm in parts]))
            new_bit = old_bit if keeper == -1 else int(draws[0])
            cs.bit = new_bit
            cs.tree = EsTree(self.g, keep, cs.center, self.cap2, self.zero_w_max)
            if new_bit != old_bit:
                for x in keep:
                    raw_changes.append((x, old_bit, new_bit))
            if keeper != -1:
                for x in keep:
                    self.split_count[x] += 1
            for i, (center, pm) in enumerate(parts):
                bit = old_bit if i == keeper else int(draws[1 + i])
                nk = self.next_key
                self.next_key += 1
                tree = EsTree(self.g, pm, center, self.cap2, self.zero_w_max)
                if tree.overflow_at_build:
                    raise AssertionError("fresh carve exceeded the depth cap")
                self.clusters[nk] = ClusterState(center=center, bit=bit, tree=tree)
                for x in pm:
                    self.cluster_of[x] = nk
                    if i != keeper:
                        self.split_count[x] += 1
                new_keys.append(nk)
                if bit != old_bit:
                    for x in pm:
                        raw_changes.append((x, old_bit, bit))
            cascade = cs.tree.overflow_at_build
            if cascade:
                work.append((key, cascade))
        net: dict[int, tuple[int, int]] = {}
        for x, ob, nb in raw_changes:
            net[x] = (net[x][0], nb) if x in net else (ob, nb)
        changes = sorted((x, ob, nb) for x, (ob, nb) in net.items() if ob != nb)
        return new_keys, changes

    def _carve_region(self, verts: list[int]):
        """Ball-carve the induced zero-filtered subgraph on ``verts``.

        Returns [(center, member_list)] in carve order (original ids).
        """
        loc = {v: i for i, v in enumerate(verts)}
        nn = len(verts)
        deg = np.zeros(nn, dtype=np.int64)
        g = self.g
        for v in verts:
            for e in range(g.indptr[v], g.indptr[v + 1]):
                if int(g.indices[e]) in loc:
                    deg[loc[v]] += 1
        indptr = np.zeros(nn + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        indices = np.empty(int(indptr[-1]), dtype=np.int64)
        weights2 = np.empty(int(indptr[-1]), dtype=np.int64)
        fill = indptr[:-1].copy()
        for v in verts:
            i = loc[v]
            for e in range(g.indptr[v], g.indptr[v + 1]):
                z = int(g.indices[e])
                if z in loc:
                    indices[fill[i]] = loc[z]
                    weights2[fill[i]] = self._eff2(int(g.weights[e]))
                    fill[i] += 1
        radii = draw_radii(self.beta, self.cap2, nn, self.rng)
        labels, centers = kernels.carve(indptr, indices, weights2, radii)
        parts = []
        for k in range(len(centers)):
            pm = [verts[i] for i in range(nn) if labels[i] == k]
            parts.append((verts[int(centers[k])], pm))
        return parts


def split_cluster(m: ScaleMaintainer, cluster_key: int, overflow_vertices, rng=None):
    """Module-level alias for ScaleMaintainer.split_cluster (rng lives on m)."""
    if rng is not None:
        m.rng = rng
    return m.split_cluster(cluster_key, overflow_vertices)


@dataclass
class EmbeddingDelta:
    """Coordinate changes of one update: (vertex, level, old, new), scaled x2."""

    t: int
    changes: list[tuple[int, int, int, int]]


class DynamicEmbedding:
    """Maintained embedding view + per-level maintainers + delta log."""

    def __init__(self, g: WeightedGraph, seed: int, c0: float = 2.0):
        self.g = g
        self.ladder = build_scale_ladder(g, c0)
        self.maintainers = [
            ScaleMaintainer(g, level, level_rng(seed, level.index), c0)
            for level in self.ladder.levels
        ]
        bits = np.zeros((g.n, self.ladder.num_levels), dtype=np.uint8)
        for j, m in enumerate(self.maintainers):
            bits[:, j] = m.bits_array()
        self.view = MultiScaleEmbedding(self.ladder, bits)
        self.t = 0
        r2s = self.ladder.r2s
        init_changes = [
            (v, j + 1, 0, int(r2s[j]))
            for v in range(g.n)
            for j in range(self.ladder.num_levels)
            if bits[v, j]
        ]
        self.deltas = [EmbeddingDelta(0, init_changes)]

    @property
    def bits(self) -> np.ndarray:
        return self.view.bits

    @property
    def num_levels(self) -> int:
        return self.ladder.num_levels

    def handle_update(self, ev: UpdateEvent) -> EmbeddingDelta:
        w_old = self.g.weight(ev.u, ev.v)
        apply_weight_increase(self.g, ev)
        self.t += 1
        changes = []
        for j, m in enumerate(self.maintainers):
            r2 = int(self.ladder.r2s[j])
            for x, old_bit, new_bit in m.apply_increase(ev.u, ev.v, w_old, ev.new_weight):
                self.bits[x, j] = new_bit
                changes.append((x, j + 1, r2 if old_bit else 0, r2 if new_bit else 0))
        changes.sort()
        delta = EmbeddingDelta(self.t, changes)
        self.deltas.append(delta)
        return delta

    def query(self, u: int, v: int, p) -> float:
        return self.view.lp_distance(u, v, p)


def init_dynamic(g: WeightedGraph, seed: int, c0: float = 2.0) -> DynamicEmbedding:
    """Build the maintained embedding; the initial state is delta #0."""
    return DynamicEmbedding(g, seed, c0)


def handle_update(d: DynamicEmbedding, ev: UpdateEvent) -> EmbeddingDelta:
    return d.handle_update(ev)


def query_dynamic(d: DynamicEmbedding, u: int, v: int, p) -> float:
    return d.query(u, v, p)


@dataclass
class AuditReport:
    t: int
    findings: list[str]

    @property
    def clean(self) -> bool:
        return not self.findings


def audit_state(d: DynamicEmbedding) -> AuditReport:
    """Exact per-level checks against the current graph.

    Verifies, per level: the clusters partition V; weak diameter (in G,
    original weights) within R_i; pairs below the zero threshold
    co-clustered; the embedding view consistent with the maintained bits;
    and every member within the depth cap of its cluster structure.
    """
    g = d.g
    n = g.n
    dist = all_pairs_distances(g)
    findings: list[str] = []
    for j, m in enumerate(d.maintainers):
        tag = f"level {j + 1} (r2={m.r2})"
        counted = np.zeros(n, dtype=np.int64)
        for key, cs in m.clusters.items():
            for v in cs.members:
                counted[v] += 1
                if int(m.cluster_of[v]) != key:
                    findings.append(f"{tag}: vertex {int(v)} cluster_of mismatch")
        if (counted != 1).any():
            bad = int(np.argmax(counted != 1))
            findings.append(f"{tag}: vertex {bad} covered {int(counted[bad])} times")
        half = m.r2 // 2
        for key, cs in m.clusters.items():
            mm = cs.members
            wd = int(dist[np.ix_(mm, mm)].max())
            if wd > half:
                findings.append(
                    f"{tag}: cluster {key} weak diameter {wd} exceeds R={m.r2}/2"
                )
        close_max = (m.r2 + 4 * n - 1) // (4 * n) - 1  # d <= this  <=>  4n*d < r2
        if close_max >= 0:
            close = dist <= close_max
            same = m.cluster_of[:, None] == m.cluster_of[None, :]
            viol = close & ~same
            np.fill_diagonal(viol, False)
            if viol.any():
                u, v = (int(x) for x in np.argwhere(viol)[0])
                findings.append(
                    f"{tag}: pair ({u},{v}) d={int(dist[u, v])} below zero threshold "
                    f"but in different clusters"
                )
        expect = m.bits_array()
        if not np.array_equal(d.bits[:, j], expect):
            v = int(np.argmax(d.bits[:, j] != expect))
            findings.append(f"{tag}: embedding view bit mismatch at vertex {v}")
        for key, cs in m.clusters.items():
            for v in cs.members:
                dd = cs.tree.dist.get(int(v))
                if dd is None or dd > m.cap2:
                    findings.append(
                        f"{tag}: cluster {key} member {int(v)} beyond depth cap"
                    )
                    break
    return AuditReport(t=d.t, findings=findings)


def write_delta_log(deltas, stream) -> None:
    """Delta log lines ``t v i old new`` (coordinates as fixed-point x2 ints)."""
    for d in deltas:
        for v, i, old2, new2 in d.changes:
            stream.write(f"{d.t} {v} {i} {old2} {new2}\n")


def read_delta_log(source) -> list[EmbeddingDelta]:
    if isinstance(source, str):
        source = io.StringIO(source)
    deltas: list[EmbeddingDelta] = []
    for ln, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 5:
            raise ValueError(f"line {ln}: expected 't v i old new'")
        t, v, i, old2, new2 = (int(p) for p in parts)
        if deltas and t == deltas[-1].t:
            deltas[-1].changes.append((v, i, old2, new2))
        elif not deltas or t > deltas[-1].t:
            deltas.append(EmbeddingDelta(t, [(v, i, old2, new2)]))
        else:
            raise ValueError(f"line {ln}: sequence numbers must be non-decreasing")
    return deltas


def replay_deltas(deltas, n: int, num_levels: int) -> np.ndarray:
    """Reconstruct the membership bit matrix from a delta sequence."""
    bits = np.zeros((n, num_levels), dtype=np.uint8)
    for d in deltas:
        for v, i, _old2, new2 in d.changes:
            if not (0 <= v < n and 1 <= i <= num_levels):
                raise ValueError(f"delta ({d.t},{v},{i}) out of range")
            bits[v, i - 1] = 1 if new2 > 0 else 0
    return bits

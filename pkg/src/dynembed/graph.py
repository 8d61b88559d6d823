"""Weighted undirected graphs with increase-only integer weights.

The graph is CSR-backed and exact: weights and distances are 64-bit
integers, so the shortest-path metric never sees floating point. Edges
are fixed at construction; the only mutation is an edge-weight increase
(the decremental update model). ``FilteredGraph`` overlays the
zero-threshold metric (edges at or below a threshold count as length 0)
used by the multi-scale decompositions.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from . import kernels
from .kernels import UNREACHED

# Keeps every scaled path length comfortably below the UNREACHED sentinel.
MAX_NW = 2**59


def _pow2_at_least(x: int) -> int:
    return 1 << (int(x) - 1).bit_length()


@dataclass(frozen=True)
class UpdateEvent:
    """A single decremental update: raise edge (u, v) to ``new_weight``."""

    u: int
    v: int
    new_weight: int


class WeightedGraph:
    """Connected undirected graph, integer weights in [1, w_max].

    Parameters
    ----------
    n : number of vertices (ids 0..n-1).
    edges : iterable of (u, v, w) triples; one entry per undirected edge.
    w_max : maximum admissible weight. Defaults to the largest weight
        present. Updates may never push a weight above ``w_max``.

    Attributes
    ----------
    n, m : vertex and edge counts.
    w_max : the admissible weight ceiling W.
    delta : smallest power of two >= n * w_max (an upper bound on the
        diameter, fixed for the lifetime of the graph).
    indptr, indices, weights : CSR adjacency (both arc directions).
    """

    def __init__(self, n: int, edges, w_max: int | None = None):
        if n < 1:
            raise ValueError("graph needs at least one vertex")
        edges = [(int(u), int(v), int(w)) for u, v, w in edges]
        seen = {}
        for u, v, w in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of vertex range [0,{n})")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise ValueError(f"duplicate edge ({key[0]},{key[1]})")
            if w < 1:
                raise ValueError(f"edge ({u},{v}) has weight {w} < 1")
            seen[key] = w
        if w_max is None:
            w_max = max(seen.values()) if seen else 1
        w_max = int(w_max)
        if w_max < 1:
            raise ValueError("w_max must be a positive integer")
        for (u, v), w in seen.items():
            if w > w_max:
                raise ValueError(f"edge ({u},{v}) weight {w} exceeds w_max={w_max}")
        if n * w_max > MAX_NW:
            raise ValueError(f"n*w_max = {n * w_max} exceeds supported bound {MAX_NW}")

        self.n = n
        self.m = len(seen)
        self.w_max = w_max
        self.delta = _pow2_at_least(n * w_max)

        deg = np.zeros(n, dtype=np.int64)
        for u, v in seen:
            deg[u] += 1
            deg[v] += 1
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(deg, out=self.indptr[1:])
        self.indices = np.empty(2 * self.m, dtype=np.int64)
        self.weights = np.empty(2 * self.m, dtype=np.int64)
        fill = self.indptr[:-1].copy()
        self._edge_pos: dict[tuple[int, int], tuple[int, int]] = {}
        for (u, v), w in seen.items():
            pu, pv = fill[u], fill[v]
            self.indices[pu] = v
            self.weights[pu] = w
            self.indices[pv] = u
            self.weights[pv] = w
            fill[u] += 1
            fill[v] += 1
            self._edge_pos[(u, v)] = (int(pu), int(pv))

        if not self._connected():
            raise ValueError("graph is not connected")

    def _connected(self) -> bool:
        if self.n == 1:
            return True
        seen = np.zeros(self.n, dtype=bool)
        stack = [0]
        seen[0] = True
        count = 1
        while stack:
            u = stack.pop()
            for e in range(self.indptr[u], self.indptr[u + 1]):
                v = int(self.indices[e])
                if not seen[v]:
                    seen[v] = True
                    count += 1
                    stack.append(v)
        return count == self.n

    def _positions(self, u: int, v: int) -> tuple[int, int]:
        key = (u, v) if u < v else (v, u)
        try:
            return self._edge_pos[key]
        except KeyError:
            raise ValueError(f"no edge ({u},{v})") from None

    def has_edge(self, u: int, v: int) -> bool:
        key = (u, v) if u < v else (v, u)
        return key in self._edge_pos

    def weight(self, u: int, v: int) -> int:
        return int(self.weights[self._positions(u, v)[0]])

    def neighbors(self, u: int):
        """Yield (neighbor, weight) pairs of u."""
        for e in range(self.indptr[u], self.indptr[u + 1]):
            yield int(self.indices[e]), int(self.weights[e])

    def edge_list(self):
        """Current edges as sorted (u, v, w) triples with u < v."""
        out = []
        for (u, v), (pu, _) in self._edge_pos.items():
            out.append((u, v, int(self.weights[pu])))
        return sorted(out)

    def copy(self) -> "WeightedGraph":
        return WeightedGraph(self.n, self.edge_list(), w_max=self.w_max)

    def check_vertex(self, u: int) -> None:
        if not (0 <= u < self.n):
            raise ValueError(f"vertex {u} out of range [0,{self.n})")


def dijkstra(g: WeightedGraph, source: int, cap: int | None = None) -> np.ndarray:
    """Exact single-source distances from ``source``.

    Returns an int64 array; entries farther than ``cap`` (when given) are
    ``UNREACHED``.
    """
    g.check_vertex(source)
    if cap is not None and cap < 0:
        raise ValueError("cap must be >= 0")
    return kernels.dijkstra(
        g.indptr, g.indices, g.weights, source, -1 if cap is None else int(cap)
    )


def all_pairs_distances(g: WeightedGraph) -> np.ndarray:
    """Exact (n, n) distance matrix via one Dijkstra per source."""
    return kernels.all_pairs(g.indptr, g.indices, g.weights)


def apply_weight_increase(g: WeightedGraph, ev: UpdateEvent) -> None:
    """Apply a decremental update in place (both arc directions)."""
    pu, pv = g._positions(ev.u, ev.v)
    old = int(g.weights[pu])
    if ev.new_weight <= old:
        raise ValueError(
            f"update on ({ev.u},{ev.v}) must increase the weight "
            f"({old} -> {ev.new_weight})"
        )
    if ev.new_weight > g.w_max:
        raise ValueError(f"new weight {ev.new_weight} exceeds w_max={g.w_max}")
    g.weights[pu] = ev.new_weight
    g.weights[pv] = ev.new_weight


class ContractionMap:
    """Union-find over vertices; groups are joined by below-threshold edges."""

    def __init__(self, n: int):
        self.n = n
        self._parent = np.arange(n, dtype=np.int64)
        self._size = np.ones(n, dtype=np.int64)

    def find(self, u: int) -> int:
        root = u
        while self._parent[root] != root:
            root = int(self._parent[root])
        while self._parent[u] != root:
            self._parent[u], u = root, int(self._parent[u])
        return root

    def union(self, u: int, v: int) -> None:
        ru, rv = self.find(u), self.find(v)
        if ru == rv:
            return
        if self._size[ru] < self._size[rv]:
            ru, rv = rv, ru
        self._parent[rv] = ru
        self._size[ru] += self._size[rv]

    def representative(self, u: int) -> int:
        return self.find(u)

    def same_group(self, u: int, v: int) -> bool:
        return self.find(u) == self.find(v)

    def groups(self) -> list[list[int]]:
        byroot: dict[int, list[int]] = {}
        for u in range(self.n):
            byroot.setdefault(self.find(u), []).append(u)
        return [byroot[r] for r in sorted(byroot)]


def contract_below(g: WeightedGraph, threshold: int) -> ContractionMap:
    """Merge endpoints of every edge with weight <= threshold."""
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    cm = ContractionMap(g.n)
    for (u, v), (pu, _) in g._edge_pos.items():
        if g.weights[pu] <= threshold:
            cm.union(u, v)
    return cm


class FilteredGraph:
    """View of a graph where edges with weight <= epsilon count as length 0.

    The view is live: it reads the base graph's current weights.
    """

    def __init__(self, base: WeightedGraph, epsilon: int):
        if epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        self.base = base
        self.epsilon = int(epsilon)

    def effective_weights(self) -> np.ndarray:
        w = self.base.weights.copy()
        w[w <= self.epsilon] = 0
        return w

    def distance(self, u: int, v: int) -> int:
        self.base.check_vertex(u)
        self.base.check_vertex(v)
        dist = kernels.dijkstra(
            self.base.indptr, self.base.indices, self.effective_weights(), u, -1
        )
        return int(dist[v])


def filtered_distance(f: FilteredGraph, u: int, v: int) -> int:
    """Exact shortest-path distance in the zero-filtered metric."""
    return f.distance(u, v)


def load_edge_list(source, w_max: int | None = None, index_base: int = 0) -> WeightedGraph:
    """Parse a whitespace-separated ``u v w`` edge list into a graph.

    Lines starting with ``#`` and blank lines are ignored. ``index_base``
    selects 0- or 1-indexed vertex ids. Raises ValueError with the line
    number on malformed input; duplicate edges and self-loops are
    rejected, and the result must be connected.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    if index_base not in (0, 1):
        raise ValueError("index_base must be 0 or 1")
    edges = []
    keys = set()
    max_id = -1
    for ln, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {ln}: expected 'u v w', got {line!r}")
        try:
            u, v, w = (int(p) for p in parts)
        except ValueError:
            raise ValueError(f"line {ln}: non-integer field in {line!r}") from None
        u -= index_base
        v -= index_base
        if u < 0 or v < 0:
            raise ValueError(f"line {ln}: vertex id below index base")
        if w < 1:
            raise ValueError(f"line {ln}: weight {w} out of range (must be >= 1)")
        if u == v:
            raise ValueError(f"line {ln}: self-loop at vertex {u + index_base}")
        key = (u, v) if u < v else (v, u)
        if key in keys:
            raise ValueError(f"line {ln}: duplicate edge ({parts[0]},{parts[1]})")
        keys.add(key)
        edges.append((key[0], key[1], w))
        max_id = max(max_id, u, v)
    if max_id < 0:
        raise ValueError("empty edge list")
    return WeightedGraph(max_id + 1, edges, w_max=w_max)


def read_update_stream(source) -> list[UpdateEvent]:
    """Parse ``t u v w_new`` lines; t must be strictly increasing from 1."""
    if isinstance(source, str):
        source = io.StringIO(source)
    events = []
    last_t = 0
    for ln, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ValueError(f"line {ln}: expected 't u v w_new', got {line!r}")
        try:
            t, u, v, w = (int(p) for p in parts)
        except ValueError:
            raise ValueError(f"line {ln}: non-integer field in {line!r}") from None
        if t <= last_t:
            raise ValueError(f"line {ln}: sequence number {t} not strictly increasing")
        last_t = t
        events.append(UpdateEvent(u, v, w))
    return events


def write_update_stream(events, stream) -> None:
    for t, ev in enumerate(events, start=1):
        stream.write(f"{t} {ev.u} {ev.v} {ev.new_weight}\n")

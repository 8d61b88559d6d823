"""Randomized low-diameter decomposition and distance-preserving cuts.

Scale convention (fixed-point x2): every scale parameter here is an
integer ``r2`` counting *half-units*, i.e. ``r2 = 2R`` for a distance
threshold of R graph-weight units. This lets the smallest embedding
scale R = 1/2 stay exact integer arithmetic. Raw graph weights w enter
as ``2w``; an edge is treated as length 0 at scale r2 iff
``4*n*w <= r2`` (that is, w <= R/(2n)).

The decomposition carves geometric-radius balls over the zero-filtered
metric in ascending vertex-id order. The radius cap is chosen so that
the weak diameter of every cluster, measured with the *original*
weights, provably stays within R: a lifted path re-inserts at most n-1
zero-filtered edges, so the cap shrinks from floor(r2/2) by that slack
(it equals floor(r2/2) whenever nothing can be filtered).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .graph import WeightedGraph, dijkstra

BETA_MAX = 1.0 - 1e-9


def zero_weight_max(r2: int, n: int) -> int:
    """Largest raw weight treated as length 0 at scale r2 (= floor(R/(2n)))."""
    return r2 // (4 * n)


def effective_weights2(g: WeightedGraph, zero_w_max: int) -> np.ndarray:
    """Scaled (x2) weights with the zero filter applied, aligned with the CSR."""
    w2 = 2 * g.weights
    if zero_w_max > 0:
        w2[g.weights <= zero_w_max] = 0
    return w2


def radius_cap2(r2: int, n: int, cap_mode: str = "safe") -> int:
    """Ball-radius cap (scaled) guaranteeing weak diameter <= r2 in G.

    ``cap_mode="full"`` truncates radii at the full scale r2 instead; it
    does not guarantee the diameter invariant and exists only for
    comparison.
    """
    if cap_mode == "full":
        return r2
    if cap_mode != "safe":
        raise ValueError(f"unknown cap_mode {cap_mode!r}")
    slack2 = (n - 1) * 2 * zero_weight_max(r2, n)
    return max((r2 - slack2) // 2, 0)


def separation_rate(n: int, r2: int, c0: float = 2.0) -> float:
    """Geometric success parameter beta for scale r2 (per half-unit step)."""
    return min(c0 * math.log(max(n, 2)) / r2, BETA_MAX)


def draw_radii(beta: float, cap: int | None, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``count`` truncated geometric radii via inverse CDF on 64-bit uniforms."""
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must be in (0, 1), got {beta}")
    if cap is not None and cap < 0:
        raise ValueError("cap must be >= 0 (or None for no cap)")
    u64 = rng.integers(0, 2**64, size=count, dtype=np.uint64)
    u = ((u64 >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53  # in (0, 1]
    r = np.ceil(np.log(u) / math.log1p(-beta)).astype(np.int64)
    np.maximum(r, 1, out=r)
    if cap is not None:
        np.minimum(r, cap, out=r)
    return r


def sample_radius(beta: float, cap: int | None, rng: np.random.Generator) -> int:
    """One geometric radius with success parameter beta, truncated at ``cap``."""
    return int(draw_radii(beta, cap, 1, rng)[0])


@dataclass
class Clustering:
    """Partition of the vertices into low-diameter clusters.

    ``cluster_of[v]`` is the cluster index of v, ``centers[k]`` the vertex
    that seeded cluster k. ``r2`` is the scale (half-units) and ``beta``
    the geometric rate used for the radii.
    """

    cluster_of: np.ndarray
    centers: np.ndarray
    r2: int
    beta: float
    members: list[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        if not self.members:
            k = len(self.centers)
            order = np.argsort(self.cluster_of, kind="stable")
            bounds = np.searchsorted(self.cluster_of[order], np.arange(k + 1))
            self.members = [order[bounds[i] : bounds[i + 1]] for i in range(k)]

    @property
    def k(self) -> int:
        return len(self.centers)

    @property
    def n(self) -> int:
        return len(self.cluster_of)


@dataclass
class Cut:
    """One side S of a random cut: whole clusters assigned by fair coin flips.

    ``side_bit[k]`` is cluster k's coin, ``vertex_side[v]`` its vertex-level
    expansion. ``epsilon`` is the zero-probability threshold R/(2n) in raw
    weight units (pairs closer than that are never separated).
    """

    clustering: Clustering
    side_bit: np.ndarray
    vertex_side: np.ndarray
    r2: int
    beta: float
    epsilon: float

    def in_cut(self, u: int) -> bool:
        return bool(self.vertex_side[u])

    def separates(self, u: int, v: int) -> bool:
        return bool(self.vertex_side[u] != self.vertex_side[v])


def ldrd(
    g: WeightedGraph,
    r2: int,
    rng: np.random.Generator,
    c0: float = 2.0,
    cap_mode: str = "safe",
) -> Clustering:
    """Low-diameter randomized decomposition of g at scale r2 (half-units).

    Zero-filters edges below the contraction threshold, then repeatedly
    seeds a ball at the lowest-id uncovered vertex with a truncated
    geometric radius. Every cluster ends up with weak diameter (in g,
    original weights) at most r2 half-units, and any pair closer than
    R/(2n) shares a cluster.
    """
    if not 1 <= r2 <= 2 * g.delta:
        raise ValueError(f"scale r2={r2} outside [1, {2 * g.delta}]")
    n = g.n
    eff2 = effective_weights2(g, zero_weight_max(r2, n))
    beta = separation_rate(n, r2, c0)
    radii = draw_radii(beta, radius_cap2(r2, n, cap_mode), n, rng)
    labels, centers = kernels.carve(g.indptr, g.indices, eff2, radii)
    return Clustering(cluster_of=labels, centers=centers, r2=r2, beta=beta)


def build_cut(clustering: Clustering, rng: np.random.Generator) -> Cut:
    """Assign each cluster to side 1 with probability 1/2; S is their union."""
    bits = rng.integers(0, 2, size=clustering.k, dtype=np.uint8)
    vertex_side = (
        bits[clustering.cluster_of]
        if clustering.k
        else np.zeros(clustering.n, dtype=np.uint8)
    )
    return Cut(
        clustering=clustering,
        side_bit=bits,
        vertex_side=vertex_side,
        r2=clustering.r2,
        beta=clustering.beta,
        epsilon=clustering.r2 / (4 * clustering.n) if clustering.n else 0.0,
    )


@dataclass
class PairCheck:
    u: int
    v: int
    dist: int
    freq: float
    lipschitz_ok: bool
    zero_ok: bool | None
    far_ok: bool | None


@dataclass
class CutPropertyReport:
    trials: int
    r2: int
    rows: list[PairCheck]

    @property
    def passed(self) -> bool:
        return all(
            r.lipschitz_ok and r.zero_ok is not False and r.far_ok is not False
            for r in self.rows
        )


def verify_cut_properties(
    g: WeightedGraph,
    cut_sampler,
    pairs,
    trials: int,
    lipschitz_c: float = 4.0,
    slack_sigmas: float = 3.0,
) -> CutPropertyReport:
    """Estimate per-pair cut frequencies and check the three cut properties.

    ``cut_sampler()`` must draw a fresh independent Cut per call. For each
    pair: separation frequency <= c * (log^2 n / R) * d + slack, exactly 0
    when d < R/(2n), and >= 1/2 - slack when d > R.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    pairs = [(int(u), int(v)) for u, v in pairs]
    hits = np.zeros(len(pairs), dtype=np.int64)
    r2 = None
    for _ in range(trials):
        cut = cut_sampler()
        if r2 is None:
            r2 = cut.r2
        elif cut.r2 != r2:
            raise ValueError("cut_sampler changed scale between draws")
        for i, (u, v) in enumerate(pairs):
            if cut.separates(u, v):
                hits[i] += 1
    freqs = hits / trials
    n = g.n
    logn2 = math.log(max(n, 2)) ** 2
    rows = []
    dist_cache: dict[int, np.ndarray] = {}
    for (u, v), freq in zip(pairs, freqs):
        if u not in dist_cache:
            dist_cache[u] = dijkstra(g, u)
        d = int(dist_cache[u][v])
        freq = float(freq)
        sigma = math.sqrt(freq * (1.0 - freq) / trials)
        bound = lipschitz_c * (logn2 / (r2 / 2)) * d + slack_sigmas * sigma
        lipschitz_ok = bool(freq <= min(bound, 1.0) + 1e-12)
        zero_ok = bool(freq == 0.0) if 4 * n * d < r2 else None
        far_slack = slack_sigmas * math.sqrt(0.25 / trials)
        far_ok = bool(freq >= 0.5 - far_slack) if 2 * d > r2 else None
        rows.append(PairCheck(u, v, d, freq, lipschitz_ok, zero_ok, far_ok))
    return CutPropertyReport(trials=trials, r2=r2, rows=rows)


def serialize_clustering(clustering: Clustering, cut: Cut | None = None) -> str:
    """Line-based text form: ``cluster <id> center <v> members <v...> side <b>``."""
    lines = []
    for k in range(clustering.k):
        mem = " ".join(str(int(v)) for v in sorted(clustering.members[k].tolist()))
        line = f"cluster {k} center {int(clustering.centers[k])} members {mem}"
        if cut is not None:
            line += f" side {int(cut.side_bit[k])}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def parse_clustering(text: str):
    """Inverse of serialize_clustering; returns (members, centers, sides|None)."""
    members, centers, sides = [], [], []
    for ln, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        tok = line.split()
        if tok[0] != "cluster" or tok[2] != "center" or tok[4] != "members":
            raise ValueError(f"line {ln}: malformed cluster line")
        if int(tok[1]) != len(members):
            raise ValueError(f"line {ln}: cluster ids must be consecutive")
        centers.append(int(tok[3]))
        rest = tok[5:]
        if "side" in rest:
            i = rest.index("side")
            sides.append(int(rest[i + 1]))
            rest = rest[:i]
        members.append([int(x) for x in rest])
    return members, centers, (sides if sides else None)

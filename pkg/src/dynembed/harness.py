"""Experiment harness: instance generation, evaluation runs, CSV output.

Modes mirror the experiment CLI: ``static-eval`` (one-shot distortion
statistics), ``dynamic-eval`` (per-update exact vs embedded average
distances), ``audit`` (full invariant sweep after every update, first
violation fails the run) and ``lower-bound-demo`` (two cliques joined by
a toggling bridge; counts how many vertices must move to keep the
contraction certificate).

Reproducibility: every random choice derives from the config seed.
Instance generation, pair sampling and the embedding algorithm use
disjoint derived streams, so the update sequence is fixed before the
run and never feeds on algorithm randomness.
"""

from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .dynamic import audit_state, init_dynamic, write_delta_log
from .embedding import build_static_embedding, validate_p
from .graph import (
    UpdateEvent,
    WeightedGraph,
    all_pairs_distances,
    load_edge_list,
    read_update_stream,
)

# Stream keys for seed derivation (must not collide with ladder level indices).
_INSTANCE_KEY = 999983
_PAIRS_KEY = 999979


@dataclass
class ExperimentConfig:
    mode: str
    n: int = 150
    w_max: int = 100
    seed: int = 0
    q: int = 0
    p: float = 2.0
    graph_path: str | None = None
    updates_path: str | None = None
    one_indexed: bool = False
    out_dir: str | None = None
    normalize4: bool = False
    pairs_sample: int | None = None
    c0: float = 2.0
    extra_edges: int | None = None  # synthetic generator; default 2n
    init_w_upper: int | None = None  # initial uniform weight range; default max(1, W//10)
    increment_k: int | None = None  # widening-increment slope K; default max(1, W//10)
    clique_size: int = 50
    toggles: int = 4
    distortion_target: float | None = None  # lower-bound certificate; default W/8

    def __post_init__(self):
        if self.mode not in ("static-eval", "dynamic-eval", "lower-bound-demo", "audit"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.q < 0:
            raise ValueError("Q must be >= 0")
        validate_p(self.p)


@dataclass
class RatioRow:
    t: int
    exact_avg: float
    embed_avg: float

    @property
    def ratio(self) -> float:
        return self.embed_avg / self.exact_avg


@dataclass
class RatioSeries:
    rows: list[RatioRow] = field(default_factory=list)


def _instance_rng(cfg: ExperimentConfig) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([cfg.seed, _INSTANCE_KEY]))


def synthetic_graph(n: int, w_max: int, rng: np.random.Generator,
                    extra_edges: int | None = None,
                    init_w_upper: int | None = None) -> WeightedGraph:
    """Random spanning tree plus uniform extra edges, uniform random weights."""
    if init_w_upper is None:
        init_w_upper = max(1, w_max // 10)
    init_w_upper = min(init_w_upper, w_max)
    if extra_edges is None:
        extra_edges = 2 * n
    edges = {}
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edges[(u, v)] = int(rng.integers(1, init_w_upper + 1))
    max_extra = n * (n - 1) // 2 - (n - 1)
    want = min(extra_edges, max_extra)
    attempts = 0
    while len(edges) < (n - 1) + want and attempts < 50 * (want + 1):
        attempts += 1
        u = int(rng.integers(0, n))
        v = int(rng.integers(0, n))
        if u == v:
            continue
        key = (u, v) if u < v else (v, u)
        if key in edges:
            continue
        edges[key] = int(rng.integers(1, init_w_upper + 1))
    return WeightedGraph(n, [(u, v, w) for (u, v), w in edges.items()], w_max=w_max)


def generate_updates(g: WeightedGraph, q: int, rng: np.random.Generator,
                     increment_k: int | None = None) -> list[UpdateEvent]:
    """Q uniform-edge weight increases with a linearly widening increment range.

    At step t the increment is uniform on [1, 1 + floor(K*t/q)]; results
    are capped at w_max. Raises when no edge can still be increased.
    """
    if increment_k is None:
        increment_k = max(1, g.w_max // 10)
    cur = {(u, v): w for u, v, w in g.edge_list()}
    keys = sorted(cur)
    events = []
    for t in range(1, q + 1):
        upper = 1 + (increment_k * t) // max(q, 1)
        for _ in range(50 * len(keys)):
            u, v = keys[int(rng.integers(0, len(keys)))]
            if cur[(u, v)] < g.w_max:
                break
        else:
            raise ValueError(f"Q={q} infeasible: all edge weights saturated at w_max")
        inc = int(rng.integers(1, upper + 1))
        new_w = min(cur[(u, v)] + inc, g.w_max)
        cur[(u, v)] = new_w
        events.append(UpdateEvent(u, v, new_w))
    return events


def generate_instance(cfg: ExperimentConfig):
    """Build (graph, update stream) per the config; both fixed before any run."""
    rng = _instance_rng(cfg)
    if cfg.graph_path:
        with open(cfg.graph_path) as fh:
            g = load_edge_list(fh, w_max=cfg.w_max, index_base=1 if cfg.one_indexed else 0)
    else:
        g = synthetic_graph(cfg.n, cfg.w_max, rng, cfg.extra_edges, cfg.init_w_upper)
    if cfg.updates_path:
        with open(cfg.updates_path) as fh:
            updates = read_update_stream(fh)
    else:
        updates = generate_updates(g, cfg.q, rng, cfg.increment_k)
    return g, updates


def _pairwise_norms(diff: np.ndarray, r2s: np.ndarray, p: float) -> np.ndarray:
    """lp norms (weight units) for boolean difference patterns (..., L)."""
    scaled = diff * r2s.astype(np.float64)
    if math.isinf(p):
        return scaled.max(axis=-1) / 2.0
    m = scaled.max(axis=-1, keepdims=True)
    m_safe = np.where(m == 0.0, 1.0, m)
    s = ((scaled / m_safe) ** p).sum(axis=-1)
    return (m[..., 0] * s ** (1.0 / p)) / 2.0


def embedded_distances(bits: np.ndarray, r2s: np.ndarray, p: float,
                       pairs: np.ndarray) -> np.ndarray:
    """lp distances for an array of (u, v) pairs."""
    diff = bits[pairs[:, 0]] != bits[pairs[:, 1]]
    return _pairwise_norms(diff, r2s, p)


def mean_embedded_distance(bits: np.ndarray, r2s: np.ndarray, p: float,
                           pairs: np.ndarray | None = None,
                           chunk: int = 64) -> float:
    """Mean lp distance over all unordered pairs (or a fixed pair sample)."""
    n = bits.shape[0]
    if pairs is not None:
        return float(embedded_distances(bits, r2s, p, pairs).mean())
    total = 0.0
    count = 0
    for a in range(0, n, chunk):
        b = min(a + chunk, n)
        diff = bits[a:b, None, :] != bits[None, :, :]
        norms = _pairwise_norms(diff, r2s, p)
        cols = np.arange(n)[None, :]
        mask = cols > np.arange(a, b)[:, None]
        total += float(norms[mask].sum())
        count += int(mask.sum())
    return total / count


def _sample_pairs(n: int, k: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence([seed, _PAIRS_KEY]))
    total = n * (n - 1) // 2
    k = min(k, total)
    flat = rng.choice(total, size=k, replace=False)
    # unrank: pair index -> (u, v) with u < v
    us = np.empty(k, dtype=np.int64)
    vs = np.empty(k, dtype=np.int64)
    for i, f in enumerate(np.sort(flat)):
        u = 0
        rem = int(f)
        span = n - 1
        while rem >= span:
            rem -= span
            u += 1
            span -= 1
        us[i] = u
        vs[i] = u + 1 + rem
    return np.stack([us, vs], axis=1)


def _exact_mean(dist: np.ndarray, pairs: np.ndarray | None) -> float:
    n = dist.shape[0]
    if pairs is None:
        iu = np.triu_indices(n, 1)
        return float(dist[iu].mean())
    return float(dist[pairs[:, 0], pairs[:, 1]].mean())


def run_dynamic_eval(cfg: ExperimentConfig):
    """Per-update exact vs embedded average distances (ratio series)."""
    g, updates = generate_instance(cfg)
    if g.n < 2:
        raise ValueError("average-distance evaluation needs at least 2 vertices")
    if g.n > 600 and not cfg.pairs_sample:
        raise ValueError(
            "full all-pairs evaluation is capped at n=600; pass pairs_sample"
        )
    d = init_dynamic(g, cfg.seed, cfg.c0)
    pairs = _sample_pairs(g.n, cfg.pairs_sample, cfg.seed) if cfg.pairs_sample else None
    r2s = d.ladder.r2s
    scale = 4.0 if cfg.normalize4 else 1.0
    series = RatioSeries()

    def snap(t):
        dist = all_pairs_distances(g)
        exact = _exact_mean(dist, pairs)
        embed = scale * mean_embedded_distance(d.bits, r2s, cfg.p, pairs)
        series.rows.append(RatioRow(t, exact, embed))

    snap(0)
    for ev in updates:
        d.handle_update(ev)
        snap(d.t)
    return series, d


def run_static_eval(cfg: ExperimentConfig):
    """One static embedding; average distances plus worst-pair stretch stats."""
    g, _ = generate_instance(cfg)
    if g.n < 2:
        raise ValueError("average-distance evaluation needs at least 2 vertices")
    e = build_static_embedding(g, cfg.seed, cfg.c0)
    dist = all_pairs_distances(g)
    r2s = e.ladder.r2s
    scale = 4.0 if cfg.normalize4 else 1.0
    n = g.n
    iu = np.triu_indices(n, 1)
    pairs = np.stack([iu[0], iu[1]], axis=1)
    emb = scale * embedded_distances(e.bits, r2s, cfg.p, pairs)
    exact = dist[iu].astype(np.float64)
    series = RatioSeries([RatioRow(0, float(exact.mean()), float(emb.mean()))])
    with np.errstate(divide="ignore"):
        expansion = float((emb / exact).max())
        contraction = float((exact / np.where(emb == 0.0, np.nan, emb)).max())
    stats = {
        "expansion_max": expansion,
        "contraction_max": contraction,
        "zero_embedded_pairs": int((emb == 0.0).sum()),
    }
    return series, e, stats


def run_audit(cfg: ExperimentConfig):
    """Audit after every update; stops at the first violation."""
    g, updates = generate_instance(cfg)
    d = init_dynamic(g, cfg.seed, cfg.c0)
    lines = []
    report = audit_state(d)
    lines.append(f"t=0 {'clean' if report.clean else 'VIOLATION'}")
    ok = report.clean
    if ok:
        for ev in updates:
            d.handle_update(ev)
            report = audit_state(d)
            if report.clean:
                lines.append(f"t={d.t} clean")
            else:
                lines.append(f"t={d.t} VIOLATION")
                lines.extend("  " + f for f in report.findings)
                ok = False
                break
    else:
        lines.extend("  " + f for f in report.findings)
    lines.append("AUDIT " + ("PASS" if ok else "FAIL"))
    return ok, lines, d


def two_clique_graph(clique_size: int, w_max: int, bridge_w: int = 1) -> WeightedGraph:
    """Two unit-weight complete graphs joined by one bridge edge (0, clique_size)."""
    cn = clique_size
    edges = []
    for block in (0, cn):
        for i in range(cn):
            for j in range(i + 1, cn):
                edges.append((block + i, block + j, 1))
    edges.append((0, cn, bridge_w))
    return WeightedGraph(2 * cn, edges, w_max=w_max)


def contraction_certificate(g: WeightedGraph, bits: np.ndarray, r2s: np.ndarray,
                            p: float, target: float, dist_floor: int):
    """Check no pair at graph distance >= dist_floor is embedded closer
    than distance/target. Returns (ok, worst_ratio_pair or None)."""
    dist = all_pairs_distances(g)
    iu = np.triu_indices(g.n, 1)
    far = dist[iu] >= dist_floor
    if not far.any():
        return True, None
    pairs = np.stack([iu[0][far], iu[1][far]], axis=1)
    emb = embedded_distances(bits, r2s, p, pairs)
    need = dist[pairs[:, 0], pairs[:, 1]].astype(np.float64) / target
    bad = emb < need
    if not bad.any():
        return True, None
    i = int(np.argmax(bad))
    return False, (int(pairs[i, 0]), int(pairs[i, 1]), float(emb[i]), float(need[i]))


@dataclass
class DemoRow:
    toggle: int
    phase: str  # "increase" | "rebuild"
    moved: int
    certificate: str  # "pass" | "fail" | "na"


def run_lower_bound_demo(cfg: ExperimentConfig):
    """Bridge-toggling demonstration on two cliques.

    Each cycle raises the bridge from 1 to w_max (a legal decremental
    update) and counts the vertices whose coordinates change; the reverse
    direction is a weight decrease, outside the update model, so it is
    simulated by a fresh rebuild and flagged as such (its moved count
    compares the rebuilt embedding against the previous one).
    """
    w = cfg.w_max
    target = cfg.distortion_target if cfg.distortion_target else w / 8.0
    rows: list[DemoRow] = []
    prev_bits = None
    for toggle in range(1, cfg.toggles + 1):
        g = two_clique_graph(cfg.clique_size, w, bridge_w=1)
        d = init_dynamic(g, cfg.seed + toggle, cfg.c0)
        if prev_bits is not None:
            moved = int((d.bits != prev_bits).any(axis=1).sum())
            rows.append(DemoRow(toggle, "rebuild", moved, "na"))
        delta = d.handle_update(UpdateEvent(0, cfg.clique_size, w))
        moved = len({v for v, _i, _o, _n in delta.changes})
        ok, _worst = contraction_certificate(
            g, d.bits, d.ladder.r2s, cfg.p, target, dist_floor=w
        )
        rows.append(DemoRow(toggle, "increase", moved, "pass" if ok else "fail"))
        prev_bits = d.bits.copy()
    return rows


def format_ratio_csv(series: RatioSeries) -> str:
    lines = ["t,exact_avg,embed_avg,ratio"]
    for r in series.rows:
        lines.append(f"{r.t},{r.exact_avg:.6f},{r.embed_avg:.6f},{r.ratio:.6f}")
    return "\n".join(lines) + "\n"


def emit_csv(series: RatioSeries, path) -> None:
    """Write the ratio series; header only when the series is empty."""
    with open(path, "w") as fh:
        fh.write(format_ratio_csv(series))


def parse_ratio_csv(text: str) -> RatioSeries:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "t,exact_avg,embed_avg,ratio":
        raise ValueError("malformed ratio CSV header")
    series = RatioSeries()
    for ln in lines[1:]:
        t, exact, embed, _ratio = ln.split(",")
        series.rows.append(RatioRow(int(t), float(exact), float(embed)))
    return series


def format_demo_csv(rows: list[DemoRow]) -> str:
    lines = ["toggle,phase,moved_vertices,certificate"]
    for r in rows:
        lines.append(f"{r.toggle},{r.phase},{r.moved},{r.certificate}")
    return "\n".join(lines) + "\n"


def run(cfg: ExperimentConfig) -> int:
    """Dispatch a mode and write its outputs into cfg.out_dir. Returns exit code."""
    out = cfg.out_dir or "."
    os.makedirs(out, exist_ok=True)

    def write(name: str, text: str) -> None:
        with open(os.path.join(out, name), "w") as fh:
            fh.write(text)

    if cfg.mode == "static-eval":
        series, _e, stats = run_static_eval(cfg)
        write("ratios.csv", format_ratio_csv(series))
        print(
            f"static-eval: exact_avg={series.rows[0].exact_avg:.6f} "
            f"embed_avg={series.rows[0].embed_avg:.6f} ratio={series.rows[0].ratio:.6f} "
            f"expansion_max={stats['expansion_max']:.3f} "
            f"contraction_max={stats['contraction_max']:.3f}"
        )
        return 0
    if cfg.mode == "dynamic-eval":
        series, d = run_dynamic_eval(cfg)
        write("ratios.csv", format_ratio_csv(series))
        buf = io.StringIO()
        write_delta_log(d.deltas, buf)
        write("deltas.log", buf.getvalue())
        print(f"dynamic-eval: {len(series.rows)} rows -> {os.path.join(out, 'ratios.csv')}")
        return 0
    if cfg.mode == "audit":
        ok, lines, d = run_audit(cfg)
        write("audit.txt", "\n".join(lines) + "\n")
        buf = io.StringIO()
        write_delta_log(d.deltas, buf)
        write("deltas.log", buf.getvalue())
        print(lines[-1])
        return 0 if ok else 1
    rows = run_lower_bound_demo(cfg)
    write("demo.csv", format_demo_csv(rows))
    for r in rows:
        print(f"toggle {r.toggle} {r.phase}: moved={r.moved} certificate={r.certificate}")
    return 0

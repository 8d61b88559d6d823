"""Multi-scale characteristic embedding and lp distance queries.

One coordinate per scale level: level i covers threshold R_i = 2^(i-2)
weight units (scaled to the integer r2 = 2^(i-1) half-units), for
i = 1 .. log2(delta)+1. A vertex's i-th coordinate is R_i when it lies
on side 1 of the level-i cut and 0 otherwise, so the whole embedding is
a bit matrix plus the ladder of scales. Norms are computed in double
precision on the scaled integers and divided by 2 at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .decomposition import (
    Cut,
    build_cut,
    ldrd,
    separation_rate,
    zero_weight_max,
)
from .graph import WeightedGraph


@dataclass(frozen=True)
class ScaleLevel:
    index: int  # 1-based level number
    r2: int  # scale threshold in half-units (2 * R_i)
    beta: float
    zero_w_max: int  # raw weights <= this count as length 0 at this level


@dataclass(frozen=True)
class ScaleLadder:
    n: int
    delta: int
    levels: tuple[ScaleLevel, ...]

    @property
    def num_levels(self) -> int:
        return len(self.levels)

    @property
    def r2s(self) -> np.ndarray:
        return np.array([lv.r2 for lv in self.levels], dtype=np.int64)


def scale_ladder(n: int, delta: int, c0: float = 2.0) -> ScaleLadder:
    """Ladder of doubling scales r2 = 1, 2, ..., delta (log2(delta)+1 levels)."""
    if delta < 1 or (delta & (delta - 1)) != 0:
        raise ValueError(f"delta must be a positive power of two, got {delta}")
    levels = []
    for i in range(1, delta.bit_length() + 1):
        r2 = 1 << (i - 1)
        levels.append(
            ScaleLevel(
                index=i,
                r2=r2,
                beta=separation_rate(n, r2, c0),
                zero_w_max=zero_weight_max(r2, n),
            )
        )
    return ScaleLadder(n=n, delta=delta, levels=tuple(levels))


def build_scale_ladder(g: WeightedGraph, c0: float = 2.0) -> ScaleLadder:
    return scale_ladder(g.n, g.delta, c0)


def validate_p(p) -> float:
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise ValueError(f"lp parameter must satisfy p >= 1, got {p}")
    return p


class MultiScaleEmbedding:
    """Per-vertex coordinate vectors rho(v), one coordinate per scale level.

    Stored as the membership bit matrix ``bits`` (n x num_levels, uint8);
    coordinates are reconstructed as R_i * bit. ``coords_touched`` counts
    coordinates examined by distance queries (diagnostics).
    """

    def __init__(self, ladder: ScaleLadder, bits: np.ndarray):
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.shape != (ladder.n, ladder.num_levels):
            raise ValueError(
                f"bits shape {bits.shape} does not match "
                f"(n={ladder.n}, levels={ladder.num_levels})"
            )
        if bits.size and bits.max() > 1:
            raise ValueError("membership bits must be 0/1")
        self.ladder = ladder
        self.bits = bits
        self.coords_touched = 0

    @property
    def n(self) -> int:
        return self.ladder.n

    @property
    def num_levels(self) -> int:
        return self.ladder.num_levels

    def rho(self, v: int) -> np.ndarray:
        """Coordinate vector of v in weight units (floats; R_i = r2_i / 2)."""
        self._check_vertex(v)
        return self.bits[v].astype(np.float64) * self.ladder.r2s / 2.0

    def coords2(self, v: int) -> np.ndarray:
        """Coordinate vector of v as scaled integers (fixed-point x2)."""
        self._check_vertex(v)
        return self.bits[v].astype(np.int64) * self.ladder.r2s

    def _check_vertex(self, v: int) -> None:
        if not (0 <= v < self.n):
            raise ValueError(f"unknown vertex {v}")

    def lp_distance(self, u: int, v: int, p) -> float:
        p = validate_p(p)
        self._check_vertex(u)
        self._check_vertex(v)
        diff = self.bits[u] != self.bits[v]
        self.coords_touched += self.num_levels
        return _norm_of_scaled(self.ladder.r2s[diff], p)


def _norm_of_scaled(vals2: np.ndarray, p: float) -> float:
    """lp norm of scaled coordinate differences, divided back by 2."""
    if vals2.size == 0:
        return 0.0
    if math.isinf(p):
        return float(vals2.max()) / 2.0
    x = vals2.astype(np.float64)
    m = x.max()  # factor out the peak so x**p cannot overflow
    return float(m * ((x / m) ** p).sum() ** (1.0 / p)) / 2.0


def lp_distance(e: MultiScaleEmbedding, u: int, v: int, p) -> float:
    """Exact lp norm of rho(u) - rho(v); examines every level once."""
    return e.lp_distance(u, v, p)


def characteristic_embedding(cuts: list[Cut], ladder: ScaleLadder) -> MultiScaleEmbedding:
    """Stack one cut per ladder level: coordinate i is R_i * 1{v in S_i}."""
    if len(cuts) != ladder.num_levels:
        raise ValueError(
            f"expected {ladder.num_levels} cuts (one per level), got {len(cuts)}"
        )
    bits = np.zeros((ladder.n, ladder.num_levels), dtype=np.uint8)
    for j, (cut, level) in enumerate(zip(cuts, ladder.levels)):
        if cut.r2 != level.r2:
            raise ValueError(
                f"cut {j} has scale r2={cut.r2}, level {level.index} wants {level.r2}"
            )
        if len(cut.vertex_side) != ladder.n:
            raise ValueError("cut covers a different vertex set")
        bits[:, j] = cut.vertex_side
    return MultiScaleEmbedding(ladder, bits)


def level_rng(seed: int, level_index: int) -> np.random.Generator:
    """Independent per-level stream derived from (master seed, level)."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(level_index)]))


def build_static_embedding(
    g: WeightedGraph, seed: int, c0: float = 2.0
) -> MultiScaleEmbedding:
    """Fresh decomposition + coin flips at every ladder level."""
    ladder = build_scale_ladder(g, c0)
    cuts = []
    for level in ladder.levels:
        rng = level_rng(seed, level.index)
        clustering = ldrd(g, level.r2, rng, c0)
        cuts.append(build_cut(clustering, rng))
    return characteristic_embedding(cuts, ladder)


def export_embedding(e: MultiScaleEmbedding) -> str:
    """Lossless text form: header then one membership bit-string per vertex."""
    lines = [f"levels {e.num_levels} n {e.n} delta {e.ladder.delta}"]
    for v in range(e.n):
        lines.append(f"{v} {''.join('1' if b else '0' for b in e.bits[v])}")
    return "\n".join(lines) + "\n"


def import_embedding(text: str, c0: float = 2.0) -> MultiScaleEmbedding:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty embedding text")
    head = lines[0].split()
    if len(head) != 6 or head[0] != "levels" or head[2] != "n" or head[4] != "delta":
        raise ValueError(f"malformed header: {lines[0]!r}")
    num_levels, n, delta = int(head[1]), int(head[3]), int(head[5])
    ladder = scale_ladder(n, delta, c0)
    if ladder.num_levels != num_levels:
        raise ValueError(
            f"level count {num_levels} inconsistent with delta {delta} "
            f"(expected {ladder.num_levels})"
        )
    if len(lines) - 1 != n:
        raise ValueError(f"expected {n} vertex lines, got {len(lines) - 1}")
    bits = np.zeros((n, num_levels), dtype=np.uint8)
    for ln, line in enumerate(lines[1:], start=2):
        tok = line.split()
        if len(tok) != 2:
            raise ValueError(f"line {ln}: expected 'v bits'")
        v, bstr = int(tok[0]), tok[1]
        if v != ln - 2:
            raise ValueError(f"line {ln}: vertex ids must be consecutive from 0")
        if len(bstr) != num_levels or set(bstr) - {"0", "1"}:
            raise ValueError(f"line {ln}: bad bit-string {bstr!r}")
        bits[v] = [1 if c == "1" else 0 for c in bstr]
    return MultiScaleEmbedding(ladder, bits)

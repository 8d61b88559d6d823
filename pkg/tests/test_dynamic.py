"""Decremental maintenance: init/static equality, splits, deltas, audits."""

from __future__ import annotations

import io
import math

import numpy as np
import pytest

from dynembed.dynamic import (
    audit_state,
    handle_update,
    init_dynamic,
    query_dynamic,
    read_delta_log,
    replay_deltas,
    split_cluster,
    write_delta_log,
)
from dynembed.embedding import MultiScaleEmbedding, build_static_embedding
from dynembed.graph import UpdateEvent, WeightedGraph, all_pairs_distances
from dynembed.harness import generate_updates

from conftest import random_graph


def _tri() -> WeightedGraph:
    return WeightedGraph(3, [(0, 1, 1), (1, 2, 1), (0, 2, 3)], w_max=16)


class TestInit:
    def test_initial_state_equals_static_build(self):
        g = random_graph(23, 25, 16, extra=30)
        e = build_static_embedding(g, seed=42)
        d = init_dynamic(g.copy(), seed=42)
        assert np.array_equal(d.bits, e.bits)

    def test_level_count(self):
        g = random_graph(23, 25, 16, extra=30)
        d = init_dynamic(g, seed=1)
        assert d.num_levels == int(math.log2(g.delta)) + 1

    def test_initial_delta_lists_nonzero_coordinates(self):
        g = random_graph(25, 10, 8, extra=10)
        d = init_dynamic(g, seed=3)
        assert d.deltas[0].t == 0
        recon = replay_deltas(d.deltas, g.n, d.num_levels)
        assert np.array_equal(recon, d.bits)

    def test_cut_properties_at_init(self):
        # Definition-style bullets per level over many init seeds
        g = random_graph(30, 30, 8, extra=45, init_upper=3)
        dist = all_pairs_distances(g)
        n = g.n
        trials = 1000
        d0 = init_dynamic(g, seed=0)
        levels = d0.ladder.levels
        bits = np.zeros((trials, n, len(levels)), dtype=np.uint8)
        for s in range(trials):
            bits[s] = init_dynamic(g, seed=s).bits
        iu = np.triu_indices(n, 1)
        freq = np.zeros((n, n, len(levels)))
        for j in range(len(levels)):
            b = bits[:, :, j]
            freq[:, :, j] = (b[:, :, None] != b[:, None, :]).mean(axis=0)
        logn2 = math.log(n) ** 2
        sig = 3 * math.sqrt(0.25 / trials)
        for j, lv in enumerate(levels):
            fr = freq[:, :, j][iu]
            ds = dist[iu]
            close = 4 * n * ds < lv.r2
            assert (fr[close] == 0.0).all(), f"zero bullet fails at level {j + 1}"
            far = 2 * ds > lv.r2
            assert (fr[far] >= 0.5 - sig).all(), f"far bullet fails at level {j + 1}"
            bound = 0.5 * (logn2 / (lv.r2 / 2.0)) * (2 * ds) + sig
            assert (fr <= np.minimum(bound, 1.0)).all(), f"lipschitz fails at level {j + 1}"


class TestHandleUpdate:
    def test_ignored_below_epsilon_levels(self):
        # levels where the new weight still filters to zero must not change
        g = random_graph(27, 20, 64, extra=25, init_upper=2)
        d = init_dynamic(g, seed=5)
        u, v, w = g.edge_list()[0]
        new_w = w + 1
        touched_levels = [
            j
            for j, lv in enumerate(d.ladder.levels)
            if 4 * g.n * new_w > lv.r2  # forwarded only here
        ]
        delta = d.handle_update(UpdateEvent(u, v, new_w))
        assert all((i - 1) in touched_levels for _v, i, _o, _n in delta.changes)

    def test_no_radius_violation_empty_delta(self):
        g = _tri()
        d = init_dynamic(g, seed=0)
        # (0,2) is on no shortest path: d(0,2)=2 via the unit edges
        delta = d.handle_update(UpdateEvent(0, 2, 4))
        assert delta.changes == []
        assert audit_state(d).clean

    def test_forced_split_delta_names_carved_vertices(self):
        # path 0-1-2; raising (1,2) pushes vertex 2 out of any cluster that
        # held all three; the delta may only mention carved vertices at the
        # levels that actually split
        for seed in range(200):
            g = WeightedGraph(3, [(0, 1, 1), (1, 2, 1)], w_max=16)
            d = init_dynamic(g, seed=seed)
            pre = {
                j: {k: set(cs.members.tolist()) for k, cs in m.clusters.items()}
                for j, m in enumerate(d.maintainers)
            }
            co_levels = [
                j for j, mem in pre.items() if any(len(s) == 3 for s in mem.values())
            ]
            if not co_levels:
                continue
            delta = d.handle_update(UpdateEvent(1, 2, 8))
            assert audit_state(d).clean
            for v, i, old2, new2 in delta.changes:
                j = i - 1
                m = d.maintainers[j]
                assert new2 in (0, int(d.ladder.r2s[j]))
                # vertex moved to a different cluster or its cluster re-flipped:
                # either way the level must have split (cluster count grew)
                assert len(m.clusters) > len(pre[j])
            if delta.changes:
                return
        pytest.fail("no seed produced a forced split with a visible delta")

    def test_update_validation_precedes_state_change(self):
        g = _tri()
        d = init_dynamic(g, seed=0)
        before = d.bits.copy()
        with pytest.raises(ValueError):
            d.handle_update(UpdateEvent(0, 1, 1))  # not an increase
        assert np.array_equal(d.bits, before)
        assert d.t == 0


class TestQuery:
    def test_self_distance_zero_through_run(self):
        g = random_graph(29, 15, 32, extra=20, init_upper=2)
        d = init_dynamic(g, seed=2)
        ups = generate_updates(g.copy(), 30, np.random.default_rng(7))
        for ev in ups:
            d.handle_update(ev)
            for u in range(0, g.n, 5):
                assert query_dynamic(d, u, u, 2.0) == 0.0

    def test_query_changes_only_with_touching_delta(self):
        g = random_graph(29, 15, 32, extra=20, init_upper=2)
        d = init_dynamic(g, seed=2)
        ups = generate_updates(g.copy(), 50, np.random.default_rng(8))
        u, v = 0, g.n - 1
        prev = query_dynamic(d, u, v, 2.0)
        for ev in ups:
            delta = d.handle_update(ev)
            cur = query_dynamic(d, u, v, 2.0)
            touched = {x for x, *_ in delta.changes}
            if u not in touched and v not in touched:
                assert cur == prev
            prev = cur

    def test_matches_reconstructed_state(self):
        g = random_graph(33, 30, 32, extra=40, init_upper=2)
        d = init_dynamic(g, seed=6)
        ups = generate_updates(g.copy(), 500, np.random.default_rng(9))
        for ev in ups:
            d.handle_update(ev)
        recon = np.zeros_like(d.bits)
        for j, m in enumerate(d.maintainers):
            recon[:, j] = m.bits_array()
        assert np.array_equal(recon, d.bits)
        e = MultiScaleEmbedding(d.ladder, recon.copy())
        for u in range(0, g.n, 4):
            for v in range(u + 1, g.n, 5):
                assert query_dynamic(d, u, v, 2.0) == e.lp_distance(u, v, 2.0)


class TestSplitCluster:
    def _maintainer_with_cluster(self, seed=0):
        g = WeightedGraph(3, [(0, 1, 1), (1, 2, 1)], w_max=16)
        d = init_dynamic(g, seed=seed)
        for j, m in enumerate(d.maintainers):
            for k, cs in m.clusters.items():
                if len(cs.members) == 3 and cs.center != 2:
                    return m, k
        return None, None

    def test_single_vertex_overflow_makes_singleton(self):
        for seed in range(50):
            m, k = self._maintainer_with_cluster(seed)
            if m is None:
                continue
            before = len(m.clusters)
            new_keys, _changes = split_cluster(m, k, [2])
            assert len(new_keys) == 1
            nk = new_keys[0]
            assert m.clusters[nk].members.tolist() == [2]
            assert m.clusters[nk].bit in (0, 1)
            assert len(m.clusters) == before + 1  # split never merges
            return
        pytest.fail("no suitable cluster found")

    def test_center_overflow_rejected(self):
        m, k = self._maintainer_with_cluster(0)
        if m is None:
            pytest.skip("no 3-cluster at seed 0")
        with pytest.raises(ValueError):
            split_cluster(m, k, [m.clusters[k].center])

    def test_split_budget_on_seeded_run(self):
        n = 40
        g = random_graph(37, n, 32, extra=60, init_upper=2)
        d = init_dynamic(g, seed=4)
        ups = generate_updates(g.copy(), 100, np.random.default_rng(11))
        for ev in ups:
            d.handle_update(ev)
        cap = 2 * math.log2(n)
        for m in d.maintainers:
            assert int(m.split_count.max()) <= cap


def test_partition_refines_over_time():
    # split-only monotonicity: each level's partition at time t refines t-1
    g = random_graph(53, 25, 32, extra=35, init_upper=2)
    d = init_dynamic(g, seed=14)
    ups = generate_updates(g.copy(), 80, np.random.default_rng(15))
    prev = [m.cluster_of.copy() for m in d.maintainers]
    for ev in ups:
        d.handle_update(ev)
        for j, m in enumerate(d.maintainers):
            cur = m.cluster_of
            olds_of_new: dict[int, int] = {}
            for v in range(g.n):
                k = int(cur[v])
                if k in olds_of_new:
                    assert olds_of_new[k] == int(prev[j][v]), (
                        f"level {j + 1}: cluster {k} merges old clusters"
                    )
                else:
                    olds_of_new[k] = int(prev[j][v])
            prev[j] = cur.copy()


class TestAudit:
    def test_fresh_state_clean(self):
        g = random_graph(39, 20, 16, extra=25)
        assert audit_state(init_dynamic(g, seed=1)).clean

    def test_corrupted_bit_detected(self):
        g = random_graph(39, 20, 16, extra=25)
        d = init_dynamic(g, seed=1)
        d.bits[3, 2] ^= 1
        report = audit_state(d)
        assert not report.clean
        assert any("view bit mismatch" in f for f in report.findings)

    def test_clean_through_run(self):
        g = random_graph(39, 25, 32, extra=35, init_upper=3)
        d = init_dynamic(g, seed=8)
        ups = generate_updates(g.copy(), 60, np.random.default_rng(13))
        for ev in ups:
            d.handle_update(ev)
            report = audit_state(d)
            assert report.clean, report.findings[:3]


class TestDeltas:
    def test_replay_reproduces_view(self):
        g = random_graph(45, 25, 32, extra=35, init_upper=2)
        d = init_dynamic(g, seed=3)
        ups = generate_updates(g.copy(), 120, np.random.default_rng(17))
        for ev in ups:
            d.handle_update(ev)
        assert np.array_equal(replay_deltas(d.deltas, g.n, d.num_levels), d.bits)

    def test_log_round_trip(self):
        g = random_graph(45, 15, 32, extra=20, init_upper=2)
        d = init_dynamic(g, seed=3)
        ups = generate_updates(g.copy(), 40, np.random.default_rng(19))
        for ev in ups:
            d.handle_update(ev)
        buf = io.StringIO()
        write_delta_log(d.deltas, buf)
        parsed = read_delta_log(buf.getvalue())
        flat_a = [(x.t, tuple(x.changes)) for x in parsed]
        flat_b = [(x.t, tuple(x.changes)) for x in d.deltas if x.changes]
        assert flat_a == flat_b
        assert np.array_equal(replay_deltas(parsed, g.n, d.num_levels), d.bits)

    def test_side_bit_freshness_and_independence(self):
        # repeat one forced-split instance; fresh bits must be fair coins,
        # independent of the surviving cluster's bit
        new_bits = []
        surv_bits = []
        for seed in range(2000):
            g = WeightedGraph(3, [(0, 1, 1), (1, 2, 1)], w_max=16)
            d = init_dynamic(g, seed=seed)
            pre_counts = [len(m.clusters) for m in d.maintainers]
            d.handle_update(UpdateEvent(1, 2, 8))
            for j, m in enumerate(d.maintainers):
                if len(m.clusters) == pre_counts[j] + 1 and 2 not in m.clusters[
                    int(m.cluster_of[0])
                ].members.tolist():
                    new = m.clusters[int(m.cluster_of[2])]
                    surv = m.clusters[int(m.cluster_of[0])]
                    if new.members.tolist() == [2]:
                        new_bits.append(new.bit)
                        surv_bits.append(surv.bit)
        assert len(new_bits) >= 500
        nb = np.array(new_bits, dtype=float)
        sb = np.array(surv_bits, dtype=float)
        assert abs(nb.mean() - 0.5) <= 0.05
        r = np.corrcoef(nb, sb)[0, 1]
        assert abs(r) <= 0.05

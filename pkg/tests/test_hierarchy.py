import itertools

import numpy as np
import pytest

from gti.graph import Graph, gen_er
from gti.hierarchy import louvain_levels, modularity


def brute_modularity(g, membership):
    """Direct per-community evaluation, independent of the library path."""
    m = g.edge_count
    comms = set(int(c) for c in membership)
    deg = g.degrees()
    q = 0.0
    for c in comms:
        nodes = {i for i in range(g.node_count) if membership[i] == c}
        e_c = sum(1 for u, v in g.edge_array if int(u) in nodes and int(v) in nodes)
        d_c = sum(int(deg[i]) for i in nodes)
        q += e_c / m - (d_c / (2 * m)) ** 2
    return q


def two_cliques_with_bridge(size=5):
    edges = [(i, j) for i in range(size) for j in range(i + 1, size)]
    edges += [(size + i, size + j) for i in range(size) for j in range(i + 1, size)]
    edges.append((0, size))
    return Graph(2 * size, edges)


class TestModularity:
    def test_two_disjoint_triangles(self):
        g = Graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
        assert modularity(g, [0, 0, 0, 1, 1, 1]) == pytest.approx(0.5)

    def test_single_community_is_zero(self):
        for seed in range(4):
            g = gen_er(20, 0.3, seed=seed)
            assert modularity(g, [0] * 20) == pytest.approx(0.0)

    def test_singletons_on_k2(self):
        g = Graph(2, [(0, 1)])
        assert modularity(g, [0, 1]) == pytest.approx(-0.5)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(0)
        for seed in range(8):
            g = gen_er(14, 0.3, seed=seed)
            member = rng.integers(0, 4, size=14)
            assert modularity(g, member) == pytest.approx(
                brute_modularity(g, member), abs=1e-12)

    def test_empty_graph_rejected(self):
        with pytest.raises(ValueError):
            modularity(Graph(3), [0, 0, 0])

    def test_partial_assignment_rejected(self):
        g = Graph(3, [(0, 1)])
        with pytest.raises(ValueError):
            modularity(g, [0, 1])


class TestLouvain:
    def test_two_cliques_split(self):
        g = two_cliques_with_bridge(5)
        levels = louvain_levels(g, seed=1)
        final = levels[-1]
        assert final.community_count == 2
        parts = {frozenset(np.flatnonzero(final.membership == c))
                 for c in range(2)}
        assert parts == {frozenset(range(5)), frozenset(range(5, 10))}

    def test_two_cliques_matches_brute_force_bipartition(self):
        g = two_cliques_with_bridge(5)
        best_q, best_parts = -1.0, None
        for bits in itertools.product([0, 1], repeat=9):
            member = np.array((0,) + bits)
            if member.min() == member.max():
                continue
            q = brute_modularity(g, member)
            if q > best_q:
                best_q = q
                best_parts = {frozenset(np.flatnonzero(member == c)) for c in (0, 1)}
        final = louvain_levels(g, seed=3)[-1]
        got = {frozenset(np.flatnonzero(final.membership == c))
               for c in range(final.community_count)}
        assert got == best_parts
        assert final.modularity == pytest.approx(best_q, abs=1e-12)

    def test_components_never_merge(self):
        g = Graph(9, [(0, 1), (1, 2), (3, 4), (4, 5), (6, 7), (7, 8)])
        final = louvain_levels(g, seed=0)[-1]
        comp = [0, 0, 0, 1, 1, 1, 2, 2, 2]
        assert final.community_count >= 3
        for c in range(final.community_count):
            nodes = np.flatnonzero(final.membership == c)
            assert len({comp[i] for i in nodes}) == 1

    def test_modularity_monotone_over_levels(self):
        for seed in range(5):
            g = gen_er(60, 0.08, seed=seed)
            levels = louvain_levels(g, seed=seed)
            assert len(levels) >= 1
            qs = [lv.modularity for lv in levels]
            assert all(qs[i] <= qs[i + 1] + 1e-12 for i in range(len(qs) - 1))
            counts = [lv.community_count for lv in levels]
            assert all(counts[i] >= counts[i + 1] for i in range(len(counts) - 1))

    def test_each_level_partitions_all_nodes(self):
        g = gen_er(50, 0.1, seed=2)
        for lv in louvain_levels(g, seed=2):
            assert lv.membership.shape == (50,)
            assert lv.community_count == len(set(lv.membership.tolist()))
            assert set(lv.membership.tolist()) == set(range(lv.community_count))

    def test_reported_modularity_recomputed(self):
        g = gen_er(40, 0.15, seed=4)
        for lv in louvain_levels(g, seed=4):
            assert lv.modularity == pytest.approx(
                brute_modularity(g, lv.membership), abs=1e-12)

    def test_deterministic(self):
        g = gen_er(80, 0.08, seed=6)
        a = louvain_levels(g, seed=9)
        b = louvain_levels(g, seed=9)
        assert len(a) == len(b)
        for la, lb in zip(a, b):
            assert (la.membership == lb.membership).all()

    def test_empty_graph_rejected(self):
        with pytest.raises(ValueError, match="no edges"):
            louvain_levels(Graph(4), seed=0)

    def test_levels_are_nested_coarsenings(self):
        g = gen_er(70, 0.1, seed=8)
        levels = louvain_levels(g, seed=8)
        for fine, coarse in zip(levels, levels[1:]):
            # every fine community maps into exactly one coarse community
            for c in range(fine.community_count):
                nodes = np.flatnonzero(fine.membership == c)
                assert len(set(coarse.membership[nodes].tolist())) == 1

import pytest

from gti.graph import Graph, gen_ba, gen_er, induced_subgraph
from gti.sampling import (forest_fire_sample, random_jump_sample,
                          random_walk_sample)

SAMPLERS = [random_walk_sample, random_jump_sample, forest_fire_sample]


def star(n):
    return Graph(n, [(0, i) for i in range(1, n)])


def is_connected(g):
    if g.node_count == 0:
        return True
    adj = g.adjacency_list()
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if int(v) not in seen:
                seen.add(int(v))
                stack.append(int(v))
    return len(seen) == g.node_count


class TestCommonBehavior:
    @pytest.mark.parametrize("sampler", SAMPLERS)
    def test_single_node(self, sampler):
        g = gen_ba(30, 2, seed=0)
        res = sampler(g, 1, seed=1)
        assert len(res.nodes) == 1
        assert res.subgraph.node_count == 1
        assert res.subgraph.edge_count == 0

    @pytest.mark.parametrize("sampler", SAMPLERS)
    def test_full_graph(self, sampler):
        g = gen_ba(25, 2, seed=1)  # connected by construction
        res = sampler(g, 25, seed=2)
        assert sorted(res.nodes) == list(range(25))
        assert res.subgraph.edge_count == g.edge_count

    @pytest.mark.parametrize("sampler", SAMPLERS)
    def test_exact_count_many_seeds(self, sampler):
        g = gen_ba(120, 3, seed=2)
        for seed in range(50):
            res = sampler(g, 37, seed=seed)
            assert len(res.nodes) == 37
            assert len(set(res.nodes)) == 37
            assert res.subgraph.node_count == 37

    @pytest.mark.parametrize("sampler", SAMPLERS)
    def test_deterministic(self, sampler):
        g = gen_er(60, 0.1, seed=3)
        a = sampler(g, 20, seed=9)
        b = sampler(g, 20, seed=9)
        assert a.nodes == b.nodes
        assert a.subgraph == b.subgraph

    @pytest.mark.parametrize("sampler", SAMPLERS)
    def test_subgraph_is_induced(self, sampler):
        g = gen_er(50, 0.15, seed=4)
        res = sampler(g, 15, seed=5)
        assert res.subgraph == induced_subgraph(g, res.nodes)

    @pytest.mark.parametrize("sampler", SAMPLERS)
    def test_sample_size_validation(self, sampler):
        g = gen_er(10, 0.3, seed=5)
        with pytest.raises(ValueError):
            sampler(g, 0, seed=0)
        with pytest.raises(ValueError):
            sampler(g, 11, seed=0)


class TestRandomWalk:
    def test_connected_sample_without_restarts(self):
        g = gen_ba(80, 2, seed=6)  # connected
        for seed in range(25):
            res = random_walk_sample(g, 30, seed=seed)
            assert not res.partial
            assert is_connected(res.subgraph)

    def test_star_hub_always_sampled(self):
        g = star(50)
        for seed in range(25):
            res = random_walk_sample(g, 10, seed=seed)
            assert 0 in res.nodes

    def test_disconnected_graph_flags_partial(self):
        # two triangles, no path between them; sampling 4 needs a restart
        g = Graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
        flagged = 0
        for seed in range(10):
            res = random_walk_sample(g, 5, seed=seed)
            assert len(res.nodes) == 5
            flagged += res.partial
        assert flagged == 10

    def test_restart_prob_validation(self):
        g = star(6)
        with pytest.raises(ValueError):
            random_walk_sample(g, 3, restart_prob=1.0, seed=0)


class TestRandomJump:
    def test_jump_prob_one_uniform_nodes(self):
        g = gen_er(40, 0.1, seed=7)
        res = random_jump_sample(g, 12, jump_prob=1.0, seed=8)
        assert len(set(res.nodes)) == 12

    def test_covers_disconnected_graphs_without_flag(self):
        g = Graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
        for seed in range(10):
            res = random_jump_sample(g, 5, seed=seed)
            assert len(res.nodes) == 5
            assert not res.partial

    def test_zero_jump_prob_terminates_with_flag(self):
        # degenerates to a plain walk; component exhaustion forces a
        # flagged restart instead of spinning forever
        g = Graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
        res = random_jump_sample(g, 5, jump_prob=0.0, seed=1)
        assert len(res.nodes) == 5
        assert res.partial


class TestForestFire:
    def test_exact_count_on_hub_graphs(self):
        g = gen_ba(200, 3, seed=9)
        for seed in range(50):
            res = forest_fire_sample(g, 60, seed=seed)
            assert len(res.nodes) == 60

    def test_burn_prob_validation(self):
        g = star(5)
        with pytest.raises(ValueError):
            forest_fire_sample(g, 3, burn_prob=1.0, seed=0)

    def test_zero_burn_prob_still_terminates(self):
        g = gen_er(30, 0.2, seed=10)
        res = forest_fire_sample(g, 10, burn_prob=0.0, seed=1)
        assert len(res.nodes) == 10

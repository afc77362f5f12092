"""Node-sampling baselines: random walk, random jump, forest fire.

Each sampler collects distinct visited nodes until the requested count is
reached and returns the induced subgraph on them (in visit order). When a
walk exhausts its component it restarts from a random unvisited node and
the result is flagged as partial coverage.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from gti._util import rng_from
from gti.graph import Graph, induced_subgraph


@dataclass
class SampleResult:
    method: str
    nodes: list[int]            # visit order
    subgraph: Graph
    partial: bool = False       # True when a component-exhaustion restart fired


def _components(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    """(component id per node, component sizes)."""
    adj = g.adjacency_list()
    comp = np.full(g.node_count, -1, dtype=np.int64)
    sizes = []
    cid = 0
    for start in range(g.node_count):
        if comp[start] != -1:
            continue
        queue = deque([start])
        comp[start] = cid
        size = 0
        while queue:
            u = queue.popleft()
            size += 1
            for v in adj[u]:
                if comp[v] == -1:
                    comp[v] = cid
                    queue.append(v)
        sizes.append(size)
        cid += 1
    return comp, np.array(sizes, dtype=np.int64)


def _check_n(g: Graph, n: int) -> None:
    if not 1 <= n <= g.node_count:
        raise ValueError(f"sample size must lie in [1, {g.node_count}]")


def _result(method: str, g: Graph, order: list[int], partial: bool) -> SampleResult:
    return SampleResult(method=method, nodes=order,
                        subgraph=induced_subgraph(g, order), partial=partial)


def _walk_sample(g: Graph, n: int, move_prob: float, teleport_anywhere: bool,
                 seed: int, method: str) -> SampleResult:
    """Shared walker. With probability ``move_prob`` the walker teleports:
    back to the walk's start node (random walk with restart) or to a
    uniformly random node (random jump)."""
    _check_n(g, n)
    rng = rng_from(seed, 0x5a17)
    adj = g.adjacency_list()
    comp, comp_sizes = _components(g)
    visited_per_comp = np.zeros(len(comp_sizes), dtype=np.int64)
    # teleports that reach any node eventually escape a finished component;
    # start-restarts (or no teleports at all) do not
    can_escape = teleport_anywhere and move_prob > 0

    start = int(rng.integers(g.node_count))
    visited = {start}
    order = [start]
    visited_per_comp[comp[start]] += 1
    cur = start
    partial = False

    while len(order) < n:
        reachable_done = visited_per_comp[comp[cur]] == comp_sizes[comp[cur]]
        if reachable_done and not can_escape:
            unvisited = [u for u in range(g.node_count) if u not in visited]
            cur = start = int(unvisited[rng.integers(len(unvisited))])
            partial = True
        elif rng.random() < move_prob:
            cur = int(rng.integers(g.node_count)) if teleport_anywhere else start
        else:
            nbrs = adj[cur]
            if nbrs.size == 0:
                continue  # isolated current node; next loop iteration restarts
            cur = int(nbrs[rng.integers(nbrs.size)])
        if cur not in visited:
            visited.add(cur)
            order.append(cur)
            visited_per_comp[comp[cur]] += 1
    return _result(method, g, order, partial)


def random_walk_sample(g: Graph, n: int, restart_prob: float = 0.15,
                       seed: int = 0) -> SampleResult:
    if not 0.0 <= restart_prob < 1.0:
        raise ValueError("restart_prob must lie in [0, 1)")
    return _walk_sample(g, n, restart_prob, teleport_anywhere=False,
                        seed=seed, method="random_walk")


def random_jump_sample(g: Graph, n: int, jump_prob: float = 0.15,
                       seed: int = 0) -> SampleResult:
    if not 0.0 <= jump_prob <= 1.0:
        raise ValueError("jump_prob must lie in [0, 1]")
    return _walk_sample(g, n, jump_prob, teleport_anywhere=True,
                        seed=seed, method="random_jump")


def forest_fire_sample(g: Graph, n: int, burn_prob: float = 0.35,
                       seed: int = 0) -> SampleResult:
    """Probabilistic breadth-first burning; each burning node ignites a
    geometric number (mean burn_prob / (1 - burn_prob)) of unburned
    neighbors. The fire re-ignites from a random unburned node when it
    dies out, and the final wave is truncated to hit n exactly."""
    _check_n(g, n)
    if not 0.0 <= burn_prob < 1.0:
        raise ValueError("burn_prob must lie in [0, 1)")
    rng = rng_from(seed, 0xf17e)
    adj = g.adjacency_list()
    burned: set[int] = set()
    order: list[int] = []
    queue: deque[int] = deque()

    def ignite(v: int) -> None:
        burned.add(v)
        order.append(v)
        queue.append(v)

    ignite(int(rng.integers(g.node_count)))
    while len(order) < n:
        if not queue:
            unburned = [u for u in range(g.node_count) if u not in burned]
            ignite(int(unburned[rng.integers(len(unburned))]))
            continue
        u = queue.popleft()
        candidates = [int(v) for v in adj[u] if v not in burned]
        if not candidates:
            continue
        burn = int(rng.geometric(1.0 - burn_prob)) - 1
        burn = min(burn, len(candidates), n - len(order))
        if burn <= 0:
            continue
        picks = rng.choice(len(candidates), size=burn, replace=False)
        for idx in sorted(int(i) for i in picks):
            ignite(candidates[idx])
    return _result("forest_fire", g, order, partial=False)

"""Louvain community detection producing a hierarchy of coarsening levels.

Each completed pass of local moves + aggregation yields one level whose
assignment maps the ORIGINAL nodes to that pass's communities. The number
of communities per level later decides how many blocks a layer is split
into.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gti._util import rng_from
from gti.graph import Graph

_GAIN_EPS = 1e-12


@dataclass(frozen=True)
class HierarchyLevel:
    level: int                 # 0 = finest
    membership: np.ndarray     # original node id -> community id (dense)
    community_count: int
    modularity: float


def modularity(g: Graph, membership) -> float:
    """Newman-Girvan modularity of an assignment on an unweighted graph."""
    member = np.asarray(membership, dtype=np.int64)
    if member.shape != (g.node_count,):
        raise ValueError("assignment must cover every node exactly once")
    m = g.edge_count
    if m == 0:
        raise ValueError("modularity is undefined on an edgeless graph")
    n_comms = int(member.max()) + 1 if member.size else 0
    u, v = g.edge_array[:, 0], g.edge_array[:, 1]
    intra = np.bincount(member[u][member[u] == member[v]], minlength=n_comms)
    comm_degree = np.bincount(member, weights=g.degrees().astype(np.float64),
                              minlength=n_comms)
    q = intra / m - (comm_degree / (2.0 * m)) ** 2
    return float(q.sum())


def louvain_levels(g: Graph, seed: int = 0) -> list[HierarchyLevel]:
    """Two-phase Louvain; one HierarchyLevel per pass that improved modularity."""
    if g.edge_count == 0:
        raise ValueError("graph has no edges; the interpolation pipeline "
                         "cannot be applied to a degenerate input")
    rng = rng_from(seed, 0x10f)

    # working (weighted) graph: neighbor weights exclude self-loops, which
    # are tracked separately and accumulate intra-community edge weight
    n = g.node_count
    adj: list[dict[int, float]] = [dict() for _ in range(n)]
    for a, b in g.edge_array:
        adj[a][int(b)] = adj[a].get(int(b), 0.0) + 1.0
        adj[b][int(a)] = adj[b].get(int(a), 0.0) + 1.0
    self_w = np.zeros(n)
    node_to_current = np.arange(g.node_count, dtype=np.int64)

    levels: list[HierarchyLevel] = []
    while True:
        comm, moved = _local_moves(adj, self_w, rng)
        if not moved:
            break
        # dense relabel, ordered by old community id
        _, dense = np.unique(comm, return_inverse=True)
        membership = dense[node_to_current]
        levels.append(HierarchyLevel(
            level=len(levels),
            membership=membership,
            community_count=int(dense.max()) + 1,
            modularity=modularity(g, membership),
        ))
        node_to_current = membership
        adj, self_w = _aggregate(adj, self_w, dense)
        if len(adj) == 1:
            break
    return levels


def _local_moves(adj: list[dict[int, float]], self_w: np.ndarray,
                 rng: np.random.Generator) -> tuple[np.ndarray, bool]:
    """Sweep nodes in seeded order, greedily moving each to the neighboring
    community with the largest positive modularity gain."""
    n = len(adj)
    strength = np.array([sum(nb.values()) for nb in adj]) + 2.0 * self_w
    two_w = strength.sum()
    if two_w <= 0:
        return np.arange(n, dtype=np.int64), False
    w_total = two_w / 2.0

    comm = np.arange(n, dtype=np.int64)
    comm_strength = strength.copy()
    moved_any = False
    for _ in range(256):  # safety bound; Louvain converges long before
        order = rng.permutation(n)
        moves = 0
        for i in order:
            ci = int(comm[i])
            ki = strength[i]
            if ki == 0:
                continue
            links: dict[int, float] = {}
            for j, w in adj[i].items():
                links[int(comm[j])] = links.get(int(comm[j]), 0.0) + w
            comm_strength[ci] -= ki
            gain_stay = links.get(ci, 0.0) / w_total - ki * comm_strength[ci] / (2.0 * w_total ** 2)
            best_c, best_gain = ci, gain_stay
            for c in sorted(links):
                if c == ci:
                    continue
                gain = links[c] / w_total - ki * comm_strength[c] / (2.0 * w_total ** 2)
                if gain > best_gain + _GAIN_EPS:
                    best_c, best_gain = c, gain
            comm_strength[best_c] += ki
            if best_c != ci:
                comm[i] = best_c
                moves += 1
                moved_any = True
        if moves == 0:
            break
    return comm, moved_any


def _aggregate(adj: list[dict[int, float]], self_w: np.ndarray,
               dense_comm: np.ndarray) -> tuple[list[dict[int, float]], np.ndarray]:
    n_new = int(dense_comm.max()) + 1
    new_adj: list[dict[int, float]] = [dict() for _ in range(n_new)]
    new_self = np.zeros(n_new)
    for i, nbrs in enumerate(adj):
        ci = int(dense_comm[i])
        new_self[ci] += self_w[i]
        for j, w in nbrs.items():
            cj = int(dense_comm[j])
            if ci == cj:
                if i < j:
                    new_self[ci] += w
            else:
                new_adj[ci][cj] = new_adj[ci].get(cj, 0.0) + w
    return new_adj, new_self

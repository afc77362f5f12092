"""Balanced k-way graph partitioning.

Multilevel scheme: heavy-edge-matching coarsening, greedy region-growing
initial assignment on the coarsest graph, then uncoarsening with
move/swap boundary refinement under a balance cap. Self-contained and
deterministic given the seed; it does not try to match the cut quality of
a production partitioner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from gti._util import rng_from
from gti.graph import Graph


@dataclass
class PartitionResult:
    part_ids: np.ndarray        # node -> part
    parts: list[np.ndarray]     # ascending node ids per part
    part_sizes: np.ndarray
    cut_edges: int
    balance: float              # max part size / (N / M)


class _Level:
    """One coarsening level: weighted graph + mapping to the finer level."""

    __slots__ = ("adj", "node_w", "fine_to_coarse")

    def __init__(self, adj, node_w, fine_to_coarse):
        self.adj = adj                      # list[dict[int, float]]
        self.node_w = node_w                # np.ndarray int64
        self.fine_to_coarse = fine_to_coarse  # np.ndarray or None (finest)


def size_cap(n: int, parts: int, tolerance: float) -> int:
    """Largest allowed part size: the tolerance bound, relaxed to the
    smallest integer bound that any partition must satisfy."""
    ideal = n / parts
    return max(math.ceil(ideal), math.floor((1.0 + tolerance) * ideal))


def partition_balanced(g: Graph, parts: int, tolerance: float = 0.05,
                       seed: int = 0) -> PartitionResult:
    n = g.node_count
    if parts < 1:
        raise ValueError("parts must be >= 1")
    if parts > n:
        raise ValueError(f"cannot split {n} nodes into {parts} parts")
    if tolerance < 0:
        raise ValueError("tolerance must be non-negative")

    if parts == 1:
        ids = np.zeros(n, dtype=np.int64)
        return _result(g, ids, parts)
    if parts == n:
        return _result(g, np.arange(n, dtype=np.int64), parts)

    base_adj: list[dict[int, float]] = [dict() for _ in range(n)]
    for u, v in g.edge_array:
        base_adj[u][int(v)] = 1.0
        base_adj[v][int(u)] = 1.0
    levels = [_Level(base_adj, np.ones(n, dtype=np.int64), None)]

    rng = rng_from(seed, 0x9a7)
    target = max(4 * parts, 64)
    while len(levels[-1].adj) > target:
        coarse = _coarsen(levels[-1], rng)
        if coarse is None:
            break
        levels.append(coarse)

    cap = size_cap(n, parts, tolerance)
    best_ids = None
    best_cut = None
    for _ in range(4):  # a few seeded starts, keep the best refined result
        ids = _initial_partition(levels[-1], parts, rng)
        for depth in range(len(levels) - 1, -1, -1):
            level = levels[depth]
            allow_swaps = len(level.adj) <= 2048
            if depth == 0:
                _rebalance(level, ids, parts, cap, rng)
                _fill_empty_parts(level, ids, parts, cap)
            _refine(level, ids, parts, cap, rng, allow_swaps=allow_swaps)
            if depth > 0:
                # project the assignment down to the next finer level
                ids = ids[level.fine_to_coarse]
        cut = _cut_weight(levels[0].adj, ids)
        if best_cut is None or cut < best_cut:
            best_cut = cut
            best_ids = ids
    return _result(g, best_ids, parts)


# ---------------------------------------------------------------------------

def _result(g: Graph, ids: np.ndarray, parts: int) -> PartitionResult:
    part_list = [np.flatnonzero(ids == p).astype(np.int64) for p in range(parts)]
    sizes = np.array([len(p) for p in part_list], dtype=np.int64)
    cut = 0
    for u, v in g.edge_array:
        if ids[u] != ids[v]:
            cut += 1
    ideal = g.node_count / parts if parts else 1.0
    balance = float(sizes.max() / ideal) if g.node_count else 1.0
    return PartitionResult(part_ids=ids, parts=part_list, part_sizes=sizes,
                           cut_edges=cut, balance=balance)


def _coarsen(level: _Level, rng: np.random.Generator) -> _Level | None:
    adj, node_w = level.adj, level.node_w
    n = len(adj)
    match = np.full(n, -1, dtype=np.int64)
    for i in rng.permutation(n):
        if match[i] != -1:
            continue
        best_j, best_w = -1, -1.0
        for j, w in adj[i].items():
            if match[j] == -1 and (w > best_w or (w == best_w and j < best_j)):
                best_j, best_w = j, w
        if best_j >= 0:
            match[i] = best_j
            match[best_j] = i
        else:
            match[i] = i
    fine_to_coarse = np.full(n, -1, dtype=np.int64)
    nxt = 0
    for i in range(n):
        if fine_to_coarse[i] != -1:
            continue
        fine_to_coarse[i] = nxt
        j = int(match[i])
        if j != i:
            fine_to_coarse[j] = nxt
        nxt += 1
    if nxt > 0.95 * n:  # matching stalled, stop coarsening
        return None
    coarse_adj: list[dict[int, float]] = [dict() for _ in range(nxt)]
    coarse_w = np.zeros(nxt, dtype=np.int64)
    for i in range(n):
        ci = int(fine_to_coarse[i])
        coarse_w[ci] += node_w[i]
        for j, w in adj[i].items():
            cj = int(fine_to_coarse[j])
            if ci != cj:
                coarse_adj[ci][cj] = coarse_adj[ci].get(cj, 0.0) + w
    for d in coarse_adj:
        for k in d:
            d[k] /= 2.0  # every inter-pair weight was added from both sides
    return _Level(coarse_adj, coarse_w, fine_to_coarse)


def _initial_partition(level: _Level, parts: int,
                       rng: np.random.Generator) -> np.ndarray:
    """Greedy region growing by node weight on the coarsest graph."""
    adj, node_w = level.adj, level.node_w
    n = len(adj)
    ids = np.full(n, -1, dtype=np.int64)
    unassigned = set(range(n))
    total = int(node_w.sum())
    remaining = total
    for p in range(parts - 1):
        goal = remaining / (parts - p)
        seed_order = sorted(unassigned)
        start = seed_order[int(rng.integers(len(seed_order)))]
        ids[start] = p
        unassigned.discard(start)
        weight = int(node_w[start])
        conn: dict[int, float] = {}
        for j, w in adj[start].items():
            if j in unassigned:
                conn[j] = conn.get(j, 0.0) + w
        while weight < goal and unassigned:
            if conn:
                pick = max(conn, key=lambda j: (conn[j], -j))
            else:
                pick = min(unassigned)
            conn.pop(pick, None)
            ids[pick] = p
            unassigned.discard(pick)
            weight += int(node_w[pick])
            for j, w in adj[pick].items():
                if j in unassigned:
                    conn[j] = conn.get(j, 0.0) + w
        remaining -= weight
    for i in unassigned:
        ids[i] = parts - 1
    return ids


def _cut_weight(adj: list[dict[int, float]], ids: np.ndarray) -> float:
    cut = 0.0
    for i, nbrs in enumerate(adj):
        for j, w in nbrs.items():
            if i < j and ids[i] != ids[j]:
                cut += w
    return cut


def _part_weights(node_w: np.ndarray, ids: np.ndarray, parts: int) -> np.ndarray:
    return np.bincount(ids, weights=node_w.astype(np.float64), minlength=parts).astype(np.int64)


def _conn_per_part(adj, ids, i, parts) -> np.ndarray:
    conn = np.zeros(parts)
    for j, w in adj[i].items():
        conn[ids[j]] += w
    return conn


def _rebalance(level: _Level, ids: np.ndarray, parts: int, cap: int,
               rng: np.random.Generator) -> None:
    """Move min-damage nodes out of oversized parts until the cap holds."""
    adj, node_w = level.adj, level.node_w
    weights = _part_weights(node_w, ids, parts)
    guard = 0
    while weights.max() > cap and guard < 4 * len(adj):
        guard += 1
        src = int(weights.argmax())
        members = np.flatnonzero(ids == src)
        best = None  # (damage, node, dst)
        for i in members:
            conn = _conn_per_part(adj, ids, int(i), parts)
            for dst in range(parts):
                if dst == src or weights[dst] + node_w[i] > cap:
                    continue
                damage = conn[src] - conn[dst]
                key = (damage, int(i), dst)
                if best is None or key < best:
                    best = key
        if best is None:
            break
        _, node, dst = best
        weights[src] -= node_w[node]
        weights[dst] += node_w[node]
        ids[node] = dst


def _fill_empty_parts(level: _Level, ids: np.ndarray, parts: int, cap: int) -> None:
    adj, node_w = level.adj, level.node_w
    weights = _part_weights(node_w, ids, parts)
    for p in range(parts):
        if weights[p] > 0:
            continue
        src = int(weights.argmax())
        members = np.flatnonzero(ids == src)
        best = None
        for i in members:
            conn = _conn_per_part(adj, ids, int(i), parts)
            key = (conn[src] - conn[p], int(i))
            if best is None or key < best:
                best = key
        _, node = best
        weights[src] -= node_w[node]
        weights[p] += node_w[node]
        ids[node] = p


def _refine(level: _Level, ids: np.ndarray, parts: int, cap: int,
            rng: np.random.Generator, allow_swaps: bool,
            max_passes: int = 8) -> None:
    """Positive-gain moves (and pair swaps) keeping sizes within the cap.

    Each pass only applies strictly improving changes, so the cut weight is
    non-increasing per pass; that is asserted.
    """
    adj, node_w = level.adj, level.node_w
    n = len(adj)
    weights = _part_weights(node_w, ids, parts)
    for _ in range(max_passes):
        cut_before = _cut_weight(adj, ids)
        improved = False
        for i in rng.permutation(n):
            i = int(i)
            conn = _conn_per_part(adj, ids, i, parts)
            src = int(ids[i])
            if conn.sum() == conn[src]:
                continue  # not a boundary node
            best_dst, best_gain = -1, 0.0
            for dst in range(parts):
                if dst == src or weights[dst] + node_w[i] > cap:
                    continue
                if weights[src] - node_w[i] <= 0:
                    continue
                gain = conn[dst] - conn[src]
                if gain > best_gain:
                    best_dst, best_gain = dst, gain
            if best_dst >= 0:
                weights[src] -= node_w[i]
                weights[best_dst] += node_w[i]
                ids[i] = best_dst
                improved = True
        if not improved and allow_swaps:
            improved = _swap_pass(adj, node_w, ids, parts, weights)
        cut_after = _cut_weight(adj, ids)
        assert cut_after <= cut_before + 1e-9, "refinement increased the cut"
        if not improved:
            break


def _swap_pass(adj, node_w, ids, parts, weights) -> bool:
    """One Kernighan-Lin style sweep of strictly improving pair swaps."""
    n = len(adj)
    boundary = [i for i in range(n)
                if any(ids[j] != ids[i] for j in adj[i])]
    by_part: dict[int, list[int]] = {}
    for i in boundary:
        by_part.setdefault(int(ids[i]), []).append(i)
    improved = False
    for u in boundary:
        pu = int(ids[u])
        conn_u = _conn_per_part(adj, ids, u, parts)
        for pv, members in by_part.items():
            if pv == pu:
                continue
            best = None
            for v in members:
                if int(ids[v]) != pv or node_w[v] != node_w[u]:
                    continue
                conn_v = _conn_per_part(adj, ids, v, parts)
                gain = ((conn_u[pv] - conn_u[pu]) + (conn_v[pu] - conn_v[pv])
                        - 2.0 * adj[u].get(v, 0.0))
                if gain > 1e-12 and (best is None or gain > best[0]):
                    best = (gain, v)
            if best is not None:
                _, v = best
                ids[u], ids[v] = pv, pu
                improved = True
                conn_u = _conn_per_part(adj, ids, u, parts)
                pu = int(ids[u])
    return improved

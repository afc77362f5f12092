"""Undirected simple graphs: representation, edge-list I/O, generators, metrics."""

from __future__ import annotations

import logging
import re
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)

# Optional saver hint so graphs with trailing isolated nodes round-trip.
# Also matches the "# Nodes: 4039 Edges: 88234" comment found in SNAP files.
_NODES_HEADER = re.compile(r"#\s*nodes\b\D*(\d+)", re.IGNORECASE)


class Graph:
    """Undirected simple graph on nodes ``0..node_count-1``.

    Edges are kept canonically as a lexicographically sorted ``(m, 2)``
    int64 array with ``u < v`` per row. No self-loops, no duplicates.
    """

    __slots__ = ("node_count", "edge_array", "_adj")

    def __init__(self, node_count: int, edges=()):
        node_count = int(node_count)
        if node_count < 0:
            raise ValueError("node_count must be non-negative")
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                         dtype=np.int64)
        if arr.size == 0:
            arr = np.empty((0, 2), dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("edges must be pairs of node ids")
        if arr.size:
            if arr.min() < 0 or arr.max() >= node_count:
                raise ValueError("edge endpoint out of range")
            if (arr[:, 0] == arr[:, 1]).any():
                raise ValueError("self-loops are not allowed")
            arr = np.sort(arr, axis=1)
            arr = np.unique(arr, axis=0)
        self.node_count = node_count
        self.edge_array = arr
        self._adj = None

    @property
    def edge_count(self) -> int:
        return self.edge_array.shape[0]

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(u), int(v)) for u, v in self.edge_array}

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.node_count, dtype=np.int64)
        if self.edge_count:
            np.add.at(deg, self.edge_array[:, 0], 1)
            np.add.at(deg, self.edge_array[:, 1], 1)
        return deg

    def adjacency_list(self) -> list[np.ndarray]:
        """Sorted neighbor array per node (cached)."""
        if self._adj is None:
            nbrs: list[list[int]] = [[] for _ in range(self.node_count)]
            for u, v in self.edge_array:
                nbrs[u].append(int(v))
                nbrs[v].append(int(u))
            self._adj = [np.array(sorted(n), dtype=np.int64) for n in nbrs]
        return self._adj

    def adjacency_matrix(self, dtype=np.float64) -> np.ndarray:
        a = np.zeros((self.node_count, self.node_count), dtype=dtype)
        if self.edge_count:
            u, v = self.edge_array[:, 0], self.edge_array[:, 1]
            a[u, v] = 1
            a[v, u] = 1
        return a

    def has_edge(self, u: int, v: int) -> bool:
        if u > v:
            u, v = v, u
        m = self.edge_array
        i = np.searchsorted(m[:, 0], u)
        while i < m.shape[0] and m[i, 0] == u:
            if m[i, 1] == v:
                return True
            i += 1
        return False

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.node_count == other.node_count
                and self.edge_array.shape == other.edge_array.shape
                and bool((self.edge_array == other.edge_array).all()))

    def __repr__(self) -> str:
        return f"Graph(nodes={self.node_count}, edges={self.edge_count})"


def check_weighted_adjacency(a: np.ndarray) -> None:
    """Raise unless ``a`` is square, symmetric, non-negative, zero-diagonal."""
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("weighted adjacency must be square")
    if not np.allclose(a, a.T):
        raise ValueError("weighted adjacency must be symmetric")
    if (np.diag(a) != 0).any():
        raise ValueError("weighted adjacency must have a zero diagonal")
    if (a < 0).any():
        raise ValueError("weighted adjacency entries must be non-negative")


# ---------------------------------------------------------------------------
# Edge-list I/O ('#'-prefixed comments, "u v" data lines, SNAP compatible)
# ---------------------------------------------------------------------------

def load_edge_list(path, compact_ids: bool = False) -> Graph:
    """Load a whitespace-separated edge list.

    Self-loop lines are dropped (counted in a warning). Duplicate and
    reversed-duplicate lines collapse to a single undirected edge. Node
    count is 1 + the largest id seen, or the ``# nodes N`` header value
    when larger; pass ``compact_ids=True`` to relabel the ids densely.
    """
    path = Path(path)
    edges = []
    self_loops = 0
    max_id = -1
    header_nodes = -1
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                m = _NODES_HEADER.match(line)
                if m:
                    header_nodes = max(header_nodes, int(m.group(1)))
                continue
            tokens = line.split()
            if len(tokens) != 2:
                raise ValueError(f"{path}:{lineno}: expected two integer tokens")
            try:
                u, v = int(tokens[0]), int(tokens[1])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: malformed token") from exc
            if u < 0 or v < 0:
                raise ValueError(f"{path}:{lineno}: negative node id")
            if u == v:
                self_loops += 1
                continue
            max_id = max(max_id, u, v)
            edges.append((u, v))
    if self_loops:
        log.warning("%s: dropped %d self-loop line(s)", path, self_loops)
    node_count = max(max_id + 1, header_nodes, 0)
    g = Graph(node_count, edges)
    if compact_ids:
        used = sorted({int(x) for x in g.edge_array.ravel()})
        remap = {old: new for new, old in enumerate(used)}
        g = Graph(len(used), [(remap[int(u)], remap[int(v)]) for u, v in g.edge_array])
    return g


def save_edge_list(g: Graph, path) -> None:
    """Write ``g`` in the edge-list format read by :func:`load_edge_list`."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(f"# nodes {g.node_count} edges {g.edge_count}\n")
        for u, v in g.edge_array:
            fh.write(f"{u} {v}\n")


# ---------------------------------------------------------------------------
# Synthetic generators
# ---------------------------------------------------------------------------

def gen_er(n: int, p: float, seed: int = 0) -> Graph:
    """Erdos-Renyi G(n, p); each unordered pair kept independently."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    edges = []
    for u in range(n - 1):
        mask = rng.random(n - u - 1) < p
        for off in np.flatnonzero(mask):
            edges.append((u, u + 1 + int(off)))
    return Graph(n, edges)


def gen_ba(n: int, m: int, seed: int = 0) -> Graph:
    """Preferential attachment from m isolated seed nodes.

    Every arriving node attaches m distinct edges, so the edge count is
    exactly m * (n - m).
    """
    if not 1 <= m < n:
        raise ValueError("need 1 <= m < n")
    rng = np.random.default_rng(seed)
    edges = []
    repeated: list[int] = []  # node id repeated once per incident edge
    targets = list(range(m))  # first arrival connects to all seed nodes
    for new in range(m, n):
        for t in targets:
            edges.append((t, new))
            repeated.extend((t, new))
        # sample m distinct targets proportionally to degree
        chosen: set[int] = set()
        while len(chosen) < m:
            chosen.add(int(repeated[rng.integers(len(repeated))]))
        targets = sorted(chosen)
    return Graph(n, edges)


def gen_ws(n: int, k: int, beta: float, seed: int = 0) -> Graph:
    """Watts-Strogatz ring lattice with rewiring; edge count stays n*k/2."""
    if k <= 0 or k >= n:
        raise ValueError("need 0 < k < n")
    if k % 2:
        raise ValueError("k must be even")
    if not 0.0 <= beta <= 1.0:
        raise ValueError("beta must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    present = {(min(u, (u + j) % n), max(u, (u + j) % n))
               for u in range(n) for j in range(1, k // 2 + 1)}
    for j in range(1, k // 2 + 1):
        for u in range(n):
            v = (u + j) % n
            key = (min(u, v), max(u, v))
            if key not in present or rng.random() >= beta:
                continue
            # rewire (u, v) -> (u, w); keep the original edge when the
            # node is already connected to everything else
            for _ in range(8 * n):
                w = int(rng.integers(n))
                cand = (min(u, w), max(u, w))
                if w != u and cand not in present:
                    present.remove(key)
                    present.add(cand)
                    break
    return Graph(n, sorted(present))


def gen_kron(initiator, power: int, seed: int = 0, drop_isolated: bool = False) -> Graph:
    """Stochastic Kronecker graph on b**power nodes (b = initiator side).

    Pair (u, v) appears with probability prod_t initiator[u_t][v_t] over the
    base-b digits of u and v. ``drop_isolated`` removes degree-0 nodes and
    compacts the ids.
    """
    init = np.asarray(initiator, dtype=np.float64)
    if init.ndim != 2 or init.shape[0] != init.shape[1] or init.shape[0] < 2:
        raise ValueError("initiator must be a square matrix with side >= 2")
    if (init < 0).any() or (init > 1).any():
        raise ValueError("initiator entries must lie in [0, 1]")
    if power < 1:
        raise ValueError("power must be >= 1")
    b = init.shape[0]
    n = b ** power
    rng = np.random.default_rng(seed)
    edges = []
    for u in range(n - 1):
        # row u of the Kronecker power, built from u's digits (MSB first)
        row = np.ones(1)
        rem = u
        for t in range(power - 1, -1, -1):
            digit = (rem // b ** t) % b
            row = np.kron(row, init[digit])
        tail = row[u + 1:]
        mask = rng.random(tail.shape[0]) < tail
        for off in np.flatnonzero(mask):
            edges.append((u, u + 1 + int(off)))
    g = Graph(n, edges)
    if drop_isolated:
        used = np.flatnonzero(g.degrees() > 0)
        remap = {int(old): new for new, old in enumerate(used)}
        g = Graph(len(used), [(remap[int(u)], remap[int(v)]) for u, v in g.edge_array])
    return g


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------

def degree_histogram(degrees: np.ndarray) -> list[tuple[int, int]]:
    """(degree, count) pairs, degrees ascending, counts summing to len(degrees)."""
    counts = np.bincount(np.asarray(degrees, dtype=np.int64))
    return [(int(d), int(c)) for d, c in enumerate(counts) if c > 0]


def degree_distribution(g: Graph) -> list[tuple[int, int]]:
    """Degree histogram over all nodes, including degree-0 nodes."""
    if g.node_count == 0:
        return []
    return degree_histogram(g.degrees())


def induced_subgraph(g: Graph, nodes) -> Graph:
    """Subgraph on ``nodes`` re-indexed to 0..len-1 in the given order."""
    nodes = [int(x) for x in nodes]
    if len(set(nodes)) != len(nodes):
        raise ValueError("duplicate node id")
    for x in nodes:
        if not 0 <= x < g.node_count:
            raise ValueError(f"node id {x} out of range")
    remap = {old: new for new, old in enumerate(nodes)}
    edges = [(remap[int(u)], remap[int(v)])
             for u, v in g.edge_array
             if int(u) in remap and int(v) in remap]
    return Graph(len(nodes), edges)

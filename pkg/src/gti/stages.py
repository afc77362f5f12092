"""Order reconstructed edge weights into nested stages via cut values.

Weights are first masked by the original adjacency (stages contain only
original edges), rounded to 3 decimals, and the distinct positive values
descending become the cut values; stage i keeps every edge whose rounded
weight reaches cut value i. When there are more distinct values than
max_stages, cut values are taken at evenly spaced positions of the
descending value list, always keeping the largest and smallest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gti.graph import Graph, degree_histogram
from gti.reconstruct import Reconstruction

ROUND_DECIMALS = 3


@dataclass
class Stage:
    index: int                  # 1 = highest cut value
    cut_value: float
    adjacency: np.ndarray       # binary N x N, uint8
    edge_count: int
    deleted_edge_pct: float


def identify_stages(recon: Reconstruction, g: Graph, max_stages: int = 8) -> list[Stage]:
    if max_stages < 1:
        raise ValueError("max_stages must be >= 1")
    if recon.weights.shape != (g.node_count, g.node_count):
        raise ValueError("reconstruction size mismatch")
    if g.edge_count == 0:
        raise ValueError("original graph has no edges")

    masked = np.round(recon.weights * g.adjacency_matrix(), ROUND_DECIMALS)
    values = masked[np.triu_indices_from(masked, k=1)]
    uniques = np.unique(values[values > 0])[::-1]
    if uniques.size == 0:
        raise RuntimeError(
            "every original edge received a ~zero reconstructed weight; "
            "inspect the fusion output before staging")
    if uniques.size > max_stages:
        idx = np.unique(np.round(np.linspace(0, uniques.size - 1, max_stages)).astype(int))
        cuts = uniques[idx]
    else:
        cuts = uniques

    stages = []
    for i, cv in enumerate(cuts, start=1):
        adjacency = (masked >= cv).astype(np.uint8)
        edge_count = int(adjacency.sum()) // 2
        pct = 100.0 * (g.edge_count - edge_count) / g.edge_count
        stages.append(Stage(index=i, cut_value=float(cv), adjacency=adjacency,
                            edge_count=edge_count, deleted_edge_pct=pct))
    return stages


def deleted_edge_percentage(stage: Stage, g: Graph) -> float:
    if stage.adjacency.shape != (g.node_count, g.node_count):
        raise ValueError("stage size mismatch")
    if g.edge_count == 0:
        raise ValueError("original graph has no edges")
    return 100.0 * (g.edge_count - stage.edge_count) / g.edge_count


def stage_degree_distribution(stage: Stage) -> list[tuple[int, int]]:
    """Degree histogram of the stage adjacency, isolated nodes included."""
    return degree_histogram(stage.adjacency.sum(axis=1).astype(np.int64))


def stage_nodes(stage: Stage) -> np.ndarray:
    """Ids of the stage's non-isolated nodes, ascending."""
    return np.flatnonzero(stage.adjacency.sum(axis=1) > 0).astype(np.int64)


def stage_edges(stage: Stage) -> np.ndarray:
    """(m, 2) array of stage edges with u < v, lexicographically sorted."""
    u, v = np.nonzero(np.triu(stage.adjacency, k=1))
    return np.column_stack([u, v]).astype(np.int64)

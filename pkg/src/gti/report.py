"""Report emission: degree CSVs, DOT export, run report JSON, sampling CSV."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from gti.graph import Graph, degree_distribution
from gti.sampling import forest_fire_sample, random_jump_sample, random_walk_sample
from gti.stages import Stage, stage_degree_distribution, stage_nodes


def emit_degree_csv(g: Graph, stages: list[Stage], path) -> None:
    """series,degree,count rows for the original graph and every stage."""
    with Path(path).open("w") as fh:
        fh.write("series,degree,count\n")
        for degree, count in degree_distribution(g):
            fh.write(f"original,{degree},{count}\n")
        for st in stages:
            for degree, count in stage_degree_distribution(st):
                fh.write(f"stage_{st.index},{degree},{count}\n")


def emit_dot(g: Graph, path, highlight=None, labels=None) -> None:
    """Undirected DOT dump; ``labels`` overrides node names (defaults to the
    node id), ``highlight`` nodes are drawn filled."""
    highlight = {int(x) for x in highlight} if highlight is not None else set()

    def name(i: int) -> str:
        return str(labels[i]) if labels is not None else str(i)

    with Path(path).open("w") as fh:
        fh.write("graph G {\n")
        for i in range(g.node_count):
            style = " [style=filled, fillcolor=gold]" if i in highlight else ""
            fh.write(f"  {name(i)}{style};\n")
        for u, v in g.edge_array:
            fh.write(f"  {name(int(u))} -- {name(int(v))};\n")
        fh.write("}\n")


def histogram_l1_distance(a: list[tuple[int, int]], b: list[tuple[int, int]],
                          node_count: int) -> float:
    """L1 distance between two degree histograms normalized by node count."""
    top = max([d for d, _ in a] + [d for d, _ in b] + [0])
    va = np.zeros(top + 1)
    vb = np.zeros(top + 1)
    for d, c in a:
        va[d] = c
    for d, c in b:
        vb[d] = c
    return float(np.abs(va - vb).sum() / node_count)


def stage_degree_distances(g: Graph, stages: list[Stage]) -> list[float]:
    original = degree_distribution(g)
    return [histogram_l1_distance(stage_degree_distribution(st), original, g.node_count)
            for st in stages]


def emit_report_json(artifacts, path) -> None:
    """Single JSON document summarizing a pipeline run (no timestamps, so
    reruns with the same config and seed are byte-identical)."""
    g = artifacts.graph
    distances = stage_degree_distances(g, artifacts.stages)
    doc = {
        "config": artifacts.config.to_dict(),
        "graph": {"nodes": g.node_count, "edges": g.edge_count},
        "hierarchy": [{"level": lv.level,
                       "community_count": lv.community_count,
                       "modularity": lv.modularity}
                      for lv in artifacts.levels],
        "layers": [{"layer": lr.layer_id,
                    "level": lr.level,
                    "community_count": lr.community_count,
                    "k": lr.k,
                    "cut_edges": lr.cut_edges,
                    "balance": lr.balance,
                    "failed": lr.failed,
                    "final_d_loss": lr.final_d_loss,
                    "final_g_loss": lr.final_g_loss}
                   for lr in artifacts.layers],
        "inter_edge_count": artifacts.inter_edge_count,
        "sum_up": {"layer_weights": [float(w) for w in artifacts.sumup.layer_weights],
                   "inter_weight": float(artifacts.sumup.inter_weight),
                   "bias": float(artifacts.sumup.bias),
                   "final_loss": float(artifacts.reconstruction.final_loss)},
        "gan_recipe": {"generator_loss": "non-saturating",
                       "adam_betas": [0.5, 0.999],
                       "leaky_relu_slope": 0.2},
        "stages": [{"stage": st.index,
                    "cut_value": st.cut_value,
                    "edge_count": st.edge_count,
                    "deleted_edge_pct": st.deleted_edge_pct,
                    "degree_l1_distance": distances[i]}
                   for i, st in enumerate(artifacts.stages)],
    }
    if artifacts.sampling_rows is not None:
        doc["sampling"] = artifacts.sampling_rows
    with Path(path).open("w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def sampling_comparison(g: Graph, stage: Stage, seed: int = 0) -> list[dict]:
    """Run the three samplers at the stage's non-isolated node count and
    tabulate node/edge/max-degree numbers next to the stage's own."""
    nodes = stage_nodes(stage)
    n = int(nodes.size)
    if n == 0:
        raise ValueError("stage has no non-isolated nodes to match")
    rows = [{
        "method": "gti_stage_1",
        "nodes": n,
        "edges": stage.edge_count,
        "max_degree": int(stage.adjacency.sum(axis=1).max()),
        "partial": False,
    }]
    samplers = [("random_walk", random_walk_sample),
                ("random_jump", random_jump_sample),
                ("forest_fire", forest_fire_sample)]
    for i, (name, fn) in enumerate(samplers):
        res = fn(g, n, seed=seed + i)
        degs = res.subgraph.degrees()
        rows.append({
            "method": name,
            "nodes": res.subgraph.node_count,
            "edges": res.subgraph.edge_count,
            "max_degree": int(degs.max()) if degs.size else 0,
            "partial": res.partial,
        })
    return rows


def emit_sampling_csv(rows: list[dict], path) -> None:
    with Path(path).open("w") as fh:
        fh.write("method,nodes,edges,max_degree,partial\n")
        for row in rows:
            fh.write(f"{row['method']},{row['nodes']},{row['edges']},"
                     f"{row['max_degree']},{str(row['partial']).lower()}\n")

"""End-to-end run orchestration and artifact persistence.

Workflow: community hierarchy -> per-layer (balanced partition -> block
batch -> adversarial training -> regeneration) -> inter-block edge matrix
-> weighted fusion -> nested stages -> metrics and reports. Every phase is
timed and every emitted file is listed in the run manifest.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

import gti
from gti import graph as graph_mod
from gti import report as report_mod
from gti._util import derive_seed
from gti.gan import (GanConfig, LayerReconstruction, TrainingDivergence,
                     make_subgraph_batch, regenerate_layer, train_layer_gan)
from gti.graph import Graph, load_edge_list, save_edge_list
from gti.hierarchy import HierarchyLevel, louvain_levels
from gti.nn import BACKEND
from gti.partition import PartitionResult, partition_balanced
from gti.reconstruct import Reconstruction, SumUpParams, inter_edges, kl_like_loss, sum_up
from gti.stages import Stage, identify_stages, stage_edges

log = logging.getLogger(__name__)

GENERATOR_MODELS = ("er", "ba", "ws", "kron")


class PipelineError(RuntimeError):
    def __init__(self, phase: str, message: str):
        super().__init__(f"[{phase}] {message}")
        self.phase = phase


@dataclass
class RunConfig:
    out_dir: str
    input_path: str | None = None
    generator: dict | None = None
    seed: int = 0
    max_stages: int = 8
    gan_iterations: int = 1000
    gan_learning_rate: float = 2e-4
    latent_dim: int = 100
    sumup_iterations: int = 500
    sumup_learning_rate: float = 0.1
    partition_tolerance: float = 0.05
    compare_sampling: bool = False

    def __post_init__(self):
        if (self.input_path is None) == (self.generator is None):
            raise ValueError("exactly one of input_path/generator must be set")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class LayerRun:
    layer_id: int
    level: int
    community_count: int
    k: int
    cut_edges: int
    balance: float
    failed: bool = False
    final_d_loss: float | None = None
    final_g_loss: float | None = None


@dataclass
class RunArtifacts:
    config: RunConfig
    out_dir: Path
    graph: Graph
    levels: list[HierarchyLevel]
    layers: list[LayerRun]
    partitions: list[PartitionResult]
    reconstructions: list[LayerReconstruction]
    inter_edge_count: int
    sumup: SumUpParams
    reconstruction: Reconstruction
    stages: list[Stage]
    phase_seconds: dict[str, float] = field(default_factory=dict)
    files: list[str] = field(default_factory=list)
    sampling_rows: list[dict] | None = None


def build_graph(spec: dict) -> Graph:
    """Construct a synthetic graph from a generator spec dict."""
    spec = dict(spec)
    model = spec.pop("model", None)
    if model not in GENERATOR_MODELS:
        raise ValueError(f"unknown generator model: {model!r}")
    seed = int(spec.pop("seed", 0))
    if model == "er":
        return graph_mod.gen_er(int(spec["nodes"]), float(spec["p"]), seed)
    if model == "ba":
        return graph_mod.gen_ba(int(spec["nodes"]), int(spec["m"]), seed)
    if model == "ws":
        return graph_mod.gen_ws(int(spec["nodes"]), int(spec["k"]),
                                float(spec["beta"]), seed)
    return graph_mod.gen_kron(spec["initiator"], int(spec["power"]), seed,
                              drop_isolated=bool(spec.get("drop_isolated", False)))


def usable_levels(levels: list[HierarchyLevel], node_count: int) -> list[HierarchyLevel]:
    """Levels that carry learnable block structure (1 < M < N)."""
    return [lv for lv in levels if 1 < lv.community_count < node_count]


def run_pipeline(cfg: RunConfig) -> RunArtifacts:
    timings: dict[str, float] = {}

    def phase(name):
        return _PhaseTimer(name, timings)

    with phase("load"):
        try:
            if cfg.input_path is not None:
                g = load_edge_list(cfg.input_path)
            else:
                g = build_graph(cfg.generator)
        except (OSError, ValueError, KeyError) as exc:
            raise PipelineError("load", str(exc)) from exc
    if g.edge_count == 0:
        raise PipelineError("hierarchy", "input graph has no edges; the pipeline "
                            "needs at least one edge (nothing was written)")

    with phase("hierarchy"):
        levels = louvain_levels(g, cfg.seed)
        layers_todo = usable_levels(levels, g.node_count)
    if not layers_todo:
        raise PipelineError(
            "hierarchy", "no community level has 1 < M < N; the graph is too "
            "small or structureless for layered reconstruction (nothing was written)")

    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files: list[str] = []

    def emit(relpath: str) -> Path:
        files.append(relpath)
        path = out / relpath
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    save_edge_list(g, emit("graph.txt"))
    _write_json(emit("hierarchy.json"), {
        "levels": [{"level": lv.level,
                    "community_count": lv.community_count,
                    "modularity": lv.modularity,
                    "used_as_layer": bool(1 < lv.community_count < g.node_count)}
                   for lv in levels]})

    layer_runs: list[LayerRun] = []
    partitions_ok: list[PartitionResult] = []
    recons_ok: list[LayerReconstruction] = []
    with phase("layers"):
        for layer_id, lv in enumerate(layers_todo):
            part = partition_balanced(g, lv.community_count,
                                      tolerance=cfg.partition_tolerance,
                                      seed=derive_seed(cfg.seed, 1, layer_id))
            batch = make_subgraph_batch(g, part, layer_id)
            run = LayerRun(layer_id=layer_id, level=lv.level,
                           community_count=lv.community_count, k=batch.k,
                           cut_edges=part.cut_edges, balance=part.balance)
            prefix = f"layer_{layer_id:02d}"
            _write_json(emit(f"{prefix}/partition.json"), {
                "community_count": lv.community_count,
                "k": batch.k,
                "cut_edges": part.cut_edges,
                "balance": part.balance,
                "parts": [[int(x) for x in nodes] for nodes in part.parts]})
            gan_cfg = GanConfig(latent_dim=cfg.latent_dim,
                                iterations=cfg.gan_iterations,
                                learning_rate=cfg.gan_learning_rate,
                                seed=derive_seed(cfg.seed, 2, layer_id))
            try:
                model = train_layer_gan(batch, gan_cfg)
            except TrainingDivergence as exc:
                log.warning("layer %d training aborted (%s); excluding it "
                            "from the fusion", layer_id, exc)
                run.failed = True
                layer_runs.append(run)
                continue
            run.final_d_loss, run.final_g_loss = model.loss_history[-1]
            model.save(emit(f"{prefix}/model.npz"))
            with emit(f"{prefix}/curve.csv").open("w") as fh:
                fh.write("iteration,d_loss,g_loss\n")
                for it, (d, gl) in enumerate(model.loss_history):
                    fh.write(f"{it},{d:.10g},{gl:.10g}\n")
            recon = regenerate_layer(model, batch, cfg.seed)
            np.savez(emit(f"{prefix}/block_weights.npz"), weights=recon.weights)
            layer_runs.append(run)
            partitions_ok.append(part)
            recons_ok.append(recon)
    if not recons_ok:
        raise PipelineError("layers", "every layer's training aborted; nothing "
                            "is available to fuse")

    with phase("inter_edges"):
        e = inter_edges(g, partitions_ok)
    with phase("sum_up"):
        try:
            params, recon = sum_up(recons_ok, e, g,
                                   iterations=cfg.sumup_iterations,
                                   learning_rate=cfg.sumup_learning_rate)
        except FloatingPointError as exc:
            raise PipelineError("sum_up", str(exc)) from exc
        _write_json(emit("sumup.json"), {
            "layer_weights": [float(w) for w in params.layer_weights],
            "inter_weight": float(params.inter_weight),
            "bias": float(params.bias),
            "final_loss": float(recon.final_loss),
            "kl_metric": kl_like_loss(recon.weights, g)})
        with emit("reconstruction.txt").open("w") as fh:
            fh.write("# row col weight\n")
            rows, cols = np.nonzero(np.triu(recon.weights, k=1))
            for r, c in zip(rows, cols):
                fh.write(f"{r} {c} {recon.weights[r, c]:.17g}\n")

    with phase("stages"):
        try:
            stage_list = identify_stages(recon, g, cfg.max_stages)
        except RuntimeError as exc:
            raise PipelineError("stages", str(exc)) from exc
        for st in stage_list:
            with emit(f"stage_{st.index}.txt").open("w") as fh:
                fh.write(f"# nodes {g.node_count} edges {st.edge_count}\n")
                for u, v in stage_edges(st):
                    fh.write(f"{u} {v}\n")
        with emit("stages.csv").open("w") as fh:
            fh.write("stage,cut_value,edge_count,deleted_edge_pct\n")
            for st in stage_list:
                fh.write(f"{st.index},{st.cut_value:.3f},{st.edge_count},"
                         f"{st.deleted_edge_pct:.6f}\n")

    artifacts = RunArtifacts(
        config=cfg, out_dir=out, graph=g, levels=levels, layers=layer_runs,
        partitions=partitions_ok, reconstructions=recons_ok,
        inter_edge_count=int(e.sum()) // 2, sumup=params,
        reconstruction=recon, stages=stage_list,
        phase_seconds=timings, files=files)

    with phase("report"):
        report_mod.emit_degree_csv(g, stage_list, emit("degree.csv"))
        if cfg.compare_sampling:
            rows = report_mod.sampling_comparison(g, stage_list[0],
                                                  seed=derive_seed(cfg.seed, 4))
            report_mod.emit_sampling_csv(rows, emit("sampling.csv"))
            artifacts.sampling_rows = rows
        report_mod.emit_report_json(artifacts, emit("report.json"))

    _write_manifest(artifacts, out / "manifest.json")
    log.info("run complete: %d layers, %d stages, output in %s",
             len(recons_ok), len(stage_list), out)
    return artifacts


def _write_manifest(artifacts: RunArtifacts, path: Path) -> None:
    _write_json(path, {
        "config": artifacts.config.to_dict(),
        "versions": {
            "gti": gti.__version__,
            "numpy": np.__version__,
            "python": sys.version.split()[0],
            "nn_backend": BACKEND,
        },
        "phases": [{"phase": k, "seconds": round(v, 3)}
                   for k, v in artifacts.phase_seconds.items()],
        "files": artifacts.files,
    })


def _write_json(path: Path, obj) -> None:
    with Path(path).open("w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


class _PhaseTimer:
    def __init__(self, name: str, sink: dict[str, float]):
        self.name = name
        self.sink = sink

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        self.sink[self.name] = self.sink.get(self.name, 0.0) + time.perf_counter() - self.t0
        return False

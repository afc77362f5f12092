"""Command line interface: generate, run, stages, sample, report."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from gti import graph as graph_mod
from gti import report as report_mod
from gti import sampling
from gti.graph import induced_subgraph, load_edge_list, save_edge_list
from gti.pipeline import PipelineError, RunConfig, run_pipeline

log = logging.getLogger(__name__)


def _parse_initiator(text: str):
    """Rows separated by ';', entries by ',': "0.9,0.5;0.5,0.3"."""
    return [[float(x) for x in row.split(",")] for row in text.split(";")]


def _parse_node_spec(text: str) -> list[int]:
    """Node list syntax: "0-19" or "0,5,7" or a mix "0-4,9"."""
    out: list[int] = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if "-" in chunk:
            lo, hi = chunk.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif chunk:
            out.append(int(chunk))
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gti",
                                     description="Graph topology interpolation pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic graph edge list")
    p.add_argument("--model", required=True, choices=["er", "ba", "ws", "kron"])
    p.add_argument("--nodes", type=int, help="node count (er/ba/ws)")
    p.add_argument("--p", type=float, help="edge probability (er)")
    p.add_argument("--m", type=int, help="edges per arriving node (ba)")
    p.add_argument("--k", type=int, help="ring degree, even (ws)")
    p.add_argument("--beta", type=float, help="rewiring probability (ws)")
    p.add_argument("--initiator", help="kron initiator, e.g. '0.9,0.5;0.5,0.3'")
    p.add_argument("--power", type=int, help="kron power")
    p.add_argument("--drop-isolated", action="store_true",
                   help="remove isolated nodes from kron output")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("run", help="run the full pipeline on an edge list")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int)
    p.add_argument("--max-stages", type=int)
    p.add_argument("--gan-iters", type=int)
    p.add_argument("--gan-lr", type=float)
    p.add_argument("--latent-dim", type=int)
    p.add_argument("--sumup-iters", type=int)
    p.add_argument("--sumup-lr", type=float)
    p.add_argument("--tolerance", type=float, help="partition balance tolerance")
    p.add_argument("--compare-sampling", action="store_true",
                   help="also emit the sampler comparison CSV")
    p.add_argument("--config", help="JSON file with run settings; flags override")

    p = sub.add_parser("stages", help="print the stage summary of a finished run")
    p.add_argument("--dir", required=True)

    p = sub.add_parser("sample", help="sample nodes with a baseline sampler")
    p.add_argument("--input", required=True)
    p.add_argument("--method", required=True, choices=["rw", "rj", "ff"])
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restart-prob", type=float, default=0.15)
    p.add_argument("--jump-prob", type=float, default=0.15)
    p.add_argument("--burn-prob", type=float, default=0.35)
    p.add_argument("--out", help="write the sampled subgraph edge list here")

    p = sub.add_parser("report", help="derive extra outputs from a finished run")
    p.add_argument("--dir", required=True)
    p.add_argument("--degree-csv", nargs="?", const="degree.csv",
                   help="write the degree CSV (default: degree.csv in the run dir)")
    p.add_argument("--dot", metavar="NODES",
                   help="write a DOT file of the induced subgraph, e.g. '0-19'")
    p.add_argument("--dot-out", help="DOT output path")
    p.add_argument("--dot-stage", type=int,
                   help="highlight nodes that are non-isolated in this stage")
    p.add_argument("--sampling-csv", nargs="?", const="sampling.csv",
                   help="write the sampler comparison CSV against stage 1")
    p.add_argument("--sample-seed", type=int, default=0)
    return parser


def cmd_generate(args) -> int:
    def need(names):
        missing = [n for n in names if getattr(args, n.replace("-", "_")) is None]
        if missing:
            raise ValueError(f"--{' --'.join(missing)} required for model {args.model}")

    if args.model == "er":
        need(["nodes", "p"])
        g = graph_mod.gen_er(args.nodes, args.p, args.seed)
    elif args.model == "ba":
        need(["nodes", "m"])
        g = graph_mod.gen_ba(args.nodes, args.m, args.seed)
    elif args.model == "ws":
        need(["nodes", "k", "beta"])
        g = graph_mod.gen_ws(args.nodes, args.k, args.beta, args.seed)
    else:
        need(["initiator", "power"])
        g = graph_mod.gen_kron(_parse_initiator(args.initiator), args.power,
                               args.seed, drop_isolated=args.drop_isolated)
    save_edge_list(g, args.out)
    print(f"wrote {g.node_count} nodes, {g.edge_count} edges to {args.out}")
    return 0


def cmd_run(args) -> int:
    settings: dict = {}
    if args.config:
        with open(args.config) as fh:
            settings.update(json.load(fh))
    flag_map = {
        "seed": "seed", "max_stages": "max_stages", "gan_iters": "gan_iterations",
        "gan_lr": "gan_learning_rate", "latent_dim": "latent_dim",
        "sumup_iters": "sumup_iterations", "sumup_lr": "sumup_learning_rate",
        "tolerance": "partition_tolerance",
    }
    for flag, key in flag_map.items():
        value = getattr(args, flag)
        if value is not None:
            settings[key] = value
    if args.compare_sampling:
        settings["compare_sampling"] = True
    settings.pop("input_path", None)
    settings.pop("generator", None)
    settings.pop("out_dir", None)
    cfg = RunConfig(out_dir=args.out, input_path=args.input, **settings)
    artifacts = run_pipeline(cfg)
    print(f"run complete: {len(artifacts.reconstructions)} layer(s), "
          f"{len(artifacts.stages)} stage(s), output in {artifacts.out_dir}")
    return 0


def cmd_stages(args) -> int:
    path = Path(args.dir) / "stages.csv"
    if not path.exists():
        raise FileNotFoundError(f"{path} not found; is {args.dir} a finished run?")
    with path.open() as fh:
        rows = list(csv.DictReader(fh))
    print(f"{'stage':>5} {'cut_value':>10} {'edges':>8} {'deleted_pct':>12}")
    for row in rows:
        print(f"{row['stage']:>5} {row['cut_value']:>10} {row['edge_count']:>8} "
              f"{float(row['deleted_edge_pct']):>12.2f}")
    return 0


def cmd_sample(args) -> int:
    g = load_edge_list(args.input)
    if args.method == "rw":
        res = sampling.random_walk_sample(g, args.nodes, args.restart_prob, args.seed)
    elif args.method == "rj":
        res = sampling.random_jump_sample(g, args.nodes, args.jump_prob, args.seed)
    else:
        res = sampling.forest_fire_sample(g, args.nodes, args.burn_prob, args.seed)
    print(f"{res.method}: {res.subgraph.node_count} nodes, "
          f"{res.subgraph.edge_count} edges"
          + (" (partial coverage)" if res.partial else ""))
    if args.out:
        save_edge_list(res.subgraph, args.out)
        nodes_path = Path(args.out).with_suffix(Path(args.out).suffix + ".nodes")
        with nodes_path.open("w") as fh:
            fh.write("# original node ids in visit order\n")
            for node in res.nodes:
                fh.write(f"{node}\n")
        print(f"wrote {args.out} and {nodes_path}")
    return 0


def _stage_from_file(path, index: int):
    """Rebuild a stage object (adjacency only) from a stage edge list."""
    from gti.stages import Stage
    sg = load_edge_list(path)
    return Stage(index=index, cut_value=0.0,
                 adjacency=sg.adjacency_matrix().astype("uint8"),
                 edge_count=sg.edge_count, deleted_edge_pct=0.0)


def cmd_report(args) -> int:
    run_dir = Path(args.dir)
    g = load_edge_list(run_dir / "graph.txt")
    did_anything = False

    stage_files = sorted(run_dir.glob("stage_*.txt"),
                         key=lambda p: int(p.stem.split("_")[1]))

    if args.degree_csv is not None:
        stages = [_stage_from_file(path, i)
                  for i, path in enumerate(stage_files, start=1)]
        out = run_dir / args.degree_csv
        report_mod.emit_degree_csv(g, stages, out)
        print(f"wrote {out}")
        did_anything = True

    if args.dot is not None:
        nodes = _parse_node_spec(args.dot)
        sub = induced_subgraph(g, nodes)
        highlight = None
        if args.dot_stage is not None:
            stage_graph = load_edge_list(run_dir / f"stage_{args.dot_stage}.txt")
            lively = {i for i, d in enumerate(stage_graph.degrees()) if d > 0}
            highlight = [i for i, orig in enumerate(nodes) if orig in lively]
        out = Path(args.dot_out) if args.dot_out else run_dir / "subgraph.dot"
        report_mod.emit_dot(sub, out, highlight=highlight, labels=nodes)
        print(f"wrote {out}")
        did_anything = True

    if args.sampling_csv is not None:
        if not stage_files:
            raise FileNotFoundError(f"no stage files in {run_dir}")
        from gti.stages import Stage
        sg = load_edge_list(stage_files[0])
        adj = sg.adjacency_matrix().astype("uint8")
        stage1 = Stage(index=1, cut_value=0.0, adjacency=adj,
                       edge_count=sg.edge_count, deleted_edge_pct=0.0)
        rows = report_mod.sampling_comparison(g, stage1, seed=args.sample_seed)
        out = run_dir / args.sampling_csv
        report_mod.emit_sampling_csv(rows, out)
        print(f"wrote {out}")
        did_anything = True

    if not did_anything:
        print("nothing requested; pass --degree-csv, --dot or --sampling-csv")
    return 0


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    handlers = {"generate": cmd_generate, "run": cmd_run, "stages": cmd_stages,
                "sample": cmd_sample, "report": cmd_report}
    try:
        return handlers[args.command](args)
    except PipelineError as exc:
        print(f"error {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError, RuntimeError) as exc:
        print(f"error [{args.command}] {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())

"""Command-line entry point: ``pathdecomp <command> ...``.

Exit codes: 0 success, 1 a verification verdict of false, 2 precondition
failure, 3 budget exhaustion, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path as FsPath

from .cones import build_cone_system, resample_until_clear
from .errors import DecompositionError
from .graph import MultiGraph, dump_graph, load_graph
from .pipeline import Decomposition, PipelineConfig, decompose_24, decompose_eulerian4, euler_tour_no_short_cycle
from .verify import (brute_force_decomposable, gen_circulant, gen_fig1_gadget, gen_random_multigraph,
                     gen_random_regular, gen_two_edge_connected, verify_decomposition)


def _read_graph(path: str) -> MultiGraph:
    text = sys.stdin.read() if path == "-" else FsPath(path).read_text()
    return load_graph(text)


def _config(args) -> PipelineConfig:
    data = {}
    if getattr(args, "config", None):
        data = json.loads(FsPath(args.config).read_text())
    if args.ell is not None:
        data["ell"] = args.ell
    if args.seed is not None:
        data["seed"] = args.seed
    return PipelineConfig.from_dict(data)


def _write(text: str, dest: str | None) -> None:
    if dest in (None, "-"):
        sys.stdout.write(text)
    else:
        FsPath(dest).write_text(text)


def _parse_offsets(text: str) -> list[int]:
    out: list[int] = []
    for part in text.split(","):
        if ".." in part:
            a, b = part.split("..")
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return out


def cmd_decompose(args) -> int:
    G = _read_graph(args.graph)
    cfg = _config(args)
    run = decompose_eulerian4 if args.eulerian else decompose_24
    D: Decomposition = run(G, cfg)
    _write(D.to_json(G) + "\n", args.out)
    if args.dot:
        FsPath(args.dot).write_text(D.to_dot(G))
    if args.out not in (None, "-"):
        print(f"{len(D.paths)} paths of length {D.ell}, leftover "
              f"{0 if D.leftover is None else len(D.leftover)}", file=sys.stderr)
    return 0


def cmd_tour(args) -> int:
    G = _read_graph(args.graph)
    cfg = _config(args)
    tour = euler_tour_no_short_cycle(G, cfg.ell, cfg)
    verts = [G.labels[v] for v in tour.vertices()]
    _write(json.dumps({"n": G.n, "m": G.m, "ell": cfg.ell, "seed": cfg.seed, "tour": verts}) + "\n", args.out)
    return 0


def cmd_verify(args) -> int:
    G = _read_graph(args.graph)
    report = json.loads(FsPath(args.report).read_text())
    index = {lab: i for i, lab in enumerate(G.labels)}
    try:
        data = {"paths": [[index[x] for x in p] for p in report["paths"]],
                "leftover": [index[x] for x in report["leftover"]] if report.get("leftover") else None}
    except KeyError as exc:
        print(json.dumps({"verdict": False, "violations": [["unknown vertex", exc.args[0]]]}))
        return 1
    ell = args.ell if args.ell is not None else report["ell"]
    res = verify_decomposition(G, data, ell)
    print(json.dumps({"verdict": res.verdict, "violations": [[t, str(loc)] for t, loc in res.violations[:50]],
                      "counters": res.counters}))
    return 0 if res.verdict else 1


def cmd_oracle(args) -> int:
    G = _read_graph(args.graph)
    res = brute_force_decomposable(G, args.ell, limit=args.limit, time_limit=args.time_limit,
                                   checkpoint=args.checkpoint)
    out = {"verdict": res.verdict, "nodes": res.nodes, "seconds": round(res.seconds, 3),
           "witness": None if res.witness is None else [[G.labels[v] for v in verts] for verts, _ in res.witness]}
    _write(json.dumps(out) + "\n", args.out)
    return 0


def cmd_generate(args) -> int:
    fam = args.family
    if fam == "circulant":
        G = gen_circulant(args.n, _parse_offsets(args.offsets))
    elif fam == "regular":
        G = gen_random_regular(args.n, args.d, seed=args.seed)
    elif fam == "multigraph":
        G = gen_random_multigraph(args.n, args.m, seed=args.seed)
    elif fam == "2ec":
        G = gen_two_edge_connected(args.n, seed=args.seed, extra=args.extra)
    else:
        G = gen_fig1_gadget()
    _write(dump_graph(G), args.out)
    return 0


def cmd_stats(args) -> int:
    G = _read_graph(args.graph)
    cfg = _config(args)
    cs = build_cone_system(G, cfg.ell, cfg.c, cfg.b, seed=cfg.seed)
    _, _, report = resample_until_clear(cs, cfg.cone_budget, seed=cfg.seed, accept_best=True)
    handle = sys.stdout if args.out in (None, "-") else open(args.out, "w", newline="")
    try:
        csv.writer(handle).writerows(report.csv_rows())
    finally:
        if handle is not sys.stdout:
            handle.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pathdecomp", description="Decompose graphs into paths of a fixed length.")
    p.add_argument("-v", "--verbose", action="count", default=0, help="-v for progress, -vv for reduction steps")
    sub = p.add_subparsers(dest="command", required=True)

    def pipeline_flags(q):
        q.add_argument("graph", help="edge-list file ('-' for stdin)")
        q.add_argument("--ell", type=int)
        q.add_argument("--seed", type=int)
        q.add_argument("--config", help="JSON file with configuration overrides")
        q.add_argument("--out", help="output file (default stdout)")

    q = sub.add_parser("decompose", help="decompose into ell-paths and write a JSON report")
    pipeline_flags(q)
    q.add_argument("--eulerian", action="store_true", help="use the eulerian (4-edge-connected) driver")
    q.add_argument("--dot", help="also write a DOT drawing of the paths")
    q.set_defaults(func=cmd_decompose)

    q = sub.add_parser("tour", help="eulerian tour with no closed subwalk of length at most ell")
    pipeline_flags(q)
    q.set_defaults(func=cmd_tour)

    q = sub.add_parser("verify", help="check a JSON report against a graph")
    q.add_argument("graph")
    q.add_argument("report")
    q.add_argument("--ell", type=int)
    q.set_defaults(func=cmd_verify)

    q = sub.add_parser("oracle", help="exact search for a decomposition into ell-paths")
    q.add_argument("graph")
    q.add_argument("--ell", type=int, required=True)
    q.add_argument("--limit", type=int, default=128, help="maximum number of edges")
    q.add_argument("--time-limit", type=float, help="seconds before giving up (exit 3)")
    q.add_argument("--checkpoint", help="file holding the failure memo, for resuming")
    q.add_argument("--out")
    q.set_defaults(func=cmd_oracle)

    q = sub.add_parser("generate", help="write a test graph in edge-list format")
    q.add_argument("family", choices=["circulant", "regular", "multigraph", "2ec", "fig1"])
    q.add_argument("--n", type=int)
    q.add_argument("--offsets", default="1", help="e.g. 1..13 or 1,3,7")
    q.add_argument("--d", type=int)
    q.add_argument("--m", type=int)
    q.add_argument("--extra", type=int, default=0)
    q.add_argument("--seed", type=int)
    q.add_argument("--out")
    q.set_defaults(func=cmd_generate)

    q = sub.add_parser("stats", help="per-cone CSV of one sampling run")
    pipeline_flags(q)
    q.set_defaults(func=cmd_stats)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except DecompositionError as exc:
        detail = {k: v for k, v in exc.details.items() if isinstance(v, (int, float, str, bool, list, dict))}
        print(json.dumps({"error": type(exc).__name__, "stage": exc.stage, "message": exc.message,
                          "details": detail}, default=str), file=sys.stderr)
        return exc.exit_code
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

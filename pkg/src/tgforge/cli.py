"""Command-line front door: layout, validate, filter, metrics, serve.

Contract for scripting: standard output carries exactly one JSON line
per command; everything human-readable (diagnostics, warnings, log
output) goes to standard error. Exit codes: 0 success, 1 input or
validation error, 2 internal failure. Output files are written to a
temporary sibling and renamed into place, so a failing command never
leaves a partial or clobbered file behind. Set TGFORGE_LOG to one of
error / warn / info / debug to adjust logging.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import socket
import sys
import tempfile

from .errors import InputError, IntegrityError, ParseError, TGForgeError
from .graph_model import parse_graph, serialize_graph, validate
from .graph_ops import (
    distance_cutoff_filter,
    filter_by_kinds,
    intersect_visible,
    neighborhood_subgraph,
    reachable_subgraph,
    subgraph,
)
from .layout_engine import (
    LayoutParams,
    layout_metrics,
    params_from_json_dict,
    parse_layout,
    restrict_layout,
    run_layout,
    serialize_layout,
)

log = logging.getLogger("tgforge")

_LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING,
               "info": logging.INFO, "debug": logging.DEBUG}


def _emit(doc: dict):
    print(json.dumps(doc, separators=(",", ":")), flush=True)


def _diag(message: str):
    print(message, file=sys.stderr, flush=True)


def _atomic_write(path: str, data: bytes):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tgforge-", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _load_graph(path: str, allow_self_loops: bool = False):
    with open(path, "rb") as fh:
        return parse_graph(fh, allow_self_loops=allow_self_loops)


def _load_layout(path: str):
    with open(path, "rb") as fh:
        return parse_layout(fh)


def _add_param_flags(parser: argparse.ArgumentParser):
    d = LayoutParams()
    group = parser.add_argument_group("layout parameters")
    group.add_argument("--edge-length", type=float, default=d.ideal_edge_length,
                       help="ideal edge length L in world units")
    group.add_argument("--k-repel", type=float, default=d.k_repel,
                       help="repulsion constant")
    group.add_argument("--k-attract", type=float, default=d.k_attract,
                       help="attraction constant")
    group.add_argument("--k-hierarchy", type=float, default=d.k_hierarchy,
                       help="vertical push per hierarchy-bearing edge")
    group.add_argument("--theta", type=float, default=d.theta,
                       help="Barnes-Hut opening criterion; 0 = exact")
    group.add_argument("--iterations", type=int, default=d.max_iterations,
                       help="maximum number of iterations")
    group.add_argument("--eps", type=float, default=d.convergence_eps,
                       help="convergence threshold in units of L")
    group.add_argument("--temperature", type=float, default=d.initial_temperature,
                       help="initial temperature as a fraction of the placement radius")
    group.add_argument("--cooling", type=float, default=d.cooling_factor,
                       help="temperature decay per iteration")
    group.add_argument("--seed", type=int, default=d.seed,
                       help="placement seed (same seed, same layout)")
    group.add_argument("--min-distance", type=float, default=None,
                       help="pairwise distance clamp (default 1e-3 * L)")
    group.add_argument("--params", metavar="FILE", default=None,
                       help="JSON file of parameters; overrides individual flags")
    group.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                       help="worker-thread bound; results never depend on it")


def _params_from_args(args) -> LayoutParams:
    params = LayoutParams(
        ideal_edge_length=args.edge_length,
        k_repel=args.k_repel,
        k_attract=args.k_attract,
        k_hierarchy=args.k_hierarchy,
        theta=args.theta,
        max_iterations=args.iterations,
        convergence_eps=args.eps,
        initial_temperature=args.temperature,
        cooling_factor=args.cooling,
        seed=args.seed,
        min_distance=args.min_distance,
    )
    if args.params:
        with open(args.params, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        if not isinstance(doc, dict):
            raise InputError("--params file must contain a JSON object")
        params = params_from_json_dict(doc, base=params)
    return params


def _report_warnings(report):
    for finding in report.warnings:
        _diag(f"warning [{finding.code}]: {finding.message}")


# ---------------------------------------------------------------------------
# Subcommands


def cmd_layout(args) -> int:
    graph = _load_graph(args.input, args.allow_self_loops)
    params = _params_from_args(args)
    _report_warnings(validate(graph))
    layout = run_layout(graph, params)
    metrics = layout_metrics(graph, layout)
    _atomic_write(args.output, serialize_layout(layout, params))
    _emit({
        "nodes": len(graph.nodes),
        "edges": len(graph.edges),
        "iterations": layout.iterations_run,
        "converged": layout.converged,
        "meanEdgeLength": metrics.mean_edge_length,
        "upwardFraction": metrics.upward_fraction,
        "upwardVacuous": metrics.upward_vacuous,
        "output": args.output,
    })
    return 0


def cmd_validate(args) -> int:
    graph = _load_graph(args.input, args.allow_self_loops)
    report = validate(graph)
    _report_warnings(report)
    _emit(report.to_json_dict())
    return 0 if report.ok else 1


def cmd_filter(args) -> int:
    graph = _load_graph(args.input, args.allow_self_loops)
    kinds = args.kinds.split(",") if args.kinds else None
    layout = None
    if args.layout_in:
        layout, _ = _load_layout(args.layout_in)
        if args.layout_out is None:
            raise InputError("--layout-out is required when --layout-in is given")

    parts = [filter_by_kinds(graph, kinds if kinds is not None else graph.kinds)]
    if args.reachable_from:
        parts.append(reachable_subgraph(graph, args.reachable_from, False, kinds))
    if args.coreachable_from:
        parts.append(reachable_subgraph(graph, args.coreachable_from, True, kinds))
    if args.neighborhood:
        centers = args.neighborhood.split(",")
        parts.append(neighborhood_subgraph(graph, centers, args.k, kinds))
    if args.cutoff_radius is not None:
        if layout is None:
            raise InputError("--cutoff-radius requires --layout-in")
        try:
            center = [float(v) for v in args.cutoff_center.split(",")]
        except (AttributeError, ValueError):
            raise InputError("--cutoff-center must be x,y,z") from None
        if len(center) != 3:
            raise InputError("--cutoff-center must be x,y,z")
        parts.append(distance_cutoff_filter(graph, layout, center, args.cutoff_radius))

    visible = intersect_visible(graph, *parts)
    _atomic_write(args.output, serialize_graph(subgraph(graph, visible)))
    result = {
        "visibleNodes": len(visible.visible_nodes),
        "visibleEdges": len(visible.visible_edges),
        "output": args.output,
    }
    if layout is not None:
        _atomic_write(args.layout_out,
                      serialize_layout(restrict_layout(layout, visible.visible_nodes)))
        result["layoutOutput"] = args.layout_out
    _emit(result)
    return 0


def cmd_metrics(args) -> int:
    graph = _load_graph(args.input, args.allow_self_loops)
    layout, _ = _load_layout(args.layout)
    metrics = layout_metrics(graph, layout)
    doc = metrics.to_json_dict()
    doc["nodes"] = len(graph.nodes)
    doc["edges"] = len(graph.edges)
    _emit(doc)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    graph = _load_graph(args.input, args.allow_self_loops)
    initial_layout = None
    if args.layout:
        initial_layout, _ = _load_layout(args.layout)
        for node in graph.nodes:
            if node.id not in initial_layout.positions:
                raise InputError(
                    f"--layout file has no position for node {node.id!r}")
    app = create_app(graph, static_dir=args.static, initial_layout=initial_layout)

    # fail fast with exit 1 if the port is taken, before uvicorn owns it
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((args.host, args.port))
    except OSError as exc:
        raise InputError(f"cannot bind {args.host}:{args.port}: {exc}") from None
    finally:
        probe.close()

    _emit({"serving": args.input, "host": args.host, "port": args.port,
           "nodes": len(graph.nodes), "edges": len(graph.edges)})
    uv_level = {"error": "error", "warn": "warning", "info": "info",
                "debug": "debug"}.get(os.environ.get("TGFORGE_LOG", "warn"),
                                      "warning")
    uvicorn.run(app, host=args.host, port=args.port, log_level=uv_level)
    return 0


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tgforge",
        description="Hierarchical force-directed 3D layout and exploration "
                    "of typed theory graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("-i", "--input", required=True, help="graph JSON file")
        p.add_argument("--allow-self-loops", action="store_true",
                       help="accept self-loop edges instead of rejecting them")
        p.formatter_class = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("layout", help="compute a 3D layout",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    common(p)
    p.add_argument("-o", "--output", required=True, help="layout JSON output file")
    _add_param_flags(p)
    p.set_defaults(func=cmd_layout)

    p = sub.add_parser("validate", help="check graph integrity and hierarchy acyclicity",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("filter", help="write the visible subgraph for a filter",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    common(p)
    p.add_argument("-o", "--output", required=True, help="filtered graph output file")
    p.add_argument("--kinds", default=None,
                   help="comma-separated kinds to keep (default: all)")
    p.add_argument("--reachable-from", default=None, metavar="NODE",
                   help="keep the subgraph reachable from this node")
    p.add_argument("--coreachable-from", default=None, metavar="NODE",
                   help="keep the subgraph that reaches this node")
    p.add_argument("--neighborhood", default=None, metavar="NODES",
                   help="comma-separated centers for a k-hop neighborhood")
    p.add_argument("--k", type=int, default=1, help="neighborhood radius")
    p.add_argument("--cutoff-center", default=None, metavar="X,Y,Z",
                   help="center for the spatial cutoff")
    p.add_argument("--cutoff-radius", type=float, default=None,
                   help="radius for the spatial cutoff (needs --layout-in)")
    p.add_argument("--layout-in", default=None, help="layout file to restrict")
    p.add_argument("--layout-out", default=None,
                   help="where to write the restricted layout")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("metrics", help="measure a layout against its graph",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    common(p)
    p.add_argument("-l", "--layout", required=True, help="layout JSON file")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("serve", help="serve the HTTP API and web viewer",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    common(p)
    p.add_argument("--host", default="127.0.0.1", help="bind address")
    p.add_argument("--port", type=int, default=8077, help="bind port")
    p.add_argument("--static", default=None,
                   help="viewer asset directory (default: bundled assets)")
    p.add_argument("--layout", default=None,
                   help="preload a layout file into the session (enables "
                        "distance-cutoff filters before any job runs)")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    level = _LOG_LEVELS.get(os.environ.get("TGFORGE_LOG", "warn"), logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, IntegrityError, InputError) as exc:
        _diag(f"error: {exc}")
        _emit({"error": {"code": exc.code, "message": str(exc)}})
        return 1
    except OSError as exc:
        _diag(f"error: {exc}")
        _emit({"error": {"code": "io", "message": str(exc)}})
        return 1
    except TGForgeError as exc:
        log.exception("internal error")
        _emit({"error": {"code": exc.code, "message": str(exc)}})
        return 2
    except Exception as exc:  # noqa: BLE001 - the CLI boundary
        log.exception("internal error")
        _emit({"error": {"code": "internal", "message": str(exc)}})
        return 2


if __name__ == "__main__":
    sys.exit(main())

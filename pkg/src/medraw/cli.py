"""Command-line pipeline: generate -> layout -> schedule -> render / verify / stats.

Exit codes: 0 ok, 1 invalid input, 2 verification failed, 3 I/O error.
Failures print one ``medraw: error code=<kind> message=<text>`` line to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import exporter, graphgen, scheduler
from .verifier import verify_no_crossings

EXIT_OK, EXIT_VALIDATION, EXIT_VERIFY, EXIT_IO = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(EXIT_VALIDATION, message)


def _read(path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc.strerror}") from None


def _write(path, data: bytes):
    if path in (None, "-"):
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc.strerror}") from None


def cmd_generate(args):
    g = graphgen.generate_ba(args.nodes, args.m, args.seed)
    _write(args.out, graphgen.save_graph(g))


def cmd_layout(args):
    g = graphgen.load_graph(_read(args.input))
    layout = graphgen.fr_layout(g, args.width, args.height, args.iterations, args.seed)
    _write(args.out, graphgen.save_layout(layout))


def params_from_args(args) -> scheduler.MorphParams:
    if args.speed is not None:
        speed = args.speed
    else:
        speed = scheduler.visual_angle_speed(args.angle, args.distance, args.density)
    return scheduler.MorphParams(args.delta, args.eta, speed, args.min_travel_ms / 1000.0)


def cmd_schedule(args):
    layout = graphgen.load_layout(_read(args.input))
    params = params_from_args(args)
    sched = scheduler.build_schedule(layout, params, workers=args.workers, drop_unreachable=args.drop_unreachable)
    _write(args.out, exporter.export_timeline_json(layout, sched))


def cmd_render(args):
    layout = graphgen.load_layout(_read(args.layout))
    style = exporter.Style(highlight=frozenset(args.highlight or ()))
    if args.format == "svg-static-ced":
        data = exporter.export_static_svg(layout, None, style)
    else:
        sched = exporter.load_timeline(_read(args.timeline), layout) if args.timeline else None
        if args.format == "svg-static-ped":
            delta = args.delta if args.delta is not None else (sched.params.delta if sched else 0.25)
            data = exporter.export_static_svg(layout, delta, style)
        else:
            if sched is None:
                raise CliError(EXIT_VALIDATION, "svg-animated needs a timeline")
            data = exporter.export_animated_svg(layout, sched, style)
    _write(args.out, data)


def cmd_verify(args):
    layout = graphgen.load_layout(_read(args.layout))
    sched = exporter.load_timeline(_read(args.timeline), layout)
    report = verify_no_crossings(layout, sched, args.dt_ms / 1000.0)
    _write(None, report.to_json())
    return EXIT_OK if report.ok else EXIT_VERIFY


def stats(layout_or_graph, sched=None) -> dict:
    if isinstance(layout_or_graph, graphgen.Graph):
        g = layout_or_graph
        return {"nodes": g.node_count, "edges": len(g.edges)}
    layout = layout_or_graph
    out = {"nodes": layout.graph.node_count, "edges": layout.n_edges}
    if sched is None:
        return out
    params = sched.params
    catalog = scheduler.crossing_catalog(layout, params)
    pairs = [x for x in catalog if x.e < x.c]
    has_sched = {x.e for x in catalog if x.schedulable}
    has_any = {x.e for x in catalog}
    groups = []
    for g, motions in sched.groups:
        span = scheduler.makespan(motions)
        seq = scheduler.sequential_makespan(motions)
        groups.append(
            {
                "size": len(g.edges),
                "makespan_s": span,
                "sequential_s": seq,
                "ratio": span / seq if seq > 0 else 1.0,
            }
        )
    total_seq = sum(x["sequential_s"] for x in groups)
    out.update(
        {
            "period_s": sched.period,
            "groups": len(groups),
            "group_sizes": sorted((x["size"] for x in groups), reverse=True),
            "schedulable_crossings": sum(x.schedulable for x in pairs),
            "inevitable_crossings": sum(not x.schedulable for x in pairs),
            "group_makespans": groups,
            "sequential_baseline_s": total_seq,
            "period_vs_sequential": sched.period / total_seq if total_seq > 0 else 1.0,
            "non_morphing_candidates": {
                "singleton_group_edges": sum(1 for x in groups if x["size"] == 1),
                "only_inevitable_crossing_edges": len(has_any - has_sched),
                "crossing_free_edges": layout.n_edges - len(has_any),
            },
        }
    )
    return out


def cmd_stats(args):
    data = _read(args.layout)
    doc = graphgen._parse_json(data)
    if isinstance(doc, dict) and "nodes" not in doc:
        target = graphgen.load_graph(data)
        sched = None
    else:
        target = graphgen.load_layout(data)
        sched = exporter.load_timeline(_read(args.timeline), target) if args.timeline else None
    _write(None, (json.dumps(stats(target, sched), indent=2) + "\n").encode("utf-8"))


def build_parser():
    p = _Parser(prog="medraw", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(func=func)
        sp.add_argument("--config", help="JSON file whose keys supply defaults for this command's flags")
        sp.add_argument("-o", "--out", help="output path (default: stdout)")
        return sp

    sp = add("generate", cmd_generate, "Barabasi-Albert graph")
    sp.add_argument("--nodes", type=int, default=50)
    sp.add_argument("--m", type=int, default=3)
    sp.add_argument("--seed", type=int, default=1)

    sp = add("layout", cmd_layout, "Fruchterman-Reingold layout of a graph file")
    sp.add_argument("input")
    sp.add_argument("--width", type=float, default=1000.0)
    sp.add_argument("--height", type=float, default=800.0)
    sp.add_argument("--iterations", type=int, default=graphgen.FR_ITERATIONS)
    sp.add_argument("--seed", type=int, default=1)

    sp = add("schedule", cmd_schedule, "crossing-free morphing timeline for a layout")
    sp.add_argument("input")
    sp.add_argument("--delta", type=float, default=scheduler.DEFAULT_DELTA)
    sp.add_argument("--eta", type=float, default=scheduler.DEFAULT_ETA)
    sp.add_argument("--speed", type=float, help="tip speed in drawing units/s; overrides the angle triple")
    sp.add_argument("--angle", type=float, default=10.0, help="visual angle speed, degrees/s")
    sp.add_argument("--distance", type=float, default=40.0, help="viewing distance, cm")
    sp.add_argument("--density", type=float, default=scheduler.DEFAULT_PX_PER_CM, help="screen px per cm")
    sp.add_argument("--min-travel-ms", type=float, default=scheduler.DEFAULT_MIN_TRAVEL_S * 1000.0)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--drop-unreachable", action="store_true", help="unreachable crossings do not join groups")

    sp = add("render", cmd_render, "SVG drawing")
    sp.add_argument("layout")
    sp.add_argument("timeline", nargs="?")
    sp.add_argument("--format", choices=exporter.FORMATS, default="svg-animated")
    sp.add_argument("--delta", type=float, help="stub ratio for svg-static-ped")
    sp.add_argument("--highlight", type=int, nargs="*", help="node ids drawn in the highlight colour")

    sp = add("verify", cmd_verify, "check a timeline for stub crossings")
    sp.add_argument("layout")
    sp.add_argument("timeline")
    sp.add_argument("--dt-ms", type=float, default=1.0)

    sp = add("stats", cmd_stats, "summary of a graph, layout, or layout + timeline")
    sp.add_argument("layout")
    sp.add_argument("timeline", nargs="?")
    return p, sub


def _apply_config(parser, sub, argv):
    args = parser.parse_args(argv)
    if not args.config:
        return args
    try:
        cfg = json.loads(_read(args.config))
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_VALIDATION, f"{args.config} line {exc.lineno}: {exc.msg}") from None
    if not isinstance(cfg, dict):
        raise CliError(EXIT_VALIDATION, f"{args.config}: expected a JSON object")
    sp = sub.choices[args.command]
    known = {a.dest for a in sp._actions}
    unknown = sorted(k.replace("-", "_") for k in cfg if k.replace("-", "_") not in known)
    if unknown:
        raise CliError(EXIT_VALIDATION, f"{args.config}: unknown keys {unknown}")
    sp.set_defaults(**{k.replace("-", "_"): v for k, v in cfg.items()})
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser, sub = build_parser()
    try:
        args = _apply_config(parser, sub, argv)
        rc = args.func(args)
        return rc or EXIT_OK
    except CliError as exc:
        code, msg = exc.code, str(exc)
    except graphgen.LayoutError as exc:
        code, msg = EXIT_VALIDATION, str(exc)
    except ValueError as exc:
        code, msg = EXIT_VALIDATION, str(exc)
    kind = {EXIT_VALIDATION: "validation", EXIT_VERIFY: "verification", EXIT_IO: "io"}[code]
    msg = " ".join(msg.split())
    print(f"medraw: error code={kind} message={msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())

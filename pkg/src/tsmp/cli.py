"""Command-line entry point: ``tsmp {ingest,generate,validate,query,bench}``.

Structured output goes to stdout, diagnostics to stderr.
Exit codes: 0 success, 2 bad input, 3 no route, 4 data error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .bench import MODES, BenchConfig, run_bench, write_report
from .fixtures import example_graph
from .graph import GraphError, UnknownVertex, validate
from .gtfs import IngestError, load_feed_graph
from .planner import DEFAULT_POI_CAP, NoRoute, TsmpQuery
from .planner import plan_ea_star, plan_naive, plan_ordered
from .routedoc import parse_clock, route_document
from .storage import GraphFormatError, load_graph, save_graph
from .synthetic import SyntheticSpec, generate_synthetic

EXIT_OK, EXIT_BAD_INPUT, EXIT_NO_ROUTE, EXIT_DATA = 0, 2, 3, 4

log = logging.getLogger("tsmp")


class BadInput(Exception):
    pass


def _emit(obj):
    json.dump(obj, sys.stdout, indent=1)
    sys.stdout.write("\n")


def _load(path):
    try:
        return load_graph(path)
    except FileNotFoundError:
        raise BadInput(f"graph file not found: {path}") from None


def _int_list(s: str) -> list[int]:
    out = []
    for part in s.split(","):
        part = part.strip()
        if "-" in part:
            a, b = part.split("-", 1)
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    return out


def _summary(g):
    return {"vertices": len(g.vertices), "edges": len(g.edges),
            "schedule_entries": g.schedule_entry_count(), "v_max": g.v_max}


def cmd_ingest(args):
    g = load_feed_graph(args.feed_dir, set(args.service) if args.service else None)
    save_graph(g, args.out)
    _emit({**_summary(g), "out": str(args.out)})
    return EXIT_OK


def cmd_generate(args):
    if args.example:
        g = example_graph()
    else:
        spec = SyntheticSpec(
            vertex_count=args.vertices, line_count=args.lines,
            stops_per_line=args.stops_per_line, headway=args.headway,
            service_span=(parse_clock(args.span_start), parse_clock(args.span_end)),
            seed=args.seed)
        g = generate_synthetic(spec)
    save_graph(g, args.out)
    _emit({**_summary(g), "out": str(args.out)})
    return EXIT_OK


def cmd_validate(args):
    g = _load(args.graph)
    problems = validate(g)
    _emit({**_summary(g), "violations": [str(v) for v in problems]})
    return EXIT_DATA if problems else EXIT_OK


def _parse_dwells(specs, pois):
    dwell = {}
    for s in specs or ():
        if "=" in s:
            stop, t = s.split("=", 1)
            dwell[stop] = parse_clock(t)
        else:
            t = parse_clock(s)
            dwell.update({p: t for p in pois})
    return dwell


def cmd_query(args):
    pois = [p for chunk in args.poi for p in chunk.split(",") if p]
    try:
        depart = parse_clock(args.depart)
        dwell = _parse_dwells(args.dwell, pois)
    except ValueError as exc:
        raise BadInput(str(exc)) from None
    g = _load(args.graph)
    query = TsmpQuery(args.origin, depart, tuple(pois), dwell)
    plan = {"ea_star": plan_ea_star, "naive": plan_naive, "ordered": plan_ordered}[args.mode]
    result = plan(g, query, cap=args.cap)
    _emit(route_document(g, query, result, args.mode))
    return EXIT_OK


def cmd_bench(args):
    cfg = BenchConfig(
        graph_path=args.graph, trials=args.trials, seed=args.seed, modes=args.modes,
        depart=parse_clock(args.depart), dwell=parse_clock(args.dwell), cap=args.cap,
        workers=1 if args.sequential else args.workers)
    if args.scales:
        cfg.scales = _int_list(args.scales)
    if args.pois:
        cfg.poi_counts = _int_list(args.pois)
    graph = _load(args.graph)
    if not args.scales:
        cfg.scales = [s for s in cfg.scales if s <= len(graph.vertices)] or [len(graph.vertices)]
    report = run_bench(cfg, graph)
    if args.out:
        write_report(report, args.out, args.raw_log)
    if args.format == "json":
        _emit(report.to_dict(raw=args.include_trials))
    else:
        print(report.table())
        for note in report.notes:
            print(f"# {note}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tsmp", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ingest", help="build a graph from a GTFS static feed directory")
    s.add_argument("feed_dir")
    s.add_argument("-o", "--out", required=True)
    s.add_argument("--service", action="append", metavar="SERVICE_ID",
                   help="keep trips with this service_id (repeatable; default all)")
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("generate", help="write a seeded synthetic graph")
    s.add_argument("-o", "--out", required=True)
    s.add_argument("--vertices", type=int, default=300)
    s.add_argument("--lines", type=int, default=30)
    s.add_argument("--stops-per-line", type=int, default=20)
    s.add_argument("--headway", type=int, default=300)
    s.add_argument("--span-start", default="06:00")
    s.add_argument("--span-end", default="22:00")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--example", action="store_true",
                   help="write the five-stop reference network instead")
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("validate", help="check graph invariants")
    s.add_argument("graph")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("query", help="answer one multi-POI query")
    s.add_argument("graph")
    s.add_argument("--origin", required=True)
    s.add_argument("--depart", required=True, help="HH:MM[:SS] or seconds")
    s.add_argument("--poi", action="append", required=True,
                   help="POI stop id (repeatable or comma-separated)")
    s.add_argument("--dwell", action="append",
                   help="STOP=TIME for one POI, or TIME for every POI")
    s.add_argument("--mode", choices=("ea_star", "naive", "ordered"), default="ea_star")
    s.add_argument("--cap", type=int, default=DEFAULT_POI_CAP)
    s.set_defaults(func=cmd_query)

    s = sub.add_parser("bench", help="compare planners over seeded random queries")
    s.add_argument("graph")
    s.add_argument("--scales", help="vertex counts, e.g. 882,3616 (default: 882,3616,12550 "
                                    "where they fit the graph)")
    s.add_argument("--pois", help="POI counts, e.g. 1-6")
    s.add_argument("--trials", type=int, default=50)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--modes", nargs="+", choices=MODES, default=list(MODES))
    s.add_argument("--depart", default="08:00")
    s.add_argument("--dwell", default="0")
    s.add_argument("--cap", type=int, default=DEFAULT_POI_CAP)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--sequential", action="store_true", help="force serial trials")
    s.add_argument("--out", help="write the JSON report here")
    s.add_argument("--raw-log", help="write per-trial JSON lines here (needs --out)")
    s.add_argument("--include-trials", action="store_true",
                   help="embed per-trial rows in JSON output")
    s.add_argument("--format", choices=("table", "json"), default="table")
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except NoRoute as exc:
        print(f"no route: {exc}", file=sys.stderr)
        return EXIT_NO_ROUTE
    except (BadInput, UnknownVertex, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (IngestError, GraphFormatError, GraphError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

"""Benchmark harness: query time and cost per (graph scale, POI count, mode).

Modes:
  naive             all n! orders, dsrs legs
  ea_star           bound-ranked orders with cutoff, astar legs
  ea_star_no_prune  bound-ranked orders, astar legs, every order evaluated
  ordered           POIs visited in the sampled order (astar legs)

Each trial samples an origin and n distinct POIs reachable from it at the
departure time. POI sets are seeded random draws, not hand-picked landmarks.
Only the planner call is timed; graph loading and subgraph extraction are not.
"""
from __future__ import annotations

import json
import logging
import random
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .graph import DmeGraph, GraphError, subgraph_by_scale
from .planner import (DEFAULT_POI_CAP, NoRoute, TsmpQuery, plan_ea_star, plan_naive,
                      plan_ordered)
from .search import earliest_costs

log = logging.getLogger(__name__)

MODES = ("naive", "ea_star", "ea_star_no_prune", "ordered")
DEFAULT_SCALES = (882, 3616, 12550)


class BenchError(ValueError):
    pass


@dataclass
class BenchConfig:
    graph_path: str | None = None
    scales: list[int] = field(default_factory=lambda: list(DEFAULT_SCALES))
    poi_counts: list[int] = field(default_factory=lambda: list(range(1, 7)))
    trials: int = 50
    seed: int = 0
    modes: list[str] = field(default_factory=lambda: list(MODES))
    depart: int = 8 * 3600
    dwell: int = 0
    cap: int = DEFAULT_POI_CAP
    workers: int = 1
    max_retries: int = 50

    def check(self):
        if self.trials < 1:
            raise BenchError("trials must be >= 1")
        bad = [n for n in self.poi_counts if not 1 <= n <= self.cap]
        if bad:
            raise BenchError(f"POI counts {bad} outside 1..{self.cap}")
        unknown = set(self.modes) - set(MODES)
        if unknown:
            raise BenchError(f"unknown mode(s): {', '.join(sorted(unknown))}")
        if not self.modes:
            raise BenchError("no modes selected")


@dataclass
class Cell:
    scale: int
    n: int
    mode: str
    trials: int
    failures: int
    mean_time: float
    median_time: float
    mean_cost: float | None
    mean_evaluated: float | None
    mean_pruned: float | None


@dataclass
class BenchReport:
    config: dict
    cells: list[Cell]
    trials: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def cell(self, scale: int, n: int, mode: str) -> Cell:
        for c in self.cells:
            if (c.scale, c.n, c.mode) == (scale, n, mode):
                return c
        raise KeyError((scale, n, mode))

    def to_dict(self, raw: bool = False) -> dict:
        d = {"config": self.config, "cells": [asdict(c) for c in self.cells],
             "notes": self.notes}
        if raw:
            d["trials"] = self.trials
        return d

    def table(self) -> str:
        head = (f"{'scale':>6} {'n':>2} {'mode':<17} {'ok':>4} {'fail':>4} "
                f"{'mean ms':>10} {'median ms':>10} {'mean cost':>10} {'eval':>7} {'pruned':>7}")
        lines = [head, "-" * len(head)]
        for c in self.cells:
            def f(x, spec):
                return format(x, spec) if x is not None else "-"
            lines.append(
                f"{c.scale:>6} {c.n:>2} {c.mode:<17} {c.trials - c.failures:>4} {c.failures:>4} "
                f"{c.mean_time * 1000:>10.2f} {c.median_time * 1000:>10.2f} "
                f"{f(c.mean_cost, '10.1f'):>10} {f(c.mean_evaluated, '7.1f'):>7} "
                f"{f(c.mean_pruned, '7.1f'):>7}")
        return "\n".join(lines)


def _plan(mode, g, q, cap):
    if mode == "naive":
        return plan_naive(g, q, cap=cap)
    if mode == "ea_star":
        return plan_ea_star(g, q, cap=cap)
    if mode == "ea_star_no_prune":
        return plan_ea_star(g, q, cap=cap, prune=False)
    return plan_ordered(g, q, cap=cap)


def seed_vertex(g: DmeGraph) -> str:
    """Stop with the most outgoing edges (smallest id on ties)."""
    return min(g.vertices, key=lambda v: (-len(g.out_adjacency[v]), v))


def sample_query(g: DmeGraph, n: int, rng: random.Random, depart: int, dwell: int,
                 max_retries: int) -> TsmpQuery | None:
    starts = sorted(v for v in g.vertices if g.out_adjacency[v])
    if not starts:
        return None
    for _ in range(max_retries):
        origin = rng.choice(starts)
        reach = sorted(set(earliest_costs(g, origin, depart)) - {origin})
        if len(reach) >= n:
            pois = tuple(rng.sample(reach, n))
            return TsmpQuery(origin, depart, pois, {p: dwell for p in pois})
    return None


def run_trial(g, scale, n, trial, cfg) -> list[dict]:
    rng = random.Random(f"{cfg.seed}:{scale}:{n}:{trial}")
    q = sample_query(g, n, rng, cfg.depart, cfg.dwell, cfg.max_retries)
    rows = []
    for mode in cfg.modes:
        row = {"scale": scale, "n": n, "trial": trial, "mode": mode,
               "origin": q.origin if q else None, "pois": list(q.pois) if q else None}
        if q is None:
            rows.append({**row, "ok": False, "error": "no reachable POI set", "time": 0.0})
            continue
        try:
            r = _plan(mode, g, q, cfg.cap)
        except NoRoute as exc:
            rows.append({**row, "ok": False, "error": str(exc), "time": 0.0})
            continue
        rows.append({**row, "ok": True, "time": r.elapsed, "cost": r.best.total_cost,
                     "order": list(r.best.sequence.order),
                     "evaluated": r.sequences_evaluated, "pruned": r.sequences_pruned})
    return rows


def _mean(xs):
    return statistics.fmean(xs) if xs else None


def run_bench(cfg: BenchConfig, graph: DmeGraph | None = None) -> BenchReport:
    cfg.check()
    if graph is None:
        if cfg.graph_path is None:
            raise BenchError("no graph given")
        from .storage import load_graph
        graph = load_graph(cfg.graph_path)
    too_big = [s for s in cfg.scales if s > len(graph.vertices)]
    if too_big:
        raise BenchError(f"scale(s) {too_big} exceed graph size {len(graph.vertices)}")

    rows: list[dict] = []
    for scale in cfg.scales:
        if scale == len(graph.vertices):
            g = graph
        else:
            try:
                g = subgraph_by_scale(graph, scale, seed_vertex(graph))
            except GraphError as exc:
                raise BenchError(str(exc)) from None
        for n in cfg.poi_counts:
            log.info("scale %d, %d POIs: %d trials", scale, n, cfg.trials)
            if cfg.workers > 1:
                with ThreadPoolExecutor(cfg.workers) as pool:
                    parts = pool.map(lambda t: run_trial(g, scale, n, t, cfg), range(cfg.trials))
                    for p in parts:
                        rows.extend(p)
            else:
                for t in range(cfg.trials):
                    rows.extend(run_trial(g, scale, n, t, cfg))

    cells = []
    for scale in cfg.scales:
        for n in cfg.poi_counts:
            for mode in cfg.modes:
                mine = [r for r in rows if (r["scale"], r["n"], r["mode"]) == (scale, n, mode)]
                ok = [r for r in mine if r["ok"]]
                times = [r["time"] for r in ok]
                cells.append(Cell(
                    scale, n, mode, len(mine), len(mine) - len(ok),
                    _mean(times) or 0.0, statistics.median(times) if times else 0.0,
                    _mean([r["cost"] for r in ok]),
                    _mean([r["evaluated"] for r in ok]),
                    _mean([r["pruned"] for r in ok])))
    notes = [
        "POI sets are seeded random draws of stops reachable from the origin.",
        "Times are planner wall time only, in seconds; absolute values depend on hardware.",
        f"sequences_total is n! for naive/ea_star modes (cap {cfg.cap}).",
    ]
    return BenchReport(asdict(cfg), cells, rows, notes)


def write_report(report: BenchReport, path: str | Path, raw_log: str | Path | None = None):
    Path(path).write_text(json.dumps(report.to_dict(), indent=1) + "\n", encoding="utf-8")
    if raw_log:
        with open(raw_log, "w", encoding="utf-8") as fh:
            for r in report.trials:
                fh.write(json.dumps(r) + "\n")


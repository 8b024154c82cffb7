"""Static GTFS subset -> DmeGraph.

Only stops, routes, trips and stop_times are read. The bus identifier of an
edge is the GTFS ``route_id``; an edge's ride time is the mean over all trips
of that route of (arrival at next stop - departure from previous stop).
"""
from __future__ import annotations

import csv
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Collection

from .graph import DmeGraph, Edge, Vertex

log = logging.getLogger(__name__)

TABLES = {
    "stops": ("stop_id", "stop_name", "stop_lat", "stop_lon"),
    "routes": ("route_id",),
    "trips": ("trip_id", "route_id", "service_id"),
    "stop_times": ("trip_id", "arrival_time", "departure_time", "stop_id", "stop_sequence"),
}


class IngestError(Exception):
    def __init__(self, message: str, rows: list | None = None):
        super().__init__(message)
        self.rows = rows or []

    def __str__(self):
        msg = self.args[0]
        if self.rows:
            shown = "\n".join(f"  {r}" for r in self.rows[:20])
            more = f"\n  ... {len(self.rows) - 20} more" if len(self.rows) > 20 else ""
            msg = f"{msg}\n{shown}{more}"
        return msg


@dataclass
class GtfsFeed:
    stops: list[dict] = field(default_factory=list)
    routes: list[dict] = field(default_factory=list)
    trips: list[dict] = field(default_factory=list)
    stop_times: list[dict] = field(default_factory=list)


def parse_time(s: str) -> int:
    """'HH:MM:SS' (hours may exceed 23) -> seconds after service-day midnight."""
    parts = s.strip().split(":")
    if len(parts) != 3:
        raise ValueError(f"bad GTFS time {s!r}")
    h, m, sec = (int(p) for p in parts)
    if h < 0 or not 0 <= m < 60 or not 0 <= sec < 60:
        raise ValueError(f"bad GTFS time {s!r}")
    return h * 3600 + m * 60 + sec


def read_feed(feed_dir: str | Path) -> GtfsFeed:
    feed_dir = Path(feed_dir)
    if not feed_dir.is_dir():
        raise IngestError(f"feed directory not found: {feed_dir}")
    tables = {}
    for name, required in TABLES.items():
        path = feed_dir / f"{name}.txt"
        if not path.exists():
            raise IngestError(f"missing GTFS table {path.name} in {feed_dir}")
        with open(path, newline="", encoding="utf-8-sig") as fh:
            reader = csv.DictReader(fh)
            header = [c.strip() for c in reader.fieldnames or ()]
            missing = [c for c in required if c not in header]
            if missing:
                raise IngestError(f"{path.name} lacks column(s): {', '.join(missing)}")
            reader.fieldnames = header
            tables[name] = [{k: (v or "").strip() for k, v in row.items() if k in required}
                            for row in reader]
    return GtfsFeed(**tables)


def build_graph(feed: GtfsFeed, service_ids: Collection[str] | None = None) -> DmeGraph:
    """Build the graph from trips whose service_id is in ``service_ids`` (all if None)."""
    stops = {r["stop_id"]: r for r in feed.stops}
    route_ids = {r["route_id"] for r in feed.routes}
    trips = {r["trip_id"]: r for r in feed.trips}

    bad = [("trips", r) for r in feed.trips if r["route_id"] not in route_ids]
    by_trip = defaultdict(list)
    for row in feed.stop_times:
        problems = []
        if row["trip_id"] not in trips:
            problems.append("unknown trip_id")
        if row["stop_id"] not in stops:
            problems.append("unknown stop_id")
        if problems:
            bad.append(("stop_times: " + ", ".join(problems), row))
            continue
        by_trip[row["trip_id"]].append(row)
    if bad:
        raise IngestError(f"{len(bad)} unresolvable row(s)", bad)

    keep = sorted(t for t in by_trip
                  if service_ids is None or trips[t]["service_id"] in service_ids)
    if not keep:
        raise IngestError("feed has no stop_times for the selected service")

    arrivals: dict[tuple[str, str], set[int]] = defaultdict(set)
    rides: dict[tuple[str, str, str], list[int]] = defaultdict(list)
    for trip_id in keep:
        route = trips[trip_id]["route_id"]
        try:
            rows = sorted(by_trip[trip_id], key=lambda r: int(r["stop_sequence"]))
            seqs = [int(r["stop_sequence"]) for r in rows]
            times = [_arr_dep(r) for r in rows]
        except ValueError as exc:
            raise IngestError(f"trip {trip_id}: {exc}", by_trip[trip_id]) from None
        if len(set(seqs)) != len(seqs):
            raise IngestError(f"trip {trip_id}: duplicate stop_sequence", by_trip[trip_id])
        for row, (arr, _) in zip(rows, times):
            arrivals[row["stop_id"], route].add(arr)
        for a, b, (_, dep), (arr, _) in zip(rows, rows[1:], times, times[1:]):
            if a["stop_id"] != b["stop_id"]:
                rides[a["stop_id"], b["stop_id"], route].append(arr - dep)

    sched: dict[str, dict[str, tuple[int, ...]]] = defaultdict(dict)
    for (stop_id, route), ts in arrivals.items():
        sched[stop_id][route] = tuple(sorted(ts))

    vertices = []
    for stop_id in sorted(sched):
        row = stops[stop_id]
        try:
            lat, lon = float(row["stop_lat"]), float(row["stop_lon"])
        except ValueError:
            raise IngestError(f"stop {stop_id}: bad coordinates", [row]) from None
        vertices.append(Vertex(stop_id, row["stop_name"], lat, lon, sched[stop_id]))
    edges = [Edge(a, b, route, max(1, _round_half_up(sum(xs) / len(xs))))
             for (a, b, route), xs in rides.items()]
    g = DmeGraph(vertices, edges)
    log.info("built %r from %d trips", g, len(keep))
    return g


def _arr_dep(row) -> tuple[int, int]:
    arr, dep = row["arrival_time"], row["departure_time"]
    if not arr and not dep:
        raise ValueError(f"stop {row['stop_id']} seq {row['stop_sequence']} has no times")
    arr_s = parse_time(arr or dep)
    dep_s = parse_time(dep or arr)
    return arr_s, dep_s


def _round_half_up(x: float) -> int:
    return int(x + 0.5) if x >= 0 else -int(-x + 0.5)


def load_feed_graph(feed_dir: str | Path, service_ids: Collection[str] | None = None) -> DmeGraph:
    return build_graph(read_feed(feed_dir), service_ids)

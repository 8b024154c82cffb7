"""Directed multiple-edges graph of a bus network.

Vertices are stops carrying a per-bus schedule of arrival timestamps; edges
are (stop, stop, bus) triples weighted by average ride time. Parallel edges
between the same pair of stops are allowed, one per bus.

All times are integer seconds on a single service-day axis.
"""
from __future__ import annotations

import math
from bisect import bisect_left
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

EARTH_RADIUS_M = 6371008.8

# slack for float noise in distance/speed ratios; keeps h a strict lower bound
_H_EPS = 1e-6
_SPEED_RTOL = 1e-9


class GraphError(Exception):
    pass


class UnknownVertex(GraphError, KeyError):
    def __str__(self):
        return f"unknown vertex id: {self.args[0]!r}"


@dataclass(frozen=True)
class Vertex:
    id: str
    name: str
    lat: float
    lon: float
    schedule: Mapping[str, tuple[int, ...]] = field(default_factory=dict)

    def buses(self) -> list[str]:
        return sorted(self.schedule)


@dataclass(frozen=True, order=True)
class Edge:
    source: str
    target: str
    bus: str
    ride: int


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str

    def __str__(self):
        return f"{self.kind}: {self.detail}"


def haversine_m(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance in meters."""
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp = p2 - p1
    dl = math.radians(lon2 - lon1)
    a = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(a)))


class DmeGraph:
    """Immutable bus-network graph.

    ``v_max`` (m/s) is the speed used by the exploration-cost heuristic. When
    omitted it is calibrated to the fastest edge (distance / ride), which is
    the smallest value keeping the heuristic admissible. An explicit value is
    kept as given; ``validate`` reports it if it is too low.

    The constructor does not reject malformed input, so that ``validate`` can
    report every problem at once.
    """

    def __init__(self, vertices: Iterable[Vertex], edges: Iterable[Edge],
                 v_max: float | None = None):
        self.vertices: dict[str, Vertex] = {}
        for v in vertices:
            self.vertices[v.id] = v
        self.edges: tuple[Edge, ...] = tuple(sorted(edges))
        self.out_adjacency: dict[str, tuple[Edge, ...]] = {}
        grouped: dict[str, list[Edge]] = {}
        for e in self.edges:
            grouped.setdefault(e.source, []).append(e)
        for vid in self.vertices:
            self.out_adjacency[vid] = tuple(grouped.pop(vid, ()))
        # edges leaving unknown vertices stay reachable for validate()
        self._dangling_sources = grouped
        self._edge_index = {(e.source, e.target, e.bus): e for e in self.edges}

        self.max_edge_speed = max((self.edge_speed(e) for e in self.edges), default=0.0)
        if v_max is None:
            v_max = self.max_edge_speed if self.max_edge_speed > 0 else math.inf
        if not v_max > 0:
            raise GraphError(f"v_max must be positive, got {v_max}")
        self.v_max = float(v_max)

        # search-side tables: (target, bus, ride, departures of bus at source)
        self._adj: dict[str, list[tuple[str, str, int, tuple[int, ...]]]] = {}
        for vid, out in self.out_adjacency.items():
            sched = self.vertices[vid].schedule
            self._adj[vid] = [(e.target, e.bus, e.ride, tuple(sched.get(e.bus, ())))
                              for e in out]
        self._rad = {vid: (math.radians(v.lat), math.radians(v.lon))
                     for vid, v in self.vertices.items()}

    def __repr__(self):
        return (f"<DmeGraph |V|={len(self.vertices)} |E|={len(self.edges)}"
                f" v_max={self.v_max:.3f}>")

    def __eq__(self, other):
        if not isinstance(other, DmeGraph):
            return NotImplemented
        return (self.v_max == other.v_max and self.edges == other.edges
                and _vertex_key(self) == _vertex_key(other))

    __hash__ = None

    def __contains__(self, vid):
        return vid in self.vertices

    def vertex(self, vid: str) -> Vertex:
        try:
            return self.vertices[vid]
        except KeyError:
            raise UnknownVertex(vid) from None

    def edge(self, source: str, target: str, bus: str) -> Edge:
        return self._edge_index[source, target, bus]

    def out_edges(self, vid: str) -> tuple[Edge, ...]:
        self.vertex(vid)
        return self.out_adjacency[vid]

    def schedule_entry_count(self) -> int:
        return sum(len(ts) for v in self.vertices.values() for ts in v.schedule.values())

    def geo_distance(self, a: str, b: str) -> float:
        va, vb = self.vertex(a), self.vertex(b)
        return haversine_m(va.lat, va.lon, vb.lat, vb.lon)

    def edge_speed(self, e: Edge) -> float:
        if e.source not in self.vertices or e.target not in self.vertices or e.ride <= 0:
            return 0.0
        return self.geo_distance(e.source, e.target) / e.ride

    def with_v_max(self, v_max: float | None) -> DmeGraph:
        return DmeGraph(self.vertices.values(), self.edges, v_max=v_max)

    def heuristic_to(self, dest: str):
        """Return a fast ``vid -> exploration cost to dest`` callable."""
        self.vertex(dest)
        if math.isinf(self.v_max):
            return lambda vid: 0
        lat2, lon2 = self._rad[dest]
        cos2 = math.cos(lat2)
        scale = 2 * EARTH_RADIUS_M / self.v_max
        rad = self._rad
        sin, cos, asin, sqrt, floor = math.sin, math.cos, math.asin, math.sqrt, math.floor

        def h(vid):
            lat1, lon1 = rad[vid]
            a = sin((lat2 - lat1) / 2) ** 2 + cos(lat1) * cos2 * sin((lon2 - lon1) / 2) ** 2
            x = scale * asin(min(1.0, sqrt(a))) - _H_EPS
            return floor(x) if x > 0 else 0

        return h


def _vertex_key(g: DmeGraph):
    return sorted((v.id, v.name, v.lat, v.lon,
                   tuple(sorted((b, tuple(ts)) for b, ts in v.schedule.items())))
                  for v in g.vertices.values())


def next_departure(g: DmeGraph, v: str, bus: str, t: int) -> int | None:
    """Earliest scheduled time of ``bus`` at ``v`` not before ``t``."""
    times = g.vertex(v).schedule.get(bus)
    if not times:
        return None
    i = bisect_left(times, t)
    return times[i] if i < len(times) else None


def waiting_time(g: DmeGraph, v: str, bus: str, t: int,
                 prev_bus: str | None = None) -> int | None:
    """Seconds spent at ``v`` before ``bus`` leaves, or None if it never does.

    Staying on the bus one arrived with costs nothing.
    """
    g.vertex(v)
    if prev_bus is not None and prev_bus == bus:
        return 0
    s = next_departure(g, v, bus, t)
    return None if s is None else s - t


def exploration_cost(g: DmeGraph, a: str, b: str) -> int:
    """Lower bound on travel seconds from a to b: distance over v_max, floored."""
    g.vertex(a)
    if a == b:
        return 0
    return g.heuristic_to(b)(a)


def validate(g: DmeGraph) -> list[Violation]:
    out = []
    for v in g.vertices.values():
        if not (-90 <= v.lat <= 90 and -180 <= v.lon <= 180):
            out.append(Violation("coordinate out of range", f"{v.id} ({v.lat}, {v.lon})"))
        for bus, times in sorted(v.schedule.items()):
            if any(b <= a for a, b in zip(times, times[1:])):
                out.append(Violation("schedule not strictly increasing", f"{v.id} bus {bus}"))
            if times and times[0] < 0:
                out.append(Violation("negative timestamp", f"{v.id} bus {bus}"))
    seen = set()
    fast = []
    for e in g.edges:
        key = (e.source, e.target, e.bus)
        if key in seen:
            out.append(Violation("duplicate edge", f"{e.source}->{e.target} bus {e.bus}"))
        seen.add(key)
        missing = [x for x in (e.source, e.target) if x not in g.vertices]
        if missing:
            out.append(Violation("dangling edge endpoint",
                                 f"{e.source}->{e.target} bus {e.bus}: {', '.join(missing)}"))
            continue
        if e.ride <= 0:
            out.append(Violation("non-positive ride time",
                                 f"{e.source}->{e.target} bus {e.bus}: {e.ride}"))
            continue
        speed = g.edge_speed(e)
        if speed > g.v_max * (1 + _SPEED_RTOL):
            fast.append((speed, e))
    if fast:
        speed, e = max(fast, key=lambda p: p[0])
        out.append(Violation(
            "inadmissible heuristic",
            f"v_max={g.v_max:.3f} m/s below {len(fast)} edge speed(s), "
            f"max {speed:.3f} m/s on {e.source}->{e.target} bus {e.bus}"))
    return out


def subgraph_by_scale(g: DmeGraph, n: int, seed_vertex: str) -> DmeGraph:
    """Breadth-first closure of ``n`` vertices from ``seed_vertex``.

    Neighbours are visited in ascending id order. Induced edges are kept and
    v_max is recalibrated.
    """
    g.vertex(seed_vertex)
    if not 1 <= n <= len(g.vertices):
        raise GraphError(f"n must be in [1, {len(g.vertices)}], got {n}")
    keep = {seed_vertex}
    order = [seed_vertex]
    queue = deque([seed_vertex])
    while queue and len(order) < n:
        u = queue.popleft()
        for w in sorted({e.target for e in g.out_adjacency[u]}):
            if w not in keep:
                keep.add(w)
                order.append(w)
                queue.append(w)
                if len(order) == n:
                    break
    if len(order) < n:
        raise GraphError(f"component reachable from {seed_vertex} has only "
                         f"{len(order)} vertices, {n} requested")
    edges = [e for e in g.edges if e.source in keep and e.target in keep]
    return DmeGraph((g.vertices[v] for v in order), edges)

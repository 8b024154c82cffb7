"""Seeded synthetic bus networks for desk-scale testing and benchmarks.

Stops are scattered uniformly over a square around a fixed reference point.
Each line is a simple path built by walking to one of the nearest not-yet-used
stops, preferring stops no line serves yet. A line runs in both directions,
each direction a separate bus id (``L007`` / ``L007R``), with periodic trips
across the service span. Schedules are derived from the same per-hop ride
times as the edges, so the network is FIFO by construction.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .graph import EARTH_RADIUS_M, DmeGraph, Edge, Vertex

CENTER_LAT = 40.75
CENTER_LON = -73.95
_NEIGHBOURS = 8


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class SyntheticSpec:
    vertex_count: int = 300
    line_count: int = 12
    stops_per_line: int = 20
    headway: int = 300
    service_span: tuple[int, int] = (6 * 3600, 22 * 3600)
    seed: int = 0
    speed_cap: float = 12.0    # m/s; no hop is faster than this
    spacing: float = 400.0     # mean stop spacing, meters
    min_speed_ratio: float = 0.85
    coverage_bias: float = 0.3

    def check(self):
        if self.vertex_count < 2:
            raise SpecError("vertex_count must be >= 2")
        if self.line_count < 1:
            raise SpecError("line_count must be >= 1")
        if self.stops_per_line < 2:
            raise SpecError("stops_per_line must be >= 2")
        if self.stops_per_line > self.vertex_count:
            raise SpecError(f"stops_per_line ({self.stops_per_line}) exceeds "
                            f"vertex_count ({self.vertex_count})")
        if self.headway <= 0:
            raise SpecError("headway must be positive")
        start, end = self.service_span
        if not 0 <= start < end:
            raise SpecError("service span must satisfy 0 <= start < end")
        if not self.speed_cap > 0 or not self.spacing > 0:
            raise SpecError("speed_cap and spacing must be positive")


def generate_synthetic(spec: SyntheticSpec) -> DmeGraph:
    spec.check()
    rng = random.Random(spec.seed)
    n = spec.vertex_count
    width = len(str(n - 1))
    ids = [f"s{i:0{width}d}" for i in range(n)]

    side = spec.spacing * math.sqrt(n)
    xy = np.array([(rng.uniform(0, side), rng.uniform(0, side)) for _ in range(n)])
    xy -= side / 2
    lat0 = math.radians(CENTER_LAT)
    lats = CENTER_LAT + np.degrees(xy[:, 1] / EARTH_RADIUS_M)
    lons = CENTER_LON + np.degrees(xy[:, 0] / (EARTH_RADIUS_M * math.cos(lat0)))
    k = min(_NEIGHBOURS + 1, n)
    _, knn = cKDTree(xy).query(xy, k=k)
    knn = np.atleast_2d(knn)

    def dist(a, b):
        p1, p2 = math.radians(lats[a]), math.radians(lats[b])
        dl = math.radians(lons[b] - lons[a])
        h = math.sin((p2 - p1) / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
        return 2 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))

    covered: set[int] = set()
    schedules: dict[int, dict[str, list[int]]] = {i: {} for i in range(n)}
    edges = []
    start, end = spec.service_span
    bus_width = len(str(spec.line_count - 1))
    for line in range(spec.line_count):
        uncovered = sorted(set(range(n)) - covered)
        path = [rng.choice(uncovered) if uncovered else rng.randrange(n)]
        on_path = {path[0]}
        heading = rng.uniform(-math.pi, math.pi)
        while len(path) < spec.stops_per_line:
            cur = path[-1]
            near = [int(j) for j in knn[cur][1:] if j not in on_path]
            if not near:
                near = sorted((j for j in range(n) if j not in on_path),
                              key=lambda j: dist(cur, j))[:_NEIGHBOURS]
            best = None
            for j in near:
                dx, dy = xy[j] - xy[cur]
                ang = math.atan2(dy, dx)
                turn = abs((ang - heading + math.pi) % (2 * math.pi) - math.pi)
                score = turn + (0.0 if j not in covered else spec.coverage_bias)
                score += rng.uniform(0, 0.2)
                if best is None or score < best[0]:
                    best = (score, j, ang)
            _, nxt, heading = best
            path.append(nxt)
            on_path.add(nxt)
        covered.update(path)

        hops = []
        for a, b in zip(path, path[1:]):
            speed = rng.uniform(spec.min_speed_ratio, 1.0) * spec.speed_cap
            hops.append(max(1, math.ceil(dist(a, b) / speed)))
        name = f"L{line:0{bus_width}d}"
        for bus, stops, rides in ((name, path, hops),
                                  (name + "R", path[::-1], hops[::-1])):
            offsets = [0]
            for r in rides:
                offsets.append(offsets[-1] + r)
            t = start + rng.randrange(spec.headway)
            trips = []
            while t <= end:
                trips.append(t)
                t += spec.headway
            for stop, off in zip(stops, offsets):
                schedules[stop][bus] = [t0 + off for t0 in trips]
            for a, b, r in zip(stops, stops[1:], rides):
                edges.append(Edge(ids[a], ids[b], bus, r))

    vertices = [Vertex(ids[i], f"Synthetic stop {i}", round(float(lats[i]), 7),
                       round(float(lons[i]), 7),
                       {bus: tuple(ts) for bus, ts in sorted(schedules[i].items())})
                for i in range(n)]
    return DmeGraph(vertices, edges)

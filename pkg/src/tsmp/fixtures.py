"""Five-stop reference network used in tests, docs and the CLI demo.

Only the stated costs of the classic worked example are public, not the
figure's weights, so this network is a reconstruction chosen to reproduce
them exactly at a 08:00 departure:

* v1 -> v2 on bus 1 (no wait, 180 s ride): c2 = 180
* v1 -> v3 on bus 2 (300 s wait, 60 s ride): c3 = 360
* v2 -> v4 staying on bus 1 (240 s ride): c4 = 420
* v3 -> v5 staying on bus 2 (120 s) = 480, or bus 3 (120 s wait + 180 s) = 660
* v4 -> v5 staying on bus 1 (120 s): 540

Stops lie on one meridian, so distances add exactly. The fastest edges
(v1->v3, v1->v2) run at 10 m/s, which calibrates v_max; distances to v5 of
805 m, 1405 m and 3205 m then give exploration costs 80, 140 and 320.
"""
from __future__ import annotations

import math

from .graph import EARTH_RADIUS_M, DmeGraph, Edge, Vertex

BASE_LAT = 40.87
BASE_LON = -73.88

# meters north of v5
_OFFSETS = {"v1": 1405.0, "v2": 3205.0, "v3": 805.0, "v4": 1100.0, "v5": 0.0}

_SCHEDULES = {
    "v1": {"1": ("08:00", "08:30"), "2": ("08:05", "08:35")},
    "v2": {"1": ("08:03", "08:33")},
    "v3": {"2": ("08:06", "08:36"), "3": ("08:08", "08:38")},
    "v4": {"1": ("08:07", "08:37")},
    "v5": {"1": ("08:09", "08:39"), "2": ("08:08", "08:38"), "3": ("08:11", "08:41")},
}

_EDGES = [
    ("v1", "v2", "1", 180),
    ("v1", "v3", "2", 60),
    ("v2", "v4", "1", 240),
    ("v3", "v5", "2", 120),
    ("v3", "v5", "3", 180),
    ("v4", "v5", "1", 120),
]

DEPART = 8 * 3600


def _hm(s: str) -> int:
    h, m = s.split(":")
    return int(h) * 3600 + int(m) * 60


def example_graph() -> DmeGraph:
    vertices = []
    for vid, north in _OFFSETS.items():
        lat = BASE_LAT + math.degrees(north / EARTH_RADIUS_M)
        sched = {bus: tuple(_hm(t) for t in times) for bus, times in _SCHEDULES[vid].items()}
        vertices.append(Vertex(vid, f"Stop {vid[1:]}", lat, BASE_LON, sched))
    return DmeGraph(vertices, [Edge(*e) for e in _EDGES])

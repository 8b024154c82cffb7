"""Route documents: the structured answer to a multi-POI query, and its checker."""
from __future__ import annotations

import re

from .graph import DmeGraph, waiting_time
from .planner import PlanResult, TsmpQuery

_CLOCK = re.compile(r"^(\d{1,3}):([0-5]\d)(?::([0-5]\d))?$")


def parse_clock(s: str) -> int:
    """'HH:MM', 'HH:MM:SS' (hours may pass 24) or plain seconds."""
    s = s.strip()
    if s.isdigit():
        return int(s)
    m = _CLOCK.match(s)
    if not m:
        raise ValueError(f"unparsable time {s!r}; use HH:MM[:SS] or seconds")
    h, mi, sec = m.groups()
    return int(h) * 3600 + int(mi) * 60 + int(sec or 0)


def format_clock(t: int) -> str:
    return f"{t // 3600:02d}:{t % 3600 // 60:02d}:{t % 60:02d}"


def stamp(t: int) -> dict:
    return {"seconds": t, "clock": format_clock(t)}


def route_document(g: DmeGraph, query: TsmpQuery, result: PlanResult, mode: str) -> dict:
    best = result.best
    order = list(best.sequence.order)
    legs = []
    dwells = []
    for i, leg in enumerate(best.legs):
        legs.append({
            "from": leg.origin,
            "to": leg.dest,
            "depart": stamp(leg.depart),
            "arrive": stamp(leg.arrival),
            "cost": leg.cost,
            "wait": leg.wait_total,
            "ride": leg.ride_total,
            "steps": [{**seg,
                       "board_name": g.vertices[seg["board"]].name,
                       "alight_name": g.vertices[seg["alight"]].name,
                       "departure": stamp(seg["departure"]),
                       "arrival": stamp(seg["arrival"])}
                      for seg in leg.segments()],
        })
        if i < len(best.legs) - 1:
            dwells.append({"stop": leg.dest, "seconds": query.dwell[leg.dest]})
    wait = sum(leg.wait_total for leg in best.legs)
    ride = sum(leg.ride_total for leg in best.legs)
    dwell = sum(d["seconds"] for d in dwells)
    return {
        "mode": mode,
        "origin": query.origin,
        "pois": list(query.pois),
        "depart": stamp(query.depart),
        "order": order,
        "legs": legs,
        "dwells": dwells,
        "totals": {"wait": wait, "ride": ride, "dwell": dwell, "cost": best.total_cost},
        "arrive": stamp(query.depart + best.total_cost),
        "stats": {
            "sequences_total": result.sequences_total,
            "sequences_evaluated": result.sequences_evaluated,
            "sequences_pruned": result.sequences_pruned,
            "elapsed_ms": round(result.elapsed * 1000, 3),
        },
    }


def check_route_document(g: DmeGraph, doc: dict) -> list[str]:
    """Replay a route document against the graph; return every mismatch found.

    Waits are recomputed from the schedules, not read from the document.
    """
    problems = []
    t = doc["depart"]["seconds"]
    here = doc["origin"]
    wait_sum = ride_sum = dwell_sum = 0
    dwell = {d["stop"]: d["seconds"] for d in doc["dwells"]}
    if doc["order"][0] != here or set(doc["order"][1:]) != set(doc["pois"]):
        problems.append("order does not start at origin and cover the POIs")
    for i, leg in enumerate(doc["legs"]):
        if leg["from"] != here or leg["to"] != doc["order"][i + 1]:
            problems.append(f"leg {i} endpoints {leg['from']}->{leg['to']} out of order")
        if leg["depart"]["seconds"] != t:
            problems.append(f"leg {i} departs at {leg['depart']['seconds']}, expected {t}")
        prev_bus = None
        for j, st in enumerate(leg["steps"]):
            if st["board"] != here:
                problems.append(f"leg {i} step {j} boards at {st['board']}, rider is at {here}")
            try:
                e = g.edge(st["board"], st["alight"], st["bus"])
            except KeyError:
                problems.append(f"leg {i} step {j}: no edge {st['board']}->{st['alight']} "
                                f"on bus {st['bus']}")
                return problems
            w = waiting_time(g, e.source, e.bus, t, prev_bus)
            if w is None:
                problems.append(f"leg {i} step {j}: bus {e.bus} has left {e.source}")
                return problems
            if w != st["wait"] or e.ride != st["ride"]:
                problems.append(f"leg {i} step {j}: wait/ride {st['wait']}/{st['ride']} "
                                f"!= replayed {w}/{e.ride}")
            t += w + e.ride
            wait_sum += w
            ride_sum += e.ride
            here, prev_bus = e.target, e.bus
        if leg["arrive"]["seconds"] != t:
            problems.append(f"leg {i} arrives at {leg['arrive']['seconds']}, replayed {t}")
        if i < len(doc["legs"]) - 1:
            d = dwell.get(here, 0)
            t += d
            dwell_sum += d
    totals = doc["totals"]
    replayed = {"wait": wait_sum, "ride": ride_sum, "dwell": dwell_sum,
                "cost": t - doc["depart"]["seconds"]}
    for k, v in replayed.items():
        if totals[k] != v:
            problems.append(f"total {k} {totals[k]} != replayed {v}")
    if doc["arrive"]["seconds"] != t:
        problems.append(f"arrival {doc['arrive']['seconds']} != replayed {t}")
    return problems

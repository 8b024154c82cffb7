"""Independent reference computations used to check the library.

None of these import the search or planner code paths they check.
"""
from __future__ import annotations

import itertools
import math

R = 6371008.8


def scan_departure(times, t):
    """Linear scan for the first time >= t."""
    for s in times:
        if s >= t:
            return s
    return None


def chord_distance_m(lat1, lon1, lat2, lon2):
    # unit vectors -> chord length -> central angle
    def xyz(lat, lon):
        la, lo = math.radians(lat), math.radians(lon)
        return (math.cos(la) * math.cos(lo), math.cos(la) * math.sin(lo), math.sin(la))

    a, b = xyz(lat1, lon1), xyz(lat2, lon2)
    chord = math.dist(a, b)
    return 2 * R * math.asin(min(1.0, chord / 2))


def step_cost(g, vertex, edge, t, prev_bus):
    """Wait + ride for boarding ``edge`` at time t, or None if the bus is gone."""
    if prev_bus == edge.bus:
        return edge.ride
    s = scan_departure(g.vertices[vertex].schedule.get(edge.bus, ()), t)
    if s is None:
        return None
    return s - t + edge.ride


def best_simple_route(g, origin, dest, depart, max_depth=8):
    """Cheapest simple route with at most ``max_depth`` edges, by exhaustive DFS.

    Partial routes already costing at least the best complete one are cut;
    costs never decrease along a route, so the cut cannot drop the optimum.
    Returns (cost, [edges]) or (None, None).
    """
    if origin == dest:
        return 0, []
    best = [math.inf, None]
    out = {}
    for e in g.edges:
        out.setdefault(e.source, []).append(e)

    def dfs(v, cost, prev_bus, visited, path):
        if cost >= best[0]:
            return
        if v == dest:
            best[0], best[1] = cost, list(path)
            return
        if len(path) == max_depth:
            return
        for e in out.get(v, ()):
            if e.target in visited:
                continue
            c = step_cost(g, v, e, depart + cost, prev_bus)
            if c is None:
                continue
            visited.add(e.target)
            path.append(e)
            dfs(e.target, cost + c, e.bus, visited, path)
            path.pop()
            visited.discard(e.target)

    dfs(origin, 0, None, {origin}, [])
    return (None, None) if best[1] is None else (best[0], best[1])


def brute_force_plan(g, origin, depart, pois, dwell, leg_cost):
    """All n! orders with clock chaining; ``leg_cost(a, b, t)`` returns cost or None.

    Returns {order: total or None}.
    """
    totals = {}
    for perm in itertools.permutations(sorted(pois)):
        order = (origin, *perm)
        t = depart
        total = 0
        for i, (a, b) in enumerate(zip(order, order[1:])):
            c = leg_cost(a, b, t)
            if c is None:
                total = None
                break
            t += c
            total += c
            if i < len(order) - 2:
                t += dwell.get(b, 0)
                total += dwell.get(b, 0)
        totals[order] = total
    return totals


def leg_cost(g, origin, dest, depart):
    """Exact cheapest leg by plain Dijkstra over (stop, bus-ridden-in) states."""
    import heapq

    if origin == dest:
        return 0
    out = {}
    for e in g.edges:
        out.setdefault(e.source, []).append(e)
    dist = {(origin, None): 0}
    heap = [(0, origin, "")]
    while heap:
        c, v, bus = heapq.heappop(heap)
        key = (v, bus or None)
        if c > dist.get(key, math.inf):
            continue
        if v == dest:
            return c
        for e in out.get(v, ()):
            s = step_cost(g, v, e, depart + c, bus or None)
            if s is None:
                continue
            nk = (e.target, e.bus)
            if c + s < dist.get(nk, math.inf):
                dist[nk] = c + s
                heapq.heappush(heap, (c + s, e.target, e.bus))
    return None

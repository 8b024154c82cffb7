"""Time-dependent minimum-cost search between one origin and one destination.

``dsrs`` is a Dijkstra-style label-setting search ordered by accumulated cost;
``astar`` orders by cost plus the exploration-cost lower bound to the
destination. Both keep one label per vertex and use the same relaxation: the
cost of an edge is the wait for its bus at the boarding stop (zero when
staying aboard the same bus) plus its ride time.

Each label carries its own arrival time, so waits are evaluated at the time
that particular branch reaches the stop.
"""
from __future__ import annotations

import heapq
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

from .graph import DmeGraph, Edge, waiting_time

INF = float("inf")


class Unreachable(Exception):
    """No route reaches ``dest`` before service ends."""

    def __init__(self, origin: str, dest: str, depart: int, settled: frozenset[str]):
        super().__init__(origin, dest, depart)
        self.origin, self.dest, self.depart = origin, dest, depart
        self.settled = settled

    def __str__(self):
        return (f"{self.dest} unreachable from {self.origin} departing at {self.depart} "
                f"({len(self.settled)} stops reachable)")


@dataclass(frozen=True)
class SearchLabel:
    vertex: str
    cost: int
    arrival: int
    estimated: int = 0
    pred: tuple[str, str] | None = None


@dataclass(frozen=True)
class RouteLeg:
    origin: str
    dest: str
    depart: int
    steps: tuple[tuple[str, Edge], ...]
    cost: int
    wait_total: int
    ride_total: int
    settled_count: int = 0
    waits: tuple[int, ...] = ()
    # (vertex, priority) in the order vertices were settled
    trace: tuple[tuple[str, int], ...] = field(default=(), repr=False, compare=False)

    @property
    def arrival(self) -> int:
        return self.depart + self.cost

    def segments(self) -> Iterator[dict]:
        """Per-step boarding detail: stop, bus, scheduled departure, wait, ride."""
        t = self.depart
        for (vertex, edge), wait in zip(self.steps, self.waits):
            board = t + wait
            yield {"board": vertex, "bus": edge.bus, "departure": board,
                   "wait": wait, "ride": edge.ride, "alight": edge.target,
                   "arrival": board + edge.ride}
            t = board + edge.ride


def relax(g: DmeGraph, label: SearchLabel, edge: Edge) -> tuple[int, int] | None:
    """Cost and arrival time at ``edge.target`` when extending ``label`` along ``edge``."""
    if edge.source != label.vertex:
        raise ValueError(f"edge {edge} does not leave {label.vertex}")
    prev_bus = label.pred[1] if label.pred else None
    wait = waiting_time(g, edge.source, edge.bus, label.arrival, prev_bus)
    if wait is None:
        return None
    return label.cost + wait + edge.ride, label.arrival + wait + edge.ride


def replay(g: DmeGraph, origin: str, depart: int,
           steps: Sequence[tuple[str, Edge]]) -> tuple[int, int, int, tuple[int, ...]]:
    """Re-simulate ``steps`` from ``depart``; returns (cost, wait, ride, per-step waits).

    Raises ValueError if the steps do not chain or a bus is missed.
    """
    label = SearchLabel(origin, 0, depart)
    waits = []
    ride_total = 0
    for vertex, edge in steps:
        if vertex != label.vertex:
            raise ValueError(f"step at {vertex} does not follow {label.vertex}")
        res = relax(g, label, edge)
        if res is None:
            raise ValueError(f"bus {edge.bus} does not leave {vertex} after {label.arrival}")
        cost, arrival = res
        waits.append(cost - label.cost - edge.ride)
        ride_total += edge.ride
        label = SearchLabel(edge.target, cost, arrival, pred=(vertex, edge.bus))
    return label.cost, label.cost - ride_total, ride_total, tuple(waits)


def _label_setting(g: DmeGraph, origin: str, dest: str, depart: int,
                   h: Callable[[str], int] | None) -> RouteLeg:
    g.vertex(origin), g.vertex(dest)
    adj = g._adj
    cost = {origin: 0}
    pred: dict[str, tuple[str, str] | None] = {origin: None}
    settled: set[str] = set()
    trace = []
    h0 = h(origin) if h else 0
    pq = [(h0, origin)]
    pop, push = heapq.heappop, heapq.heappush
    while pq:
        prio, u = pop(pq)
        if u in settled:
            continue
        settled.add(u)
        trace.append((u, prio))
        if u == dest:
            break
        cu = cost[u]
        t = depart + cu
        pu = pred[u]
        prev_bus = pu[1] if pu else None
        for v, bus, ride, times in adj[u]:
            if v in settled:
                continue
            if bus == prev_bus:
                x = cu + ride
            else:
                i = bisect_left(times, t)
                if i == len(times):
                    continue
                x = times[i] - t + cu + ride
            if x < cost.get(v, INF):
                cost[v] = x
                pred[v] = (u, bus)
                push(pq, (x + h(v) if h else x, v))
    else:
        raise Unreachable(origin, dest, depart, frozenset(settled))

    steps = []
    v = dest
    while pred[v] is not None:
        u, bus = pred[v]
        steps.append((u, g.edge(u, v, bus)))
        v = u
    steps.reverse()
    c, wait_total, ride_total, waits = replay(g, origin, depart, steps)
    assert c == cost[dest], (c, cost[dest])
    return RouteLeg(origin, dest, depart, tuple(steps), c, wait_total, ride_total,
                    len(trace), waits, tuple(trace))


def _strict(g: DmeGraph, origin: str, dest: str, depart: int) -> RouteLeg:
    # labels keyed by (vertex, incoming bus); "" marks the origin state
    g.vertex(origin), g.vertex(dest)
    adj = g._adj
    start = (origin, "")
    cost = {start: 0}
    pred: dict[tuple[str, str], tuple[str, str] | None] = {start: None}
    done = set()
    pq = [(0, origin, "")]
    reached = None
    while pq:
        c, u, ub = heapq.heappop(pq)
        if (u, ub) in done:
            continue
        done.add((u, ub))
        if u == dest:
            reached = (u, ub)
            break
        t = depart + c
        for v, bus, ride, times in adj[u]:
            if bus == ub:
                x = c + ride
            else:
                i = bisect_left(times, t)
                if i == len(times):
                    continue
                x = times[i] - t + c + ride
            if x < cost.get((v, bus), INF):
                cost[v, bus] = x
                pred[v, bus] = (u, ub)
                heapq.heappush(pq, (x, v, bus))
    if reached is None:
        raise Unreachable(origin, dest, depart, frozenset(s[0] for s in done))
    steps = []
    state = reached
    while pred[state] is not None:
        prev = pred[state]
        steps.append((prev[0], g.edge(prev[0], state[0], state[1])))
        state = prev
    steps.reverse()
    c, wait_total, ride_total, waits = replay(g, origin, depart, steps)
    return RouteLeg(origin, dest, depart, tuple(steps), c, wait_total, ride_total,
                    len(done), waits)


def dsrs(g: DmeGraph, origin: str, dest: str, depart: int, *, strict: bool = False) -> RouteLeg:
    """Minimum-cost leg by cost-ordered label setting.

    ``strict=True`` keeps one label per (stop, incoming bus) instead of one per
    stop. That variant is exact even where a costlier arrival on another bus
    would avoid a later transfer wait; it exists as a comparison oracle.
    """
    if strict:
        return _strict(g, origin, dest, depart)
    return _label_setting(g, origin, dest, depart, None)


def astar(g: DmeGraph, origin: str, dest: str, depart: int) -> RouteLeg:
    """Minimum-cost leg, settling stops by cost + exploration cost to ``dest``."""
    return _label_setting(g, origin, dest, depart, g.heuristic_to(dest))


def earliest_costs(g: DmeGraph, origin: str, depart: int) -> dict[str, int]:
    """Minimum cost to every stop reachable from ``origin`` (full label-setting sweep)."""
    g.vertex(origin)
    adj = g._adj
    cost = {origin: 0}
    prev: dict[str, str | None] = {origin: None}
    settled = set()
    pq = [(0, origin)]
    while pq:
        cu, u = heapq.heappop(pq)
        if u in settled:
            continue
        settled.add(u)
        t = depart + cu
        prev_bus = prev[u]
        for v, bus, ride, times in adj[u]:
            if v in settled:
                continue
            if bus == prev_bus:
                x = cu + ride
            else:
                i = bisect_left(times, t)
                if i == len(times):
                    continue
                x = times[i] - t + cu + ride
            if x < cost.get(v, INF):
                cost[v] = x
                prev[v] = bus
                heapq.heappush(pq, (x, v))
    return cost

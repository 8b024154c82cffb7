"""Multi-POI route planning over visiting sequences.

A query asks for the cheapest route from an origin through every POI, in any
order. Each visiting order is a chain of OD legs; after arriving at a POI the
clock advances by its dwell time before the next leg departs. The final POI's
dwell is not charged.

``plan_naive`` evaluates every order with ``dsrs`` legs. ``plan_ea_star``
first ranks orders by a cheap lower bound (sum of exploration costs plus the
dwells that will be charged), evaluates them in that order with ``astar``
legs, and stops at the first order whose bound exceeds the best total found.
"""
from __future__ import annotations

import itertools
import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .graph import DmeGraph, exploration_cost
from .search import RouteLeg, Unreachable, astar, dsrs

DEFAULT_POI_CAP = 10

Search = Callable[[DmeGraph, str, str, int], RouteLeg]


class QueryError(ValueError):
    pass


class NoRoute(Exception):
    """Every visiting order hits an unreachable leg."""

    def __init__(self, query: TsmpQuery, unreachable: Mapping[str, int]):
        super().__init__(query)
        self.query = query
        # POI -> number of orders in which it was the unreachable leg target
        self.unreachable = dict(unreachable)

    def __str__(self):
        pois = ", ".join(sorted(self.unreachable, key=lambda p: -self.unreachable[p]))
        return f"no feasible route from {self.query.origin}; unreachable: {pois}"


@dataclass(frozen=True)
class TsmpQuery:
    origin: str
    depart: int
    pois: tuple[str, ...]
    dwell: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "pois", tuple(self.pois))
        dwell = dict(self.dwell)
        for p in self.pois:
            dwell.setdefault(p, 0)
        object.__setattr__(self, "dwell", dwell)
        if not self.pois:
            raise QueryError("at least one POI is required")
        if len(set(self.pois)) != len(self.pois):
            raise QueryError("POIs must be distinct")
        if self.origin in self.pois:
            raise QueryError(f"origin {self.origin} is also listed as a POI")
        if self.depart < 0:
            raise QueryError("departure time must be >= 0")
        extra = set(dwell) - set(self.pois)
        if extra:
            raise QueryError(f"dwell given for non-POI stop(s): {', '.join(sorted(extra))}")
        if any(d < 0 for d in dwell.values()):
            raise QueryError("dwell times must be >= 0")

    def check(self, g: DmeGraph, cap: int = DEFAULT_POI_CAP):
        for v in (self.origin, *self.pois):
            g.vertex(v)
        if len(self.pois) > cap:
            raise QueryError(f"{len(self.pois)} POIs exceed the cap of {cap} "
                             f"({math.factorial(len(self.pois))} orders)")


@dataclass(frozen=True)
class VisitSequence:
    order: tuple[str, ...]
    lower_bound: int = 0

    @property
    def pois(self) -> tuple[str, ...]:
        return self.order[1:]


@dataclass(frozen=True)
class CandidateRoute:
    sequence: VisitSequence
    legs: tuple[RouteLeg, ...]
    total_cost: int
    feasible: bool = True

    @property
    def dwell_total(self) -> int:
        return self.total_cost - sum(leg.cost for leg in self.legs)


@dataclass
class PlanResult:
    best: CandidateRoute
    sequences_total: int
    sequences_evaluated: int
    sequences_pruned: int
    elapsed: float
    pruned: list[VisitSequence] = field(default_factory=list, repr=False)
    evaluated: list[CandidateRoute] = field(default_factory=list, repr=False)


def charged_dwell(order: Sequence[str], dwell: Mapping[str, int]) -> int:
    # every POI but the last; order[0] is the origin
    return sum(dwell.get(p, 0) for p in order[1:-1])


def sequence_lower_bound(g: DmeGraph, seq: VisitSequence, dwell: Mapping[str, int]) -> int:
    o = seq.order
    return (sum(exploration_cost(g, a, b) for a, b in zip(o, o[1:]))
            + charged_dwell(o, dwell))


def evaluate_sequence(g: DmeGraph, seq: VisitSequence, query: TsmpQuery,
                      search: Search = astar) -> CandidateRoute:
    t = query.depart
    legs = []
    order = seq.order
    for i, (a, b) in enumerate(zip(order, order[1:])):
        try:
            leg = search(g, a, b, t)
        except Unreachable:
            return CandidateRoute(seq, tuple(legs), math.inf, feasible=False)
        legs.append(leg)
        t = leg.arrival
        if i < len(order) - 2:
            t += query.dwell[b]
    return CandidateRoute(seq, tuple(legs), t - query.depart)


def _sequences(query: TsmpQuery) -> list[tuple[str, ...]]:
    return [(query.origin, *p) for p in itertools.permutations(sorted(query.pois))]


def _better(c: CandidateRoute, best: CandidateRoute | None) -> bool:
    if not c.feasible:
        return False
    if best is None:
        return True
    return (c.total_cost, c.sequence.order) < (best.total_cost, best.sequence.order)


def plan_naive(g: DmeGraph, query: TsmpQuery, *, cap: int = DEFAULT_POI_CAP,
               search: Search = dsrs) -> PlanResult:
    """Evaluate all n! orders; ties go to the lexicographically smallest order."""
    query.check(g, cap)
    start = time.perf_counter()
    best = None
    evaluated = []
    for order in _sequences(query):
        c = evaluate_sequence(g, VisitSequence(order), query, search)
        evaluated.append(c)
        if _better(c, best):
            best = c
    elapsed = time.perf_counter() - start
    if best is None:
        raise NoRoute(query, _unreachable_counts(evaluated))
    return PlanResult(best, len(evaluated), len(evaluated), 0, elapsed, evaluated=evaluated)


def ranked_sequences(g: DmeGraph, query: TsmpQuery) -> list[VisitSequence]:
    """All orders with lower bounds, ascending by (bound, order)."""
    stops = [query.origin, *sorted(query.pois)]
    idx = {v: i for i, v in enumerate(stops)}
    h = [[exploration_cost(g, a, b) for b in stops] for a in stops]
    seqs = []
    for order in _sequences(query):
        ix = [idx[v] for v in order]
        bound = sum(h[a][b] for a, b in zip(ix, ix[1:])) + charged_dwell(order, query.dwell)
        seqs.append(VisitSequence(order, bound))
    seqs.sort(key=lambda s: (s.lower_bound, s.order))
    return seqs


def plan_ea_star(g: DmeGraph, query: TsmpQuery, *, cap: int = DEFAULT_POI_CAP,
                 prune: bool = True, search: Search = astar, workers: int = 1) -> PlanResult:
    """Bound-ordered evaluation with cutoff once bounds exceed the best total.

    With ``workers > 1`` orders are evaluated in batches on a thread pool; the
    cutoff is checked against the best total before each batch is dispatched,
    so a batch may include orders a sequential run would have pruned.
    """
    query.check(g, cap)
    start = time.perf_counter()
    seqs = ranked_sequences(g, query)
    best: CandidateRoute | None = None
    evaluated: list[CandidateRoute] = []
    lock = threading.Lock()

    def ub():
        return best.total_cost if best is not None else math.inf

    def consider(c):
        nonlocal best
        with lock:
            evaluated.append(c)
            if _better(c, best):
                best = c

    cut = len(seqs)
    if workers <= 1:
        for i, s in enumerate(seqs):
            if prune and s.lower_bound > ub():
                cut = i
                break
            consider(evaluate_sequence(g, s, query, search))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            i = 0
            while i < len(seqs):
                batch = []
                while i < len(seqs) and len(batch) < workers:
                    if prune and seqs[i].lower_bound > ub():
                        break
                    batch.append(seqs[i])
                    i += 1
                if not batch:
                    cut = i
                    break
                for c in pool.map(lambda s: evaluate_sequence(g, s, query, search), batch):
                    consider(c)
        evaluated.sort(key=lambda c: (c.sequence.lower_bound, c.sequence.order))
    elapsed = time.perf_counter() - start
    if best is None:
        raise NoRoute(query, _unreachable_counts(evaluated))
    pruned = seqs[cut:]
    return PlanResult(best, len(seqs), len(evaluated), len(pruned), elapsed,
                      pruned=pruned, evaluated=evaluated)


def plan_ordered(g: DmeGraph, query: TsmpQuery, *, cap: int = DEFAULT_POI_CAP,
                 search: Search = astar) -> PlanResult:
    """Visit POIs in the order given, without optimizing the order."""
    query.check(g, cap)
    start = time.perf_counter()
    c = evaluate_sequence(g, VisitSequence((query.origin, *query.pois)), query, search)
    elapsed = time.perf_counter() - start
    if not c.feasible:
        raise NoRoute(query, _unreachable_counts([c]))
    return PlanResult(c, 1, 1, 0, elapsed, evaluated=[c])


def _unreachable_counts(cands: Sequence[CandidateRoute]) -> dict[str, int]:
    out: dict[str, int] = {}
    for c in cands:
        if not c.feasible:
            target = c.sequence.order[len(c.legs) + 1]
            out[target] = out.get(target, 0) + 1
    return out

"""Minimum-damage routing over the weighted multigraph.

`gda` is single-source Dijkstra generalized to multigraphs: instead of
relaxing every parallel arc between an ordered node pair, it relaxes once
per pair using the pair's minimum arc weight from the min-weight multiset.
That collapse is sound because any path through a non-minimal parallel arc
is dominated by the same path through the minimal one (the all-arcs
variant `dijkstra_all_arcs` exists so tests can prove the equivalence).

`route` reconstructs the source-to-destination path and pins down ties,
which matter because clean arcs weigh exactly zero: among weight-equal
paths it returns the one with minimum total physical length, and among
those the lexicographically smallest arc-id sequence.  The search runs on
exact rational arithmetic so tie detection never depends on float
rounding; the reported totals are plain float sums over the chosen arcs.

Route trace format: one line `arc_id tail head weight length` per arc,
then `TOTAL weight length`.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .weighting import WeightedNetwork


class UnreachableError(Exception):
    """No directed path exists from the source to the requested destination."""


@dataclass(frozen=True)
class Route:
    source: str
    dest: str
    arcs: tuple[str, ...]
    total_weight: float
    total_length_m: float


@dataclass
class ShortestPathTree:
    """Per-node weight distance and predecessor (node, arc) from one source.

    Unreachable nodes carry an infinite distance and no predecessor.
    """

    source: str
    dist: dict[str, float]
    predecessor: dict[str, tuple[str, str]]


def _check_weights(wnet: WeightedNetwork) -> None:
    for arc_id, w in wnet.arc_weights.items():
        if w < 0:
            raise ValueError(f"negative weight {w} on arc {arc_id!r}")


def gda(wnet: WeightedNetwork, source: str) -> ShortestPathTree:
    """Single-source shortest path tree, relaxing one arc per ordered pair.

    For every node v, dist[v] is the minimum total weight over directed
    paths from the source, where each (u, v) hop may use any parallel arc
    and relaxation uses the pair minimum w_uv.  The predecessor records
    the arc achieving that minimum.
    """
    net = wnet.base
    net.node(source)
    _check_weights(wnet)

    dist = {n: math.inf for n in net.nodes}
    dist[source] = 0.0
    pred: dict[str, tuple[str, str]] = {}
    settled: set[str] = set()
    heap: list[tuple[float, str]] = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in settled or d > dist[u]:
            continue
        settled.add(u)
        for v in net.successors(u):
            w, arc_id = wnet.min_weights.get(u, v)
            cand = d + w
            if cand < dist[v]:
                dist[v] = cand
                pred[v] = (u, arc_id)
                heapq.heappush(heap, (cand, v))
    return ShortestPathTree(source, dist, pred)


def dijkstra_all_arcs(wnet: WeightedNetwork, source: str) -> dict[str, float]:
    """Reference variant relaxing every parallel arc individually."""
    net = wnet.base
    net.node(source)
    _check_weights(wnet)

    dist = {n: math.inf for n in net.nodes}
    dist[source] = 0.0
    settled: set[str] = set()
    heap: list[tuple[float, str]] = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in settled or d > dist[u]:
            continue
        settled.add(u)
        for arc in net.out_arcs(u):
            cand = d + wnet.arc_weights[arc.id]
            if cand < dist[arc.head]:
                dist[arc.head] = cand
                heapq.heappush(heap, (cand, arc.head))
    return dist


LexDist = tuple[Fraction, Fraction]  # (total weight, total length)


def _lex_dijkstra(wnet: WeightedNetwork, start: str, forward: bool) -> dict[str, LexDist]:
    """Exact (weight, length)-lexicographic distances from/to `start`.

    With forward=False the multigraph is traversed against arc direction,
    giving distances *to* `start`.  Per ordered pair only the arc with the
    minimal (weight, length) contribution is relaxed; parallel arcs worse
    on that key cannot appear on any (weight, length)-optimal path.
    """
    net = wnet.base
    adj: dict[str, list[tuple[str, Fraction, Fraction]]] = {n: [] for n in net.nodes}
    for (u, v) in net.pairs():
        best: tuple[Fraction, Fraction] | None = None
        for arc in net.arcs_between(u, v):
            cand = (Fraction(wnet.arc_weights[arc.id]), Fraction(arc.length_m))
            if best is None or cand < best:
                best = cand
        if forward:
            adj[u].append((v, best[0], best[1]))
        else:
            adj[v].append((u, best[0], best[1]))

    zero = Fraction(0)
    dist: dict[str, LexDist] = {start: (zero, zero)}
    settled: set[str] = set()
    heap: list[tuple[Fraction, Fraction, str]] = [(zero, zero, start)]
    while heap:
        dw, dl, u = heapq.heappop(heap)
        if u in settled or (dw, dl) > dist[u]:
            continue
        settled.add(u)
        for v, w, l in adj[u]:
            cand = (dw + w, dl + l)
            if v not in dist or cand < dist[v]:
                dist[v] = cand
                heapq.heappush(heap, (cand[0], cand[1], v))
    return dist


def route(wnet: WeightedNetwork, source: str, dest: str) -> Route:
    """Optimal route from source to dest under the tie-break hierarchy
    (total weight, then total length, then lexicographic arc-id sequence).

    Raises UnreachableError when no directed path exists.
    """
    net = wnet.base
    net.node(source)
    net.node(dest)
    _check_weights(wnet)
    if source == dest:
        return Route(source, dest, (), 0.0, 0.0)

    dist = _lex_dijkstra(wnet, source, forward=True)
    if dest not in dist:
        raise UnreachableError(f"no path from {source!r} to {dest!r}")
    rdist = _lex_dijkstra(wnet, dest, forward=False)
    target = dist[dest]

    # Every prefix of an optimal path is itself (weight, length)-optimal, so
    # standing at u the accumulated cost equals dist[u]; an arc e=(u,v) lies
    # on some optimal path iff dist[u] + cost(e) + rdist[v] hits the target.
    # Taking the smallest feasible arc id at each step yields the
    # lexicographically least optimal arc sequence.
    arcs: list[str] = []
    u = source
    while u != dest:
        du = dist[u]
        chosen = None
        for arc in net.out_arcs(u):
            r = rdist.get(arc.head)
            if r is None:
                continue
            w = Fraction(wnet.arc_weights[arc.id])
            l = Fraction(arc.length_m)
            if (du[0] + w + r[0], du[1] + l + r[1]) == target:
                chosen = arc
                break
        if chosen is None or len(arcs) > len(net.arcs):
            raise AssertionError("optimal-path reconstruction lost the target")
        arcs.append(chosen.id)
        u = chosen.head

    total_w = 0.0
    total_l = 0.0
    for arc_id in arcs:
        total_w += wnet.arc_weights[arc_id]
        total_l += net.arcs[arc_id].length_m
    return Route(source, dest, tuple(arcs), total_w, total_l)


def current_arc_weight(wnet: WeightedNetwork, arc_id: str) -> float:
    """Damage-level display for the arc the vehicle currently occupies."""
    return wnet.weight(arc_id)


@dataclass
class RoutingSession:
    """Event-driven per-vehicle routing state.

    The session is anchored at the vehicle's next upcoming node (the head
    of its current arc): a vehicle mid-arc always completes the arc before
    a new route takes effect.  With no destination set the session is in
    weight-display mode and reports the current arc's weight; node-crossing
    events re-evaluate the mode instead of any polling loop.
    """

    wnet: WeightedNetwork
    vehicle_id: str
    current_arc: str
    destination: str | None = None
    route: Route | None = None
    pending_arcs: list[str] = field(default_factory=list)

    @property
    def next_node(self) -> str:
        return self.wnet.base.arc(self.current_arc).head

    def advance(self, arc_id: str) -> None:
        """Record that the vehicle entered a new arc."""
        self.wnet.base.arc(arc_id)
        self.current_arc = arc_id

    def clear(self) -> None:
        self.destination = None
        self.route = None
        self.pending_arcs = []

    def display(self) -> Route | float:
        if self.destination is not None and self.route is not None:
            return self.route
        return current_arc_weight(self.wnet, self.current_arc)


def modify_destination(session: RoutingSession, new_dest: str | None) -> Route | float:
    """Set, change or clear the session destination.

    Setting a destination re-routes from the vehicle's next upcoming node
    and returns the fresh Route; clearing reverts to weight-display mode
    and returns the current arc weight; an unchanged destination is a
    no-op.
    """
    if new_dest == session.destination:
        return session.display()
    if new_dest is None:
        session.clear()
        return current_arc_weight(session.wnet, session.current_arc)
    session.wnet.base.node(new_dest)
    fresh = route(session.wnet, session.next_node, new_dest)
    session.destination = new_dest
    session.route = fresh
    session.pending_arcs = list(fresh.arcs)
    return fresh


def fmt_num(x: float) -> str:
    """Render integral floats without a trailing .0 (route traces, CLI)."""
    if x == int(x) and math.isfinite(x):
        return str(int(x))
    return repr(x)


def format_route_trace(wnet: WeightedNetwork, rt: Route) -> str:
    lines = []
    for arc_id in rt.arcs:
        arc = wnet.base.arcs[arc_id]
        lines.append(f"{arc.id} {arc.tail} {arc.head} "
                     f"{fmt_num(wnet.arc_weights[arc.id])} {fmt_num(arc.length_m)}")
    lines.append(f"TOTAL {fmt_num(rt.total_weight)} {fmt_num(rt.total_length_m)}")
    return "\n".join(lines) + "\n"

"""Shared test machinery: tiny builders, random instances, enumeration oracles.

The oracles here deliberately use brute force (DFS over simple paths,
per-cell scans) so they stay independent of the production code paths
they check.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

from potholesim.detection import PotholeDetection
from potholesim.network import Arc, Node, StreetNetwork
from potholesim.registry import PotholeRegistry
from potholesim.weighting import WeightedNetwork


def build_net(nodes, arcs) -> StreetNetwork:
    """nodes: (id, x, y) triples; arcs: (id, tail, head, length_m) quadruples."""
    return StreetNetwork([Node(*n) for n in nodes], [Arc(*a) for a in arcs])


def ingest(reg: PotholeRegistry, arc: str, offset: float, depth: float,
           vid: str = "v", now: int = 0, intensity: float = 0.5):
    return reg.ingest_report(PotholeDetection(arc, offset, depth, intensity), vid, now)


def random_network(rng: random.Random, max_nodes: int = 8, max_parallel: int = 3,
                   pair_p: float = 0.3, min_nodes: int = 2) -> StreetNetwork:
    n = rng.randint(min_nodes, max_nodes)
    names = [f"n{i}" for i in range(n)]
    nodes = [(name, float(i * 10), 0.0) for i, name in enumerate(names)]
    arcs = []
    k = 0
    for u in names:
        for v in names:
            if u != v and rng.random() < pair_p:
                for _ in range(rng.randint(1, max_parallel)):
                    arcs.append((f"a{k}", u, v, round(rng.uniform(1.0, 50.0), 3)))
                    k += 1
    if not arcs:
        arcs.append(("a0", names[0], names[1], round(rng.uniform(1.0, 50.0), 3)))
    return build_net(nodes, arcs)


def random_registry(rng: random.Random, net: StreetNetwork,
                    max_potholes: int = 6) -> PotholeRegistry:
    reg = PotholeRegistry(net)
    arc_ids = sorted(net.arcs)
    for i in range(rng.randint(0, max_potholes)):
        arc = net.arcs[rng.choice(arc_ids)]
        ingest(reg, arc.id, round(rng.uniform(0.0, arc.length_m), 3),
               round(rng.uniform(0.0, 80.0), 3), vid=f"v{i}", now=i)
    return reg


def enumerate_min_weight(wnet: WeightedNetwork, source: str, dest: str) -> float:
    """Exhaustive minimum path weight over simple node paths (pair-min arcs).

    Returns math.inf when dest is unreachable.  Accumulation is
    left-to-right, matching how a path's weight would be summed by hand.
    """
    if source == dest:
        return 0.0
    net = wnet.base
    best = math.inf

    def dfs(u: str, used: frozenset, acc: float) -> None:
        nonlocal best
        if acc > best:
            return
        for v in net.successors(u):
            if v in used:
                continue
            w, _ = wnet.min_weights.get(u, v)
            if v == dest:
                best = min(best, acc + w)
            else:
                dfs(v, used | {v}, acc + w)

    dfs(source, frozenset({source}), 0.0)
    return best


def enumerate_best_route(wnet: WeightedNetwork, source: str, dest: str):
    """Exhaustive minimum over arc-level simple paths under the full
    tie-break hierarchy (weight, length, lexicographic arc-id sequence).

    Exact rational arithmetic; returns (weight, length, arcs) or None.
    Intended for small graphs only.
    """
    if source == dest:
        return (Fraction(0), Fraction(0), ())
    net = wnet.base
    best = None

    def dfs(u, used, acc_w, acc_l, arcs):
        nonlocal best
        if u == dest:
            cand = (acc_w, acc_l, tuple(arcs))
            if best is None or cand < best:
                best = cand
            return
        for arc in net.out_arcs(u):
            if arc.head in used:
                continue
            dfs(arc.head, used | {arc.head},
                acc_w + Fraction(wnet.arc_weights[arc.id]),
                acc_l + Fraction(arc.length_m), arcs + [arc.id])

    dfs(source, frozenset({source}), Fraction(0), Fraction(0), [])
    return best


def close(a: float, b: float, rel: float = 1e-12) -> bool:
    return a == b or math.isclose(a, b, rel_tol=rel, abs_tol=0.0)

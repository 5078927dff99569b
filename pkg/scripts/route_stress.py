#!/usr/bin/env python3
"""Randomized optimality sweep for the multigraph router.

Generates random directed multigraphs with parallel arcs, weights them
from random registries, and checks route() against an exhaustive
simple-path enumeration for every reachable source/destination pair.

Usage: python scripts/route_stress.py [--graphs N] [--max-nodes N] [--seed S]
"""

import argparse
import math
import random
import time

from potholesim.detection import PotholeDetection
from potholesim.network import Arc, Node, StreetNetwork
from potholesim.registry import PotholeRegistry
from potholesim.routing import UnreachableError, route
from potholesim.weighting import preprocess


def random_instance(rng: random.Random, max_nodes: int):
    n = rng.randint(2, max_nodes)
    names = [f"n{i}" for i in range(n)]
    arcs, k = [], 0
    for u in names:
        for v in names:
            if u != v and rng.random() < 0.3:
                for _ in range(rng.randint(1, 3)):
                    arcs.append(Arc(f"a{k}", u, v, round(rng.uniform(1, 50), 3)))
                    k += 1
    if not arcs:
        arcs.append(Arc("a0", names[0], names[1], 10.0))
    net = StreetNetwork([Node(nm, float(i), 0.0) for i, nm in enumerate(names)], arcs)
    reg = PotholeRegistry(net)
    for i in range(rng.randint(0, 8)):
        arc = arcs[rng.randrange(len(arcs))]
        reg.ingest_report(PotholeDetection(arc.id, round(rng.uniform(0, arc.length_m), 3),
                                           round(rng.uniform(0, 80), 3), 0.5), f"v{i}", i)
    return net, preprocess(net, reg)


def enumerate_min(wnet, source, dest) -> float:
    net = wnet.base
    best = math.inf

    def dfs(u, used, acc):
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


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--graphs", type=int, default=500)
    parser.add_argument("--max-nodes", type=int, default=8)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    start = time.monotonic()
    pairs = mismatches = 0
    for g in range(args.graphs):
        net, wnet = random_instance(rng, args.max_nodes)
        nodes = sorted(net.nodes)
        for s in nodes:
            for d in nodes:
                if s == d:
                    continue
                expected = enumerate_min(wnet, s, d)
                try:
                    rt = route(wnet, s, d)
                except UnreachableError:
                    if not math.isinf(expected):
                        mismatches += 1
                        print(f"graph {g}: {s}->{d} unreachable but oracle found {expected}")
                    continue
                pairs += 1
                if not (rt.total_weight == expected
                        or math.isclose(rt.total_weight, expected, rel_tol=1e-12)):
                    mismatches += 1
                    print(f"graph {g}: {s}->{d} route {rt.total_weight} != oracle {expected}")
    elapsed = time.monotonic() - start
    print(f"{args.graphs} graphs, {pairs} reachable pairs, "
          f"{mismatches} mismatches, {elapsed:.1f}s")
    raise SystemExit(1 if mismatches else 0)


if __name__ == "__main__":
    main()

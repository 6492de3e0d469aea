#!/usr/bin/env python3
"""Benchmark the compiled path kernel against the pure-Python fallback.

Builds random connected graphs of growing size, runs identical
constrained shortest-path query batches through both kernels, checks
that the answers agree, and reports per-query times plus the speedup.

    python3 benchmarks/bench_cspf.py [--sizes 50,200,500] [--queries 200]
"""

import argparse
import math
import random
import sys
import time

from topoman import _cspf_py, topo
from topoman.topo import Link, Node, NodeKind, Topology

try:
    from topoman import _cspf_cy
except ImportError:
    _cspf_cy = None


def build_graph(n_nodes, avg_degree, rng):
    nodes = [Node(id=f"n{i:04d}", kind=NodeKind.SWITCH) for i in range(n_nodes)]
    edges = [(i, rng.randrange(i)) for i in range(1, n_nodes)]
    extra = int(n_nodes * (avg_degree - 2) / 2)
    for _ in range(max(extra, 0)):
        a, b = rng.randrange(n_nodes), rng.randrange(n_nodes)
        if a != b:
            edges.append((a, b))
    links = [
        Link(
            id=f"e{k:05d}",
            a=f"n{a:04d}",
            b=f"n{b:04d}",
            bandwidth_capacity=float(rng.randint(1, 100)),
            latency=float(rng.randint(1, 10)),
        )
        for k, (a, b) in enumerate(edges)
    ]
    return topo.routing_graph(Topology(nodes, links))


def make_queries(graph, count, rng):
    queries = []
    for _ in range(count):
        queries.append(
            (
                rng.randrange(graph.n_nodes),
                rng.randrange(graph.n_nodes),
                float(rng.randint(0, 40)),
                float(rng.randint(20, 200)) if rng.random() < 0.3 else math.inf,
                rng.randint(2, 12) if rng.random() < 0.2 else -1,
            )
        )
    return queries


def run_batch(kernel, graph, residual, queries):
    args_common = (
        graph.n_nodes, graph.adj_offsets, graph.adj_nodes, graph.adj_links,
        graph.latency, residual,
    )
    started = time.perf_counter()
    results = [
        kernel.shortest_feasible_path(*args_common, src, dst, bw, lat, hops)
        for src, dst, bw, lat, hops in queries
    ]
    return time.perf_counter() - started, results


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="50,200,500",
                        help="comma-separated node counts")
    parser.add_argument("--queries", type=int, default=200)
    parser.add_argument("--degree", type=float, default=4.0)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args(argv)

    if _cspf_cy is None:
        print("compiled kernel not built; run `pip install -e . --no-build-isolation`")
        return 1

    rng = random.Random(args.seed)
    print(f"{'nodes':>7} {'links':>7} {'pure ms/q':>11} {'compiled ms/q':>14} {'speedup':>8}")
    for size in (int(s) for s in args.sizes.split(",")):
        graph = build_graph(size, args.degree, rng)
        residual = graph.capacity.copy()
        for i in range(graph.n_links):
            residual[i] = float(rng.randint(0, int(graph.capacity[i])))
        queries = make_queries(graph, args.queries, rng)
        t_py, r_py = run_batch(_cspf_py, graph, residual, queries)
        t_cy, r_cy = run_batch(_cspf_cy, graph, residual, queries)
        if r_py != r_cy:
            print(f"KERNEL MISMATCH at {size} nodes", file=sys.stderr)
            return 2
        n_q = len(queries)
        print(
            f"{graph.n_nodes:>7} {graph.n_links:>7} "
            f"{1000 * t_py / n_q:>11.3f} {1000 * t_cy / n_q:>14.3f} "
            f"{t_py / t_cy:>7.1f}x"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())

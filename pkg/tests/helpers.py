"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately use different algorithms from the library:
exhaustive simple-path enumeration instead of label-setting search, and
breakpoint-sorted / independently coded bisection water-filling instead
of the library's bisection.
"""

import math

from topoman.topo import Link, Node, NodeKind, Topology


def switch_topology(n_nodes, links):
    """n switch nodes named n00..; links as (a_idx, b_idx, bw, latency)."""
    nodes = [Node(id=f"n{i:02d}", kind=NodeKind.SWITCH) for i in range(n_nodes)]
    link_objs = [
        Link(
            id=f"e{k:02d}",
            a=f"n{a:02d}",
            b=f"n{b:02d}",
            bandwidth_capacity=float(bw),
            latency=float(lat),
        )
        for k, (a, b, bw, lat) in enumerate(links)
    ]
    return Topology(nodes, link_objs)


def random_switch_topology(rng, max_nodes=10, max_links=20):
    """Random connected multigraph of switches; latencies collide often so
    the hop and lexicographic tie-breaks actually fire."""
    n = rng.randint(2, max_nodes)
    edges = []
    for i in range(1, n):
        edges.append((i, rng.randrange(i)))
    for _ in range(rng.randint(0, max(0, max_links - (n - 1)))):
        a = rng.randrange(n)
        b = rng.randrange(n)
        if a != b:
            edges.append((a, b))
    links = [
        (a, b, rng.randint(1, 10), rng.choice([0, 1, 1, 2, 3, 5]))
        for a, b in edges
    ]
    return switch_topology(n, links)


def two_host_topology(cpu=10.0, mem=10.0, io=10.0, bw=100.0, latency=1.0):
    """c1 -- sw -- c2 with one compute host on each side."""
    nodes = [
        Node(id="c1", kind=NodeKind.COMPUTE_NODE, cpu_capacity=cpu,
             mem_capacity=mem, io_capacity=io),
        Node(id="c2", kind=NodeKind.COMPUTE_NODE, cpu_capacity=cpu,
             mem_capacity=mem, io_capacity=io),
        Node(id="sw", kind=NodeKind.SWITCH),
    ]
    links = [
        Link(id="l1", a="c1", b="sw", bandwidth_capacity=bw, latency=latency),
        Link(id="l2", a="sw", b="c2", bandwidth_capacity=bw, latency=latency),
    ]
    return Topology(nodes, links)


def enumerate_best_path(graph, residual, src_idx, dst_idx, min_bw,
                        max_latency=None, max_hops=None):
    """Exhaustive oracle: every feasible simple path, minimized by
    (latency, hops, lexicographic link-index sequence). Returns the link
    index list or None."""
    max_lat = math.inf if max_latency is None else max_latency
    hop_cap = graph.n_nodes - 1
    if max_hops is not None:
        hop_cap = min(hop_cap, max_hops)
    best = None

    def extend(node, lat, seq, visited):
        nonlocal best
        if node == dst_idx:
            key = (lat, len(seq), tuple(seq))
            if best is None or key < best:
                best = key
            return
        if len(seq) == hop_cap:
            return
        for nxt, li in graph.arcs(node):
            if nxt in visited:
                continue
            if residual[li] < min_bw:
                continue
            nlat = lat + graph.latency[li]
            if nlat > max_lat:
                continue
            visited.add(nxt)
            seq.append(li)
            extend(nxt, nlat, seq, visited)
            seq.pop()
            visited.remove(nxt)

    extend(src_idx, 0.0, [], {src_idx})
    return None if best is None else list(best[2])


def waterfill_bisect(demands, weights, capacity, iterations=200):
    """Independent bisection water-filling (different bracket and loop
    structure from the library's)."""
    total = sum(demands)
    target = min(capacity, total)
    if target <= 0:
        return [0.0] * len(demands)
    lo = 0.0
    hi = max(d / w for d, w in zip(demands, weights) if w > 0)
    if hi == 0:
        return [0.0] * len(demands)
    for _ in range(iterations):
        mid = (lo + hi) / 2
        filled = sum(min(d, w * mid) for d, w in zip(demands, weights))
        if filled < target:
            lo = mid
        else:
            hi = mid
    level = (lo + hi) / 2
    return [min(d, w * level) for d, w in zip(demands, weights)]


def waterfill_exact(demands, weights, capacity):
    """Exact water-filling via saturation breakpoints sorted ascending."""
    n = len(demands)
    if sum(demands) <= capacity:
        return list(demands)
    order = sorted(range(n), key=lambda i: demands[i] / weights[i])
    shares = [0.0] * n
    saturated = 0.0
    active_weight = sum(weights)
    for pos, i in enumerate(order):
        level_i = demands[i] / weights[i]
        if saturated + level_i * active_weight >= capacity:
            level = (capacity - saturated) / active_weight
            for j in order[pos:]:
                shares[j] = weights[j] * level
            return shares
        shares[i] = demands[i]
        saturated += demands[i]
        active_weight -= weights[i]
    return shares

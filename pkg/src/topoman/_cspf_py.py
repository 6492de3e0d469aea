"""Pure-Python constrained shortest-path kernel.

Label-setting search over the routing substrate: links whose residual
bandwidth falls below the floor are pruned, then the search minimizes
(total latency, hop count, lexicographic link-index sequence). With a hop
bound the state space is (node, hops used); without one, plain per-node
settling suffices. Any optimum over walks is attained by a simple path
(removing a cycle strictly lowers the key), so the returned path never
repeats a node.

This module is the fallback for the compiled kernel in _cspf_cy; both
must stay behaviorally identical.
"""

import heapq


def shortest_feasible_path(
    n_nodes,
    adj_offsets,
    adj_nodes,
    adj_links,
    latency,
    residual,
    src,
    dst,
    min_bw,
    max_latency,
    max_hops,
):
    """Best feasible path from src to dst as a list of link indices.

    max_latency is +inf when unconstrained; max_hops is -1 when
    unconstrained. Returns None when no feasible path exists.
    """
    if src == dst:
        return []
    bounded = max_hops >= 0
    hop_cap = min(max_hops, n_nodes - 1) if bounded else n_nodes - 1
    if hop_cap <= 0:
        return None
    # plain lists index much faster than numpy scalars here
    if hasattr(adj_offsets, "tolist"):
        adj_offsets = adj_offsets.tolist()
    if hasattr(adj_nodes, "tolist"):
        adj_nodes = adj_nodes.tolist()
    if hasattr(adj_links, "tolist"):
        adj_links = adj_links.tolist()
    if hasattr(latency, "tolist"):
        latency = latency.tolist()
    if hasattr(residual, "tolist"):
        residual = residual.tolist()
    heap = [(0.0, 0, (), src)]
    settled = set()
    while heap:
        lat, hops, seq, node = heapq.heappop(heap)
        key = (node, hops) if bounded else node
        if key in settled:
            continue
        settled.add(key)
        if node == dst:
            return list(seq)
        if hops == hop_cap:
            continue
        nhops = hops + 1
        for a in range(adj_offsets[node], adj_offsets[node + 1]):
            li = adj_links[a]
            if residual[li] < min_bw:
                continue
            nlat = lat + latency[li]
            if nlat > max_latency:
                continue
            nxt = adj_nodes[a]
            nkey = (nxt, nhops) if bounded else nxt
            if nkey in settled:
                continue
            heapq.heappush(heap, (nlat, nhops, seq + (li,), nxt))
    return None

"""Hierarchical data-center topology model and its routing-graph view.

The topology is a directory of node and link mappings: grouping levels
(zones, blocks) organize the capacity-bearing hosts (servers, compute
nodes) and switches, while links connect the routable nodes. Topologies
are immutable after construction; every mutation means building a new
one.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from topoman.errors import ParseError, UnknownNodeError, ValidationError


class NodeKind(enum.Enum):
    ZONE = "zone"
    BLOCK = "block"
    SERVER = "server"
    COMPUTE_NODE = "compute"
    SWITCH = "switch"


GROUPING_KINDS = frozenset({NodeKind.ZONE, NodeKind.BLOCK})
COMPUTE_KINDS = frozenset({NodeKind.SERVER, NodeKind.COMPUTE_NODE})
ROUTABLE_KINDS = frozenset({NodeKind.SERVER, NodeKind.COMPUTE_NODE, NodeKind.SWITCH})

# strictly increasing along any parent -> child edge
_HIERARCHY_RANK = {
    NodeKind.ZONE: 0,
    NodeKind.BLOCK: 1,
    NodeKind.SERVER: 2,
    NodeKind.COMPUTE_NODE: 3,
    NodeKind.SWITCH: 3,
}


@dataclass(frozen=True)
class Node:
    id: str
    kind: NodeKind
    parent: str | None = None
    cpu_capacity: float = 0.0
    mem_capacity: float = 0.0
    io_capacity: float = 0.0

    @property
    def capacities(self) -> tuple[float, float, float]:
        return (self.cpu_capacity, self.mem_capacity, self.io_capacity)


@dataclass(frozen=True)
class Link:
    id: str
    a: str
    b: str
    bandwidth_capacity: float
    latency: float = 0.0

    def other_end(self, node_id: str) -> str:
        return self.b if node_id == self.a else self.a


@dataclass(frozen=True)
class ResourcePool:
    id: str
    members: tuple[str, ...]

    def aggregate_capacity(self, topology: "Topology") -> tuple[float, float, float]:
        """Sum of member capacities, recomputed on every call (never cached)."""
        cpu = mem = io = 0.0
        for member in self.members:
            node = topology.node(member)
            cpu += node.cpu_capacity
            mem += node.mem_capacity
            io += node.io_capacity
        return (cpu, mem, io)


@dataclass(frozen=True)
class Violation:
    """One broken invariant, identifying the offending element."""

    element_id: str
    rule: str
    message: str

    def __str__(self) -> str:
        return f"{self.element_id}: {self.rule}: {self.message}"


class Topology:
    """Immutable directory of nodes, links and resource pools.

    Elements are held in id-sorted order so that every derived iteration
    is deterministic.
    """

    def __init__(self, nodes=(), links=(), pools=()):
        self.nodes: tuple[Node, ...] = tuple(sorted(nodes, key=lambda n: n.id))
        self.links: tuple[Link, ...] = tuple(sorted(links, key=lambda l: l.id))
        self.pools: tuple[ResourcePool, ...] = tuple(sorted(pools, key=lambda p: p.id))
        self._node_by_id = {n.id: n for n in self.nodes}
        self._link_by_id = {l.id: l for l in self.links}

    def node(self, node_id: str) -> Node:
        try:
            return self._node_by_id[node_id]
        except KeyError:
            raise UnknownNodeError(f"unknown node {node_id!r}") from None

    def link(self, link_id: str) -> Link:
        return self._link_by_id[link_id]

    def has_node(self, node_id: str) -> bool:
        return node_id in self._node_by_id

    def compute_nodes(self) -> tuple[Node, ...]:
        return tuple(n for n in self.nodes if n.kind in COMPUTE_KINDS)


_KIND_BY_VALUE = {k.value: k for k in NodeKind}

_NODE_FIELDS = {"id", "kind", "parent", "cpu", "mem", "io"}
_LINK_FIELDS = {"id", "a", "b", "bw", "latency"}
_POOL_FIELDS = {"id", "members"}


def _number(entry, key, default=None, elem=""):
    value = entry.get(key, default)
    if value is None:
        raise ParseError(f"{elem}: missing numeric field {key!r}")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{elem}: field {key!r} must be a number, got {value!r}")
    return float(value)


def parse_topology(doc: dict) -> Topology:
    """Build a Topology from an already-parsed JSON document (unvalidated)."""
    if not isinstance(doc, dict):
        raise ParseError("topology document must be a JSON object")
    nodes = []
    for entry in doc.get("nodes", []):
        if not isinstance(entry, dict) or "id" not in entry or "kind" not in entry:
            raise ParseError(f"node entry missing 'id' or 'kind': {entry!r}")
        unknown = set(entry) - _NODE_FIELDS
        if unknown:
            raise ParseError(f"node {entry['id']!r}: unknown fields {sorted(unknown)}")
        kind = _KIND_BY_VALUE.get(entry["kind"])
        if kind is None:
            raise ParseError(f"node {entry['id']!r}: unknown kind {entry['kind']!r}")
        nodes.append(
            Node(
                id=str(entry["id"]),
                kind=kind,
                parent=entry.get("parent"),
                cpu_capacity=_number(entry, "cpu", 0.0, entry["id"]),
                mem_capacity=_number(entry, "mem", 0.0, entry["id"]),
                io_capacity=_number(entry, "io", 0.0, entry["id"]),
            )
        )
    links = []
    for entry in doc.get("links", []):
        if not isinstance(entry, dict) or not {"id", "a", "b"} <= set(entry):
            raise ParseError(f"link entry missing 'id'/'a'/'b': {entry!r}")
        unknown = set(entry) - _LINK_FIELDS
        if unknown:
            raise ParseError(f"link {entry['id']!r}: unknown fields {sorted(unknown)}")
        links.append(
            Link(
                id=str(entry["id"]),
                a=str(entry["a"]),
                b=str(entry["b"]),
                bandwidth_capacity=_number(entry, "bw", None, entry["id"]),
                latency=_number(entry, "latency", 0.0, entry["id"]),
            )
        )
    pools = []
    for entry in doc.get("pools", []):
        if not isinstance(entry, dict) or "id" not in entry:
            raise ParseError(f"pool entry missing 'id': {entry!r}")
        unknown = set(entry) - _POOL_FIELDS
        if unknown:
            raise ParseError(f"pool {entry['id']!r}: unknown fields {sorted(unknown)}")
        members = entry.get("members", [])
        if not isinstance(members, list):
            raise ParseError(f"pool {entry['id']!r}: 'members' must be a list")
        pools.append(ResourcePool(id=str(entry["id"]), members=tuple(str(m) for m in members)))
    return Topology(nodes, links, pools)


def load_topology(source) -> Topology:
    """Load and validate a topology from a JSON file path, file object or dict.

    Raises ParseError for malformed documents and ValidationError (naming
    the offending element) when any structural invariant is broken.
    """
    if isinstance(source, dict):
        doc = source
    else:
        if isinstance(source, (str, Path)):
            try:
                text = Path(source).read_text(encoding="utf-8")
            except OSError as exc:
                raise ParseError(f"cannot read topology file {source}: {exc}") from exc
        else:
            text = source.read()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"topology document is not valid JSON: {exc}") from exc
    topology = parse_topology(doc)
    violations = validate(topology)
    if violations:
        raise ValidationError(
            "; ".join(str(v) for v in violations), violations=violations
        )
    return topology


def validate(topology: Topology) -> list[Violation]:
    """Check every structural invariant; returns [] iff the topology is sound."""
    violations: list[Violation] = []
    seen_nodes: set[str] = set()
    for node in topology.nodes:
        if node.id in seen_nodes:
            violations.append(Violation(node.id, "duplicate-node-id", "node id repeats"))
        seen_nodes.add(node.id)
        for dim, cap in (("cpu", node.cpu_capacity), ("mem", node.mem_capacity), ("io", node.io_capacity)):
            if cap < 0:
                violations.append(
                    Violation(node.id, "negative-capacity", f"{dim} capacity {cap} < 0")
                )
        if node.kind in GROUPING_KINDS or node.kind is NodeKind.SWITCH:
            if any(c != 0 for c in node.capacities):
                violations.append(
                    Violation(
                        node.id,
                        "capacity-on-non-compute",
                        f"{node.kind.value} nodes must not carry capacity",
                    )
                )
        else:
            if all(c == 0 for c in node.capacities):
                violations.append(
                    Violation(
                        node.id,
                        "compute-without-capacity",
                        f"{node.kind.value} nodes must carry some capacity",
                    )
                )
        if node.parent is not None:
            if not topology.has_node(node.parent):
                violations.append(
                    Violation(node.id, "dangling-parent", f"parent {node.parent!r} does not exist")
                )
            else:
                parent = topology.node(node.parent)
                if _HIERARCHY_RANK[parent.kind] >= _HIERARCHY_RANK[node.kind]:
                    violations.append(
                        Violation(
                            node.id,
                            "hierarchy-order",
                            f"{node.kind.value} cannot be a child of {parent.kind.value}",
                        )
                    )

    # parent chains must form a forest: report each cycle once, by its smallest member
    state: dict[str, int] = {}  # 0 = visiting, 1 = done
    for node in topology.nodes:
        if node.id in state:
            continue
        chain = []
        cur: str | None = node.id
        while cur is not None and cur not in state and topology.has_node(cur):
            state[cur] = 0
            chain.append(cur)
            cur = topology.node(cur).parent
        if cur is not None and state.get(cur) == 0:
            cycle = chain[chain.index(cur):]
            violations.append(
                Violation(min(cycle), "hierarchy-cycle", f"parent chain cycles through {sorted(cycle)}")
            )
        for visited in chain:
            state[visited] = 1

    seen_links: set[str] = set()
    for link in topology.links:
        if link.id in seen_links:
            violations.append(Violation(link.id, "duplicate-link-id", "link id repeats"))
        seen_links.add(link.id)
        if link.a == link.b:
            violations.append(Violation(link.id, "self-loop", f"both endpoints are {link.a!r}"))
        for end in (link.a, link.b):
            if not topology.has_node(end):
                violations.append(
                    Violation(link.id, "dangling-endpoint", f"endpoint {end!r} does not exist")
                )
            elif topology.node(end).kind not in ROUTABLE_KINDS:
                violations.append(
                    Violation(
                        link.id,
                        "endpoint-not-routable",
                        f"endpoint {end!r} is a {topology.node(end).kind.value}",
                    )
                )
        if link.bandwidth_capacity <= 0:
            violations.append(
                Violation(link.id, "non-positive-bandwidth", f"bw {link.bandwidth_capacity} must be > 0")
            )
        if link.latency < 0:
            violations.append(Violation(link.id, "negative-latency", f"latency {link.latency} < 0"))

    seen_pools: set[str] = set()
    for pool in topology.pools:
        if pool.id in seen_pools:
            violations.append(Violation(pool.id, "duplicate-pool-id", "pool id repeats"))
        seen_pools.add(pool.id)
        for member in pool.members:
            if not topology.has_node(member):
                violations.append(
                    Violation(pool.id, "dangling-member", f"member {member!r} does not exist")
                )
            elif topology.node(member).kind not in COMPUTE_KINDS:
                violations.append(
                    Violation(
                        pool.id,
                        "non-compute-member",
                        f"member {member!r} is a {topology.node(member).kind.value}",
                    )
                )
    return violations


@dataclass(frozen=True)
class RoutingGraph:
    """Adjacency view over the routable nodes and all links.

    Node and link indices follow the id-sorted order, which makes the view
    stable across calls and lets the path kernels compare link-id sequences
    lexicographically by comparing index sequences.
    """

    node_ids: tuple[str, ...]
    link_ids: tuple[str, ...]
    endpoints: tuple[tuple[int, int], ...]  # per link index
    latency: np.ndarray  # float64 per link index
    capacity: np.ndarray  # float64 per link index
    adj_offsets: np.ndarray = field(repr=False)  # int32, len = n_nodes + 1
    adj_nodes: np.ndarray = field(repr=False)  # int32 arc target node index
    adj_links: np.ndarray = field(repr=False)  # int32 arc link index
    _node_index: dict = field(repr=False)
    _link_index: dict = field(repr=False)

    @property
    def n_nodes(self) -> int:
        return len(self.node_ids)

    @property
    def n_links(self) -> int:
        return len(self.link_ids)

    def node_index(self, node_id: str) -> int:
        try:
            return self._node_index[node_id]
        except KeyError:
            raise UnknownNodeError(f"node {node_id!r} is not in the routing graph") from None

    def link_index(self, link_id: str) -> int:
        return self._link_index[link_id]

    def has_node(self, node_id: str) -> bool:
        return node_id in self._node_index

    def arcs(self, node_idx: int):
        """(target node index, link index) pairs, sorted by link index."""
        lo, hi = self.adj_offsets[node_idx], self.adj_offsets[node_idx + 1]
        for a in range(lo, hi):
            yield int(self.adj_nodes[a]), int(self.adj_links[a])


def routing_graph(topology: Topology) -> RoutingGraph:
    """Project the topology onto its routing substrate (switches and hosts)."""
    node_ids = tuple(n.id for n in topology.nodes if n.kind in ROUTABLE_KINDS)
    node_index = {nid: i for i, nid in enumerate(node_ids)}
    link_ids = tuple(l.id for l in topology.links)
    endpoints = []
    latency = np.zeros(len(link_ids), dtype=np.float64)
    capacity = np.zeros(len(link_ids), dtype=np.float64)
    arcs: list[list[tuple[int, int]]] = [[] for _ in node_ids]
    for li, lid in enumerate(link_ids):
        link = topology.link(lid)
        ai, bi = node_index[link.a], node_index[link.b]
        endpoints.append((ai, bi))
        latency[li] = link.latency
        capacity[li] = link.bandwidth_capacity
        arcs[ai].append((bi, li))
        arcs[bi].append((ai, li))
    offsets = np.zeros(len(node_ids) + 1, dtype=np.int32)
    flat_nodes = []
    flat_links = []
    for i, out in enumerate(arcs):
        out.sort(key=lambda t: t[1])
        offsets[i + 1] = offsets[i] + len(out)
        for tgt, li in out:
            flat_nodes.append(tgt)
            flat_links.append(li)
    return RoutingGraph(
        node_ids=node_ids,
        link_ids=link_ids,
        endpoints=tuple(endpoints),
        latency=latency,
        capacity=capacity,
        adj_offsets=offsets,
        adj_nodes=np.asarray(flat_nodes, dtype=np.int32),
        adj_links=np.asarray(flat_links, dtype=np.int32),
        _node_index=node_index,
        _link_index={lid: i for i, lid in enumerate(link_ids)},
    )

"""Path computation element: multi-constraint path selection plus the
path allocation table.

compute_path picks, among the simple paths whose links all keep at least
the requested residual bandwidth and which respect the latency/hop bounds,
the one minimizing total latency, breaking ties by hop count and then by
the lexicographically smallest link-id sequence. The allocation table
caches computed paths per (source, destination, constraints) key and
serves a cached path as long as it is still feasible, even if a better
one has become available — the table exists to avoid recomputation, not
to re-optimize.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from topoman import _kernel
from topoman.errors import (
    InsufficientBandwidthError,
    OverReleaseError,
    ValidationError,
)
from topoman.topo import RoutingGraph


@dataclass(frozen=True)
class PathConstraints:
    min_residual_bandwidth: float = 0.0
    max_latency: float | None = None
    max_hops: int | None = None

    def __post_init__(self):
        if self.min_residual_bandwidth < 0:
            raise ValidationError("min_residual_bandwidth must be >= 0")
        if self.max_latency is not None and self.max_latency < 0:
            raise ValidationError("max_latency must be >= 0")
        if self.max_hops is not None and self.max_hops < 0:
            raise ValidationError("max_hops must be >= 0")


@dataclass(frozen=True)
class Path:
    """A simple path, as the ordered link ids from source to destination.

    bottleneck_bandwidth reflects the residual state at the moment the
    Path object was produced. An empty path (source == destination) has
    latency 0, zero hops and an infinite bottleneck.
    """

    link_ids: tuple[str, ...]
    source: str
    destination: str
    total_latency: float
    hop_count: int
    bottleneck_bandwidth: float


class NoFeasiblePath:
    """Sentinel result: the feasible path set is empty."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NoFeasiblePath"


NO_FEASIBLE_PATH = NoFeasiblePath()


class CacheOutcome(enum.Enum):
    HIT = "hit"
    MISS = "miss"
    STALE_RECOMPUTE = "stale_recompute"


class ResidualState:
    """Per-link residual bandwidth, bound to one routing graph.

    Owned by a single simulation run; reserve/release mutate in place
    after validating their preconditions, so a failed call leaves the
    state untouched.
    """

    def __init__(self, graph: RoutingGraph, residual: np.ndarray | None = None):
        self.graph = graph
        if residual is None:
            residual = graph.capacity.copy()
        else:
            residual = np.asarray(residual, dtype=np.float64).copy()
            if residual.shape != graph.capacity.shape:
                raise ValidationError("residual array does not match link count")
        self.residual = residual

    @classmethod
    def full(cls, graph: RoutingGraph) -> "ResidualState":
        return cls(graph)

    def of(self, link_id: str) -> float:
        return float(self.residual[self.graph.link_index(link_id)])

    def as_dict(self) -> dict[str, float]:
        return {lid: float(self.residual[i]) for i, lid in enumerate(self.graph.link_ids)}

    def copy(self) -> "ResidualState":
        return ResidualState(self.graph, self.residual)

    def __eq__(self, other):
        return (
            isinstance(other, ResidualState)
            and self.graph.link_ids == other.graph.link_ids
            and np.array_equal(self.residual, other.residual)
        )


def _link_indices(graph: RoutingGraph, path: Path) -> list[int]:
    return [graph.link_index(lid) for lid in path.link_ids]


def _materialize(graph: RoutingGraph, residuals: ResidualState, src: str, dst: str,
                 link_idxs: list[int]) -> Path:
    total = 0.0
    bottleneck = math.inf
    for li in link_idxs:
        total += float(graph.latency[li])
        bottleneck = min(bottleneck, float(residuals.residual[li]))
    return Path(
        link_ids=tuple(graph.link_ids[li] for li in link_idxs),
        source=src,
        destination=dst,
        total_latency=total,
        hop_count=len(link_idxs),
        bottleneck_bandwidth=bottleneck,
    )


def compute_path(
    graph: RoutingGraph,
    residuals: ResidualState,
    src: str,
    dst: str,
    constraints: PathConstraints,
) -> Path | NoFeasiblePath:
    """Run the path kernel; raises UnknownNodeError for absent endpoints."""
    src_idx = graph.node_index(src)
    dst_idx = graph.node_index(dst)
    max_latency = math.inf if constraints.max_latency is None else float(constraints.max_latency)
    max_hops = -1 if constraints.max_hops is None else int(constraints.max_hops)
    link_idxs = _kernel.shortest_feasible_path(
        graph.n_nodes,
        graph.adj_offsets,
        graph.adj_nodes,
        graph.adj_links,
        graph.latency,
        residuals.residual,
        src_idx,
        dst_idx,
        float(constraints.min_residual_bandwidth),
        max_latency,
        max_hops,
    )
    if link_idxs is None:
        return NO_FEASIBLE_PATH
    return _materialize(graph, residuals, src, dst, [int(i) for i in link_idxs])


class PathAllocationTable:
    """Keyed cache of previously computed paths with outcome counters.

    Invariant maintained here: computations == misses + stale_recomputes.
    Feasibility failures are never cached (residuals shift with every
    allocation, so a negative result would go stale immediately).
    """

    def __init__(self):
        self._entries: dict[tuple, tuple[int, ...]] = {}
        self.hits = 0
        self.misses = 0
        self.stale_recomputes = 0
        self.computations = 0

    def __len__(self):
        return len(self._entries)

    def counters(self) -> dict[str, int]:
        return {
            "hits": self.hits,
            "misses": self.misses,
            "stale_recomputes": self.stale_recomputes,
            "computations": self.computations,
        }


def lookup_or_compute(
    table: PathAllocationTable,
    graph: RoutingGraph,
    residuals: ResidualState,
    src: str,
    dst: str,
    constraints: PathConstraints,
) -> tuple[Path | NoFeasiblePath, CacheOutcome]:
    """Serve from the allocation table, recomputing only when needed.

    A cached entry is revalidated against current residuals before being
    served; only the bandwidth floor can go stale since latency and hop
    structure are static and part of the key.
    """
    key = (src, dst, constraints)
    cached = table._entries.get(key)
    if cached is not None:
        if all(residuals.residual[li] >= constraints.min_residual_bandwidth for li in cached):
            table.hits += 1
            return _materialize(graph, residuals, src, dst, list(cached)), CacheOutcome.HIT
        outcome = CacheOutcome.STALE_RECOMPUTE
        table.stale_recomputes += 1
    else:
        outcome = CacheOutcome.MISS
        table.misses += 1
    table.computations += 1
    result = compute_path(graph, residuals, src, dst, constraints)
    if isinstance(result, NoFeasiblePath):
        table._entries.pop(key, None)
    else:
        table._entries[key] = tuple(_link_indices(graph, result))
    return result, outcome


def reserve(residuals: ResidualState, path: Path, bandwidth: float) -> ResidualState:
    """Subtract bandwidth along the path; the whole call succeeds or no-ops."""
    if bandwidth < 0:
        raise ValidationError("reserve amount must be >= 0")
    idxs = _link_indices(residuals.graph, path)
    for li in idxs:
        if residuals.residual[li] < bandwidth:
            raise InsufficientBandwidthError(
                f"link {residuals.graph.link_ids[li]!r} has residual "
                f"{residuals.residual[li]}, cannot reserve {bandwidth}"
            )
    for li in idxs:
        residuals.residual[li] -= bandwidth
    return residuals


def release(residuals: ResidualState, path: Path, bandwidth: float) -> ResidualState:
    """Give bandwidth back along the path; never exceeds link capacity."""
    if bandwidth < 0:
        raise ValidationError("release amount must be >= 0")
    idxs = _link_indices(residuals.graph, path)
    for li in idxs:
        if residuals.residual[li] + bandwidth > residuals.graph.capacity[li]:
            raise OverReleaseError(
                f"link {residuals.graph.link_ids[li]!r} would exceed capacity "
                f"{residuals.graph.capacity[li]} after releasing {bandwidth}"
            )
    for li in idxs:
        residuals.residual[li] += bandwidth
    return residuals

"""Admission pipeline: application handler, SLA gate, resource gate,
path computation, allocation.

The gates run in a fixed order and short-circuit: an SLA violation
terminates the request before any resource or path work happens, a
resource shortfall terminates it before path computation. State is
touched only when a request is admitted; rejections leave compute and
link state bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from topoman import pce
from topoman.errors import (
    DuplicateRequestIdError,
    UnknownNodeError,
    ValidationError,
)
from topoman.sla import SlaPolicy, SlaViolation, check_sla
from topoman.topo import COMPUTE_KINDS, Topology

RESOURCE_DIMENSIONS = ("cpu", "mem", "io")


@dataclass(frozen=True)
class Request:
    """A resource-and-path demand, the unit of admission.

    target is the compute host the job would run on; source/destination
    bound the network path. usage_fraction is the share of the granted
    CPU allocation the job actually consumes while running.
    """

    id: str
    source: str
    destination: str
    target: str
    cpu_demand: float = 0.0
    mem_demand: float = 0.0
    io_demand: float = 0.0
    bandwidth_demand: float = 0.0
    duration: int = 1
    arrival_time: int = 0
    usage_fraction: float = 1.0

    def __post_init__(self):
        for dim in ("cpu_demand", "mem_demand", "io_demand", "bandwidth_demand"):
            value = getattr(self, dim)
            if not (value >= 0) or value == float("inf"):
                raise ValidationError(f"request {self.id!r}: {dim} must be finite and >= 0")
        if self.duration <= 0:
            raise ValidationError(f"request {self.id!r}: duration must be > 0")
        if not 0.0 <= self.usage_fraction <= 1.0:
            raise ValidationError(f"request {self.id!r}: usage_fraction must be in [0, 1]")

    def demands(self) -> tuple[float, float, float]:
        return (self.cpu_demand, self.mem_demand, self.io_demand)


@dataclass(frozen=True)
class Lease:
    request_id: str
    target: str
    path: pce.Path
    cpu: float
    mem: float
    io: float
    bandwidth: float
    start: int
    end: int


@dataclass(frozen=True)
class InsufficientResources:
    """Resource-gate rejection; score is set by score-based schemes."""

    dimension: str
    score: float | None = None


@dataclass(frozen=True)
class Admitted:
    request_id: str
    path: pce.Path
    lease: Lease


@dataclass(frozen=True)
class Rejected:
    request_id: str
    # one of: tuple[SlaViolation, ...] | InsufficientResources | NoFeasiblePath
    reason: object


AllocationDecision = Admitted | Rejected


class ComputeState:
    """Per compute-node allocated totals for cpu/mem/io."""

    def __init__(self, topology: Topology):
        self._topology = topology
        self._alloc: dict[str, list[float]] = {}

    def allocated(self, node_id: str) -> tuple[float, float, float]:
        got = self._alloc.get(node_id)
        return (0.0, 0.0, 0.0) if got is None else tuple(got)

    def free(self, node_id: str) -> tuple[float, float, float]:
        node = self._topology.node(node_id)
        alloc = self.allocated(node_id)
        return tuple(cap - used for cap, used in zip(node.capacities, alloc))

    def add(self, node_id: str, cpu: float, mem: float, io: float) -> None:
        slot = self._alloc.setdefault(node_id, [0.0, 0.0, 0.0])
        slot[0] += cpu
        slot[1] += mem
        slot[2] += io

    def subtract(self, node_id: str, cpu: float, mem: float, io: float) -> None:
        self.add(node_id, -cpu, -mem, -io)
        if all(v == 0 for v in self._alloc[node_id]):
            del self._alloc[node_id]

    def snapshot(self) -> dict[str, tuple[float, float, float]]:
        return {nid: tuple(vals) for nid, vals in sorted(self._alloc.items())}

    def __eq__(self, other):
        return isinstance(other, ComputeState) and self.snapshot() == other.snapshot()


@dataclass
class ApplicationHandler:
    """Registers incoming requests and runs the SLA compliance check."""

    _registered: set = field(default_factory=set)

    def handle(self, request: Request, policy: SlaPolicy) -> list[SlaViolation]:
        if request.id in self._registered:
            raise DuplicateRequestIdError(f"request id {request.id!r} already registered")
        self._registered.add(request.id)
        return check_sla(request, policy)

    def registered(self, request_id: str) -> bool:
        return request_id in self._registered


def handle_application(handler: ApplicationHandler, request: Request,
                       policy: SlaPolicy) -> list[SlaViolation]:
    return handler.handle(request, policy)


def check_resources(request: Request, compute_state: ComputeState,
                    topology: Topology) -> InsufficientResources | None:
    """None when the target can hold the demands (boundary inclusive),
    else the first failing dimension in cpu, mem, io order."""
    if not topology.has_node(request.target):
        raise UnknownNodeError(f"target node {request.target!r} does not exist")
    free = compute_state.free(request.target)
    for dim, avail, demand in zip(RESOURCE_DIMENSIONS, free, request.demands()):
        if demand > avail:
            return InsufficientResources(dimension=dim)
    return None


def admit(
    request: Request,
    policy: SlaPolicy,
    compute_state: ComputeState,
    residuals: pce.ResidualState,
    path_table: pce.PathAllocationTable,
    topology: Topology,
    now: int,
    handler: ApplicationHandler,
    resource_gate=None,
) -> AllocationDecision:
    """Run the full pipeline for one request at time `now`.

    resource_gate replaces the plain availability check when a baseline
    scheme is driving the pipeline; it must return None to admit or an
    InsufficientResources to reject.
    """
    violations = handler.handle(request, policy)
    if violations:
        return Rejected(request_id=request.id, reason=tuple(violations))

    gate = resource_gate if resource_gate is not None else check_resources
    shortfall = gate(request, compute_state, topology)
    if shortfall is not None:
        return Rejected(request_id=request.id, reason=shortfall)

    constraints = pce.PathConstraints(
        min_residual_bandwidth=request.bandwidth_demand,
        max_latency=policy.max_path_latency,
    )
    path, _outcome = pce.lookup_or_compute(
        path_table, residuals.graph, residuals, request.source,
        request.destination, constraints,
    )
    if isinstance(path, pce.NoFeasiblePath):
        return Rejected(request_id=request.id, reason=path)

    pce.reserve(residuals, path, request.bandwidth_demand)
    compute_state.add(request.target, *request.demands())
    lease = Lease(
        request_id=request.id,
        target=request.target,
        path=path,
        cpu=request.cpu_demand,
        mem=request.mem_demand,
        io=request.io_demand,
        bandwidth=request.bandwidth_demand,
        start=now,
        end=now + request.duration,
    )
    return Admitted(request_id=request.id, path=path, lease=lease)


def expire_leases(
    compute_state: ComputeState,
    residuals: pce.ResidualState,
    leases: dict[str, Lease],
    now: int,
) -> list[str]:
    """Release every lease whose end time has passed (boundary inclusive);
    returns the released request ids, sorted."""
    due = sorted(rid for rid, lease in leases.items() if lease.end <= now)
    for rid in due:
        lease = leases.pop(rid)
        compute_state.subtract(lease.target, lease.cpu, lease.mem, lease.io)
        pce.release(residuals, lease.path, lease.bandwidth)
    return due

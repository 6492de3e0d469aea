"""Comparison admission schemes sharing the main pipeline.

Both schemes replace only the resource-availability gate; the SLA gate
and path computation are identical across all three, so the schemes
differ in exactly one decision. The rules here are parameterized
reconstructions of commonly compared admission policies, not calibrated
models; defaults are illustrative and scenario-overridable.

- realistic: product logic. One headroom membership per dimension,
  mu_d = clamp(1 - projected_utilization_d, 0, 1); a request is admitted
  when the product of memberships clears the threshold and no dimension
  would exceed capacity. A request demanding nothing is always admissible
  on a node that is not already over capacity.
- capacity-aware: risk-inflated demands for cpu and I/O (factors >= 1),
  memory taken at face value.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from topoman import admission, pce
from topoman.admission import (
    AllocationDecision,
    ApplicationHandler,
    ComputeState,
    InsufficientResources,
    Request,
)
from topoman.errors import UnknownNodeError, ValidationError
from topoman.sla import SlaPolicy
from topoman.topo import Topology


class Scheme(enum.Enum):
    PROPOSED = "proposed"
    REALISTIC = "realistic"
    CAPACITY_AWARE = "capacity-aware"


@dataclass(frozen=True)
class RealisticParams:
    theta: float = 0.2

    def __post_init__(self):
        if not 0.0 < self.theta <= 1.0:
            raise ValidationError(f"theta must be in (0, 1], got {self.theta}")


@dataclass(frozen=True)
class CapacityAwareParams:
    risk_cpu: float = 1.3
    risk_io: float = 1.3

    def __post_init__(self):
        if self.risk_cpu < 1.0 or self.risk_io < 1.0:
            raise ValidationError("risk factors must be >= 1")


def _projected_utilization(allocated: float, demand: float, capacity: float) -> float:
    if capacity == 0:
        return 0.0 if allocated + demand == 0 else 2.0  # off the scale
    return (allocated + demand) / capacity


def realistic_admit(
    request: Request,
    compute_state: ComputeState,
    topology: Topology,
    params: RealisticParams,
) -> InsufficientResources | None:
    """None to admit; a rejection carries the product score for logging."""
    if not topology.has_node(request.target):
        raise UnknownNodeError(f"target node {request.target!r} does not exist")
    node = topology.node(request.target)
    allocated = compute_state.allocated(request.target)
    projected = [
        _projected_utilization(alloc, demand, cap)
        for alloc, demand, cap in zip(allocated, request.demands(), node.capacities)
    ]
    score = 1.0
    for util in projected:
        score *= min(max(1.0 - util, 0.0), 1.0)
    for dim, util in zip(admission.RESOURCE_DIMENSIONS, projected):
        if util > 1.0:
            return InsufficientResources(dimension=dim, score=score)
    if all(d == 0 for d in request.demands()):
        return None
    if score >= params.theta:
        return None
    return InsufficientResources(dimension="score", score=score)


def capacity_aware_admit(
    request: Request,
    compute_state: ComputeState,
    topology: Topology,
    params: CapacityAwareParams,
) -> InsufficientResources | None:
    """Risk-inflated feasibility; rejects name the first failing dimension
    in cpu, io, mem order."""
    if not topology.has_node(request.target):
        raise UnknownNodeError(f"target node {request.target!r} does not exist")
    node = topology.node(request.target)
    alloc_cpu, alloc_mem, alloc_io = compute_state.allocated(request.target)
    checks = (
        ("cpu", alloc_cpu + params.risk_cpu * request.cpu_demand, node.cpu_capacity),
        ("io", alloc_io + params.risk_io * request.io_demand, node.io_capacity),
        ("mem", alloc_mem + request.mem_demand, node.mem_capacity),
    )
    for dim, needed, capacity in checks:
        if needed > capacity:
            return InsufficientResources(dimension=dim)
    return None


def resource_gate(scheme: Scheme, realistic_params: RealisticParams | None = None,
                  capacity_params: CapacityAwareParams | None = None):
    """The availability gate the pipeline should run for a scheme."""
    if scheme is Scheme.PROPOSED:
        return None  # pipeline default: plain check_resources
    if scheme is Scheme.REALISTIC:
        params = realistic_params or RealisticParams()
        return lambda request, state, topo: realistic_admit(request, state, topo, params)
    params = capacity_params or CapacityAwareParams()
    return lambda request, state, topo: capacity_aware_admit(request, state, topo, params)


def baseline_pipeline(
    request: Request,
    scheme: Scheme,
    policy: SlaPolicy,
    compute_state: ComputeState,
    residuals: pce.ResidualState,
    path_table: pce.PathAllocationTable,
    topology: Topology,
    now: int,
    handler: ApplicationHandler,
    realistic_params: RealisticParams | None = None,
    capacity_params: CapacityAwareParams | None = None,
) -> AllocationDecision:
    """admission.admit with the scheme's availability rule swapped in;
    Scheme.PROPOSED reduces exactly to admission.admit."""
    gate = resource_gate(scheme, realistic_params, capacity_params)
    return admission.admit(
        request, policy, compute_state, residuals, path_table, topology, now,
        handler, resource_gate=gate,
    )

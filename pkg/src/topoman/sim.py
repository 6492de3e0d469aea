"""Deterministic discrete-event simulator for batch workloads.

Time is integer ticks. Events at one tick are processed as expiries,
then arrivals, then admission attempts, then samples, with ties broken
by payload id, so a run is a pure function of (topology, trace, scheme,
parameters): replaying the same inputs yields a bit-identical result.
Rejected requests are dropped, never retried.
"""

from __future__ import annotations

import enum
import heapq
import json
import random
from collections import deque
from dataclasses import dataclass
from pathlib import Path as FsPath

from topoman import admission, baselines, fairshare, metrics, pce, topo
from topoman.admission import (
    Admitted,
    ApplicationHandler,
    ComputeState,
    InsufficientResources,
    Lease,
    Rejected,
    Request,
)
from topoman.baselines import CapacityAwareParams, RealisticParams, Scheme
from topoman.errors import (
    InvalidRangeError,
    ParseError,
    SchedulerStallError,
    ValidationError,
)
from topoman.metrics import UtilizationSeries
from topoman.sla import SlaPolicy
from topoman.topo import COMPUTE_KINDS, Topology, Violation

_TRACE_FIELDS = {"id", "arrival", "src", "dst", "target", "cpu", "mem", "io",
                 "bw", "duration", "usage_fraction"}


class EventKind(enum.IntEnum):
    """Tick-internal processing order; lower runs first."""

    LEASE_EXPIRY = 0
    ARRIVAL = 1
    ADMISSION_ATTEMPT = 2
    SAMPLE = 3

    @property
    def label(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class WorkloadTrace:
    requests: tuple[Request, ...]

    def __post_init__(self):
        arrivals = [r.arrival_time for r in self.requests]
        if any(b < a for a, b in zip(arrivals, arrivals[1:])):
            raise ValidationError("trace arrival times must be non-decreasing")
        ids = [r.id for r in self.requests]
        if len(set(ids)) != len(ids):
            raise ValidationError("trace request ids must be unique")

    def horizon(self) -> int:
        return max((r.arrival_time + r.duration for r in self.requests), default=0)

    def usage_model(self) -> dict[str, float]:
        return {r.id: r.usage_fraction for r in self.requests}

    def validate_against(self, topology: Topology) -> list[Violation]:
        """Cross-checks that only make sense with the topology at hand."""
        violations = []
        graph = topo.routing_graph(topology)
        for r in self.requests:
            for role, node_id in (("src", r.source), ("dst", r.destination)):
                if not graph.has_node(node_id):
                    violations.append(
                        Violation(r.id, f"unknown-{role}", f"{role} {node_id!r} is not routable")
                    )
            if not topology.has_node(r.target):
                violations.append(
                    Violation(r.id, "unknown-target", f"target {r.target!r} does not exist")
                )
            elif topology.node(r.target).kind not in COMPUTE_KINDS:
                violations.append(
                    Violation(
                        r.id,
                        "target-not-compute",
                        f"target {r.target!r} is a {topology.node(r.target).kind.value}",
                    )
                )
        return violations


def parse_trace(doc) -> WorkloadTrace:
    if not isinstance(doc, list):
        raise ParseError("trace document must be a JSON array of request records")
    requests = []
    for entry in doc:
        if not isinstance(entry, dict) or "id" not in entry:
            raise ParseError(f"trace entry missing 'id': {entry!r}")
        unknown = set(entry) - _TRACE_FIELDS
        if unknown:
            raise ParseError(f"request {entry['id']!r}: unknown fields {sorted(unknown)}")
        try:
            requests.append(
                Request(
                    id=str(entry["id"]),
                    source=str(entry["src"]),
                    destination=str(entry["dst"]),
                    target=str(entry["target"]),
                    cpu_demand=float(entry.get("cpu", 0)),
                    mem_demand=float(entry.get("mem", 0)),
                    io_demand=float(entry.get("io", 0)),
                    bandwidth_demand=float(entry.get("bw", 0)),
                    duration=int(entry["duration"]),
                    arrival_time=int(entry["arrival"]),
                    usage_fraction=float(entry.get("usage_fraction", 1.0)),
                )
            )
        except KeyError as exc:
            raise ParseError(f"request {entry['id']!r}: missing field {exc}") from exc
    return WorkloadTrace(requests=tuple(requests))


def load_trace(source) -> WorkloadTrace:
    if isinstance(source, list):
        return parse_trace(source)
    try:
        text = FsPath(source).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read trace file {source}: {exc}") from exc
    try:
        return parse_trace(json.loads(text))
    except json.JSONDecodeError as exc:
        raise ParseError(f"trace document is not valid JSON: {exc}") from exc


def trace_to_json(trace: WorkloadTrace) -> str:
    records = []
    for r in trace.requests:
        records.append(
            {
                "id": r.id,
                "arrival": r.arrival_time,
                "src": r.source,
                "dst": r.destination,
                "target": r.target,
                "cpu": r.cpu_demand,
                "mem": r.mem_demand,
                "io": r.io_demand,
                "bw": r.bandwidth_demand,
                "duration": r.duration,
                "usage_fraction": r.usage_fraction,
            }
        )
    return json.dumps(records, sort_keys=True, indent=2) + "\n"


@dataclass(frozen=True)
class GeneratorParams:
    """Synthetic batch-trace knobs; every range is a closed [lo, hi] pair."""

    count: int
    seed: int
    sources: tuple[str, ...]
    destinations: tuple[str, ...]
    targets: tuple[str, ...]
    cpu_range: tuple[int, int] = (1, 4)
    mem_range: tuple[int, int] = (1, 4)
    io_range: tuple[int, int] = (0, 2)
    bw_range: tuple[int, int] = (1, 2)
    duration_range: tuple[int, int] = (5, 20)
    gap_range: tuple[int, int] = (0, 3)
    usage_fraction_range: tuple[float, float] = (1.0, 1.0)

    @classmethod
    def from_dict(cls, doc: dict) -> "GeneratorParams":
        def pair(key, default):
            raw = doc.get(key, default)
            if not isinstance(raw, (list, tuple)) or len(raw) != 2:
                raise ParseError(f"generator {key!r} must be a [lo, hi] pair")
            return tuple(raw)

        try:
            return cls(
                count=int(doc["count"]),
                seed=int(doc.get("seed", 0)),
                sources=tuple(doc["sources"]),
                destinations=tuple(doc["destinations"]),
                targets=tuple(doc["targets"]),
                cpu_range=pair("cpu_range", (1, 4)),
                mem_range=pair("mem_range", (1, 4)),
                io_range=pair("io_range", (0, 2)),
                bw_range=pair("bw_range", (1, 2)),
                duration_range=pair("duration_range", (5, 20)),
                gap_range=pair("gap_range", (0, 3)),
                usage_fraction_range=pair("usage_fraction_range", (1.0, 1.0)),
            )
        except KeyError as exc:
            raise ParseError(f"generator params missing field {exc}") from exc


def generate_batch_trace(params: GeneratorParams) -> WorkloadTrace:
    """Seeded synthetic trace; identical params give a bit-identical trace."""
    if params.count < 0:
        raise InvalidRangeError("count must be >= 0")
    for name in ("cpu_range", "mem_range", "io_range", "bw_range",
                 "duration_range", "gap_range", "usage_fraction_range"):
        lo, hi = getattr(params, name)
        if lo > hi or lo < 0:
            raise InvalidRangeError(f"{name} [{lo}, {hi}] is empty or negative")
    if params.duration_range[0] < 1:
        raise InvalidRangeError("duration_range must start at 1 or above")
    if params.usage_fraction_range[1] > 1.0:
        raise InvalidRangeError("usage_fraction_range must stay within [0, 1]")
    for name in ("sources", "destinations", "targets"):
        if not getattr(params, name):
            raise InvalidRangeError(f"{name} must list at least one node id")

    rng = random.Random(params.seed)
    width = max(3, len(str(max(params.count, 1))))
    requests = []
    arrival = 0
    for i in range(params.count):
        if i > 0:
            arrival += rng.randint(*params.gap_range)
        cpu = rng.randint(*params.cpu_range)
        mem = rng.randint(*params.mem_range)
        io = rng.randint(*params.io_range)
        bw = rng.randint(*params.bw_range)
        duration = rng.randint(*params.duration_range)
        src = rng.choice(params.sources)
        dst = rng.choice(params.destinations)
        target = rng.choice(params.targets)
        frac_lo, frac_hi = params.usage_fraction_range
        fraction = frac_lo if frac_lo == frac_hi else rng.uniform(frac_lo, frac_hi)
        requests.append(
            Request(
                id=f"req-{i + 1:0{width}d}",
                source=src,
                destination=dst,
                target=target,
                cpu_demand=float(cpu),
                mem_demand=float(mem),
                io_demand=float(io),
                bandwidth_demand=float(bw),
                duration=duration,
                arrival_time=arrival,
                usage_fraction=fraction,
            )
        )
    return WorkloadTrace(requests=tuple(requests))


@dataclass(frozen=True)
class SimParams:
    sla: SlaPolicy = SlaPolicy()
    realistic: RealisticParams = RealisticParams()
    capacity_aware: CapacityAwareParams = CapacityAwareParams()


@dataclass(frozen=True)
class SimResult:
    scheme: str
    events: tuple[tuple[int, str, str, str], ...]  # (tick, kind, id, detail)
    decisions: tuple[admission.AllocationDecision, ...]
    series: UtilizationSeries
    cache_counters: dict[str, int]
    final_compute: dict[str, tuple[float, float, float]]
    final_residual: dict[str, float]


def _reason_slug(reason) -> str:
    if isinstance(reason, tuple):  # SLA violations
        return "sla:" + "+".join(v.dimension for v in reason)
    if isinstance(reason, InsufficientResources):
        return f"resources:{reason.dimension}"
    if isinstance(reason, pce.NoFeasiblePath):
        return "no_feasible_path"
    return "unknown"


def decision_record(decision: admission.AllocationDecision, tick: int) -> dict:
    if isinstance(decision, Admitted):
        return {
            "id": decision.request_id,
            "tick": tick,
            "decision": "admitted",
            "reason": None,
            "path": list(decision.path.link_ids),
            "score": None,
        }
    score = None
    if isinstance(decision.reason, InsufficientResources):
        score = decision.reason.score
    return {
        "id": decision.request_id,
        "tick": tick,
        "decision": "rejected",
        "reason": _reason_slug(decision.reason),
        "path": None,
        "score": score,
    }


def _cluster_shares(leases: dict[str, Lease], topology: Topology) -> dict[str, float]:
    """Water-filled effective CPU shares for all active leases, per node."""
    by_node: dict[str, list[fairshare.ShareEntry]] = {}
    for rid in sorted(leases):
        lease = leases[rid]
        by_node.setdefault(lease.target, []).append(
            fairshare.ShareEntry(lease_id=rid, cpu_demand=lease.cpu)
        )
    shares: dict[str, float] = {}
    for node_id in sorted(by_node):
        capacity = topology.node(node_id).cpu_capacity
        shares.update(fairshare.fair_shares(by_node[node_id], capacity))
    return shares


def run(
    topology: Topology,
    trace: WorkloadTrace,
    scheme: Scheme,
    params: SimParams,
    sample_interval: int = 1,
) -> SimResult:
    """Drive the trace through one admission scheme.

    The sample grid runs from tick 0 to the first interval multiple at or
    past the trace horizon, and depends only on the trace, so every
    scheme sampled against the same trace shares the same grid.
    """
    if sample_interval < 1:
        raise ValidationError("sample_interval must be >= 1")
    topo_violations = topo.validate(topology)
    if topo_violations:
        raise ValidationError(
            "; ".join(str(v) for v in topo_violations), violations=topo_violations
        )
    trace_violations = trace.validate_against(topology)
    if trace_violations:
        raise ValidationError(
            "; ".join(str(v) for v in trace_violations), violations=trace_violations
        )

    graph = topo.routing_graph(topology)
    residuals = pce.ResidualState.full(graph)
    compute_state = ComputeState(topology)
    table = pce.PathAllocationTable()
    handler = ApplicationHandler()
    usage_model = trace.usage_model()
    by_id = {r.id: r for r in trace.requests}
    leases: dict[str, Lease] = {}
    queue: deque[str] = deque()
    events_log: list[tuple[int, str, str, str]] = []
    decisions: list[admission.AllocationDecision] = []
    samples: list[metrics.UtilizationSample] = []

    heap: list[tuple[int, int, str]] = []
    for r in trace.requests:
        heapq.heappush(heap, (r.arrival_time, EventKind.ARRIVAL.value, r.id))
        heapq.heappush(heap, (r.arrival_time, EventKind.ADMISSION_ATTEMPT.value, r.id))
    horizon = trace.horizon()
    tick = 0
    while True:
        heapq.heappush(heap, (tick, EventKind.SAMPLE.value, f"{tick:012d}"))
        if tick >= horizon:
            break
        tick += sample_interval

    while heap:
        tick, kind_value, payload = heapq.heappop(heap)
        kind = EventKind(kind_value)
        if kind is EventKind.LEASE_EXPIRY:
            released = admission.expire_leases(compute_state, residuals, leases, tick)
            for rid in released:
                events_log.append((tick, kind.label, rid, "released"))
        elif kind is EventKind.ARRIVAL:
            queue.append(payload)
            events_log.append((tick, kind.label, payload, ""))
        elif kind is EventKind.ADMISSION_ATTEMPT:
            if not queue:
                raise SchedulerStallError("admission attempt with an empty queue")
            request = by_id[queue.popleft()]
            decision = baselines.baseline_pipeline(
                request, scheme, params.sla, compute_state, residuals, table,
                topology, tick, handler,
                realistic_params=params.realistic,
                capacity_params=params.capacity_aware,
            )
            decisions.append(decision)
            if isinstance(decision, Admitted):
                leases[request.id] = decision.lease
                heapq.heappush(
                    heap, (decision.lease.end, EventKind.LEASE_EXPIRY.value, request.id)
                )
                events_log.append((tick, kind.label, request.id, "admitted"))
            else:
                events_log.append(
                    (tick, kind.label, request.id, f"rejected:{_reason_slug(decision.reason)}")
                )
        else:  # SAMPLE
            shares = _cluster_shares(leases, topology)
            point = metrics.sample(
                compute_state, residuals, shares, usage_model, topology, tick
            )
            samples.append(point)
            events_log.append(
                (tick, kind.label, payload.lstrip("0") or "0",
                 f"cpu={point.cpu!r};mem={point.mem!r};overall={point.overall!r}")
            )
    if queue:
        raise SchedulerStallError(f"{len(queue)} queued requests were never attempted")

    return SimResult(
        scheme=scheme.value,
        events=tuple(events_log),
        decisions=tuple(decisions),
        series=UtilizationSeries(scheme=scheme.value, samples=tuple(samples)),
        cache_counters=table.counters(),
        final_compute=compute_state.snapshot(),
        final_residual=residuals.as_dict(),
    )


def run_comparison(
    topology: Topology,
    trace: WorkloadTrace,
    schemes: list[Scheme],
    params: SimParams,
    sample_interval: int = 1,
) -> dict[str, SimResult]:
    """Each scheme simulated independently from the same initial state."""
    return {
        scheme.value: run(topology, trace, scheme, params, sample_interval)
        for scheme in schemes
    }


def events_to_log(result: SimResult) -> str:
    lines = [f"{t},{kind},{rid},{detail}" for t, kind, rid, detail in result.events]
    return "\n".join(lines) + "\n" if lines else ""


def decisions_to_json(result: SimResult) -> str:
    ticks = {}
    for t, kind, rid, _ in result.events:
        if kind == EventKind.ADMISSION_ATTEMPT.label:
            ticks[rid] = t
    records = [decision_record(d, ticks[d.request_id]) for d in result.decisions]
    return json.dumps(records, sort_keys=True, indent=2) + "\n"

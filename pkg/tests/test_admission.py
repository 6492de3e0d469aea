import random

import networkx as nx
import pytest

from helpers import two_host_topology
from topoman import pce, topo
from topoman.admission import (
    Admitted,
    ApplicationHandler,
    ComputeState,
    InsufficientResources,
    Rejected,
    Request,
    admit,
    check_resources,
    expire_leases,
    handle_application,
)
from topoman.errors import DuplicateRequestIdError, UnknownNodeError
from topoman.sla import SlaPolicy
from topoman.topo import Link, Node, NodeKind, Topology


def pipeline_state(topology=None):
    topology = topology or two_host_topology()
    graph = topo.routing_graph(topology)
    return {
        "topology": topology,
        "compute": ComputeState(topology),
        "residuals": pce.ResidualState.full(graph),
        "table": pce.PathAllocationTable(),
        "handler": ApplicationHandler(),
    }


def make_request(rid="r1", cpu=1.0, mem=1.0, io=0.0, bw=1.0, duration=5,
                 target="c1", src="c1", dst="c2", arrival=0):
    return Request(
        id=rid, source=src, destination=dst, target=target,
        cpu_demand=cpu, mem_demand=mem, io_demand=io, bandwidth_demand=bw,
        duration=duration, arrival_time=arrival,
    )


def run_admit(state, request, policy=None, now=0):
    return admit(
        request, policy or SlaPolicy(), state["compute"], state["residuals"],
        state["table"], state["topology"], now, state["handler"],
    )


def test_handle_application_registers_and_checks():
    handler = ApplicationHandler()
    ok = handle_application(handler, make_request(), SlaPolicy())
    assert ok == [] and handler.registered("r1")
    violations = handle_application(
        handler, make_request(rid="r2", cpu=5.0), SlaPolicy(max_cpu_demand=4)
    )
    assert [v.dimension for v in violations] == ["cpu"]


def test_duplicate_request_id():
    handler = ApplicationHandler()
    handle_application(handler, make_request(), SlaPolicy())
    with pytest.raises(DuplicateRequestIdError):
        handle_application(handler, make_request(), SlaPolicy())


def test_check_resources_zero_demand():
    state = pipeline_state()
    req = make_request(cpu=0.0, mem=0.0, io=0.0)
    assert check_resources(req, state["compute"], state["topology"]) is None


def test_check_resources_boundary_inclusive():
    state = pipeline_state()
    req = make_request(cpu=10.0, mem=0.0, io=0.0)
    assert check_resources(req, state["compute"], state["topology"]) is None


def test_check_resources_first_failing_dimension():
    topology = two_host_topology(cpu=4.0, mem=1.0)
    state = pipeline_state(topology)
    req = make_request(cpu=5.0, mem=2.0)
    shortfall = check_resources(req, state["compute"], state["topology"])
    assert shortfall == InsufficientResources(dimension="cpu")


def test_check_resources_unknown_target():
    state = pipeline_state()
    with pytest.raises(UnknownNodeError):
        check_resources(make_request(target="ghost"), state["compute"], state["topology"])


def test_sla_rejection_skips_pce_and_leaves_state_untouched():
    state = pipeline_state()
    policy = SlaPolicy(max_cpu_demand=1)
    compute_before = state["compute"].snapshot()
    residual_before = state["residuals"].copy()
    decision = run_admit(state, make_request(cpu=5.0), policy)
    assert isinstance(decision, Rejected)
    assert all(v.dimension == "cpu" for v in decision.reason)
    assert state["table"].computations == 0
    assert state["table"].counters() == {
        "hits": 0, "misses": 0, "stale_recomputes": 0, "computations": 0,
    }
    assert state["compute"].snapshot() == compute_before
    assert state["residuals"] == residual_before


def test_resource_rejection_skips_pce():
    state = pipeline_state()
    decision = run_admit(state, make_request(cpu=11.0))
    assert isinstance(decision, Rejected)
    assert decision.reason == InsufficientResources(dimension="cpu")
    assert state["table"].computations == 0


def test_admit_success_updates_state():
    state = pipeline_state()
    decision = run_admit(state, make_request(cpu=4.0, mem=2.0, io=1.0, bw=5.0), now=0)
    assert isinstance(decision, Admitted)
    assert decision.lease.end == 5
    assert state["compute"].allocated("c1") == (4.0, 2.0, 1.0)
    assert state["residuals"].of("l1") == 95.0
    assert state["residuals"].of("l2") == 95.0
    assert decision.path.link_ids == ("l1", "l2")


def test_no_feasible_path_rejection_is_pure():
    # two disjoint routes of capacity 3 each: no single path carries 7,
    # confirmed independently by max-flow (6 < 7) over the same graph.
    nodes = [
        Node(id="c1", kind=NodeKind.COMPUTE_NODE, cpu_capacity=100,
             mem_capacity=100, io_capacity=100),
        Node(id="c2", kind=NodeKind.COMPUTE_NODE, cpu_capacity=100,
             mem_capacity=100, io_capacity=100),
        Node(id="s1", kind=NodeKind.SWITCH),
        Node(id="s2", kind=NodeKind.SWITCH),
    ]
    links = [
        Link(id="a1", a="c1", b="s1", bandwidth_capacity=3, latency=1),
        Link(id="a2", a="s1", b="c2", bandwidth_capacity=3, latency=1),
        Link(id="b1", a="c1", b="s2", bandwidth_capacity=3, latency=1),
        Link(id="b2", a="s2", b="c2", bandwidth_capacity=3, latency=1),
    ]
    topology = Topology(nodes, links)
    flow_graph = nx.Graph()
    for link in links:
        flow_graph.add_edge(link.a, link.b, capacity=link.bandwidth_capacity)
    demand = 7.0
    assert nx.maximum_flow_value(flow_graph, "c1", "c2") < demand

    state = pipeline_state(topology)
    compute_before = state["compute"].snapshot()
    residual_before = state["residuals"].copy()
    decision = run_admit(state, make_request(bw=demand))
    assert isinstance(decision, Rejected)
    assert isinstance(decision.reason, pce.NoFeasiblePath)
    assert state["compute"].snapshot() == compute_before
    assert state["residuals"] == residual_before
    assert state["table"].computations == 1  # PCE ran, found nothing, cached nothing


def test_expire_leases_empty():
    state = pipeline_state()
    assert expire_leases(state["compute"], state["residuals"], {}, 100) == []


def test_expire_boundary_inclusive_and_round_trip():
    state = pipeline_state()
    compute_before = state["compute"].snapshot()
    residual_before = state["residuals"].copy()
    decision = run_admit(state, make_request(cpu=4.0, mem=2.0, io=1.0, bw=5.0, duration=7), now=3)
    leases = {decision.lease.request_id: decision.lease}
    assert expire_leases(state["compute"], state["residuals"], leases, 9) == []
    assert expire_leases(state["compute"], state["residuals"], leases, 10) == ["r1"]
    assert leases == {}
    assert state["compute"].snapshot() == compute_before
    assert state["residuals"] == residual_before


def test_expire_releases_are_sorted():
    state = pipeline_state()
    leases = {}
    for rid in ("r9", "r1", "r5"):
        decision = run_admit(state, make_request(rid=rid, cpu=1.0, bw=1.0, duration=2), now=0)
        leases[rid] = decision.lease
    assert expire_leases(state["compute"], state["residuals"], leases, 2) == ["r1", "r5", "r9"]


def test_admit_expire_round_trip_randomized():
    rng = random.Random(5)
    for trial in range(30):
        state = pipeline_state()
        compute_before = state["compute"].snapshot()
        residual_before = state["residuals"].copy()
        leases = {}
        for k in range(rng.randint(1, 6)):
            req = make_request(
                rid=f"t{trial}-{k}",
                cpu=float(rng.randint(0, 3)), mem=float(rng.randint(0, 3)),
                io=float(rng.randint(0, 3)), bw=float(rng.randint(0, 20)),
                duration=rng.randint(1, 9),
                target=rng.choice(["c1", "c2"]),
            )
            decision = run_admit(state, req, now=0)
            if isinstance(decision, Admitted):
                leases[req.id] = decision.lease
        expire_leases(state["compute"], state["residuals"], leases, 9)
        assert state["compute"].snapshot() == compute_before
        assert state["residuals"] == residual_before


def test_empty_path_when_src_equals_dst():
    state = pipeline_state()
    decision = run_admit(state, make_request(src="c1", dst="c1", bw=50.0))
    assert isinstance(decision, Admitted)
    assert decision.path.link_ids == ()
    assert state["residuals"] == pce.ResidualState.full(state["residuals"].graph)

from types import SimpleNamespace

import pytest

from topoman import pce, topo
from topoman.admission import ComputeState
from topoman.errors import ConservationError, GridMismatchError, ValidationError
from topoman.metrics import (
    ComparisonReport,
    UtilizationSample,
    UtilizationSeries,
    compare,
    export,
    report_to_json,
    sample,
    series_to_csv,
)
from topoman.topo import Node, NodeKind, Topology


def single_node_setup(cpu=8.0, mem=8.0, io=8.0):
    topology = Topology(
        nodes=[Node(id="c1", kind=NodeKind.COMPUTE_NODE, cpu_capacity=cpu,
                    mem_capacity=mem, io_capacity=io)]
    )
    graph = topo.routing_graph(topology)
    return topology, ComputeState(topology), pce.ResidualState.full(graph)


def test_sample_idle_system():
    topology, state, residuals = single_node_setup()
    point = sample(state, residuals, {}, {}, topology, 0)
    assert (point.cpu, point.mem, point.overall) == (0.0, 0.0, 0.0)


def test_sample_direct_arithmetic():
    topology, state, residuals = single_node_setup()
    state.add("c1", 4.0, 2.0, 0.0)
    point = sample(state, residuals, {"r1": 4.0}, {"r1": 1.0}, topology, 3)
    assert (point.cpu, point.mem, point.overall) == (0.5, 0.25, 0.375)


def test_sample_usage_fraction_scales_cpu_only():
    topology, state, residuals = single_node_setup()
    state.add("c1", 4.0, 2.0, 0.0)
    point = sample(state, residuals, {"r1": 4.0}, {"r1": 0.5}, topology, 3)
    assert (point.cpu, point.mem) == (0.25, 0.25)


def test_sample_saturated_system():
    topology, state, residuals = single_node_setup()
    state.add("c1", 8.0, 8.0, 0.0)
    point = sample(state, residuals, {"r1": 8.0}, {"r1": 1.0}, topology, 1)
    assert (point.cpu, point.mem, point.overall) == (1.0, 1.0, 1.0)


def test_sample_detects_conservation_breach():
    topology, state, residuals = single_node_setup(cpu=4.0)
    state.add("c1", 5.0, 0.0, 0.0)
    with pytest.raises(ConservationError):
        sample(state, residuals, {}, {}, topology, 0)
    topology, state, residuals = single_node_setup()
    residuals.residual[:] = -1.0 if residuals.residual.size else 0.0
    # no links on this graph; corrupt-link detection needs one
    t2 = topo.load_topology(
        {
            "nodes": [
                {"id": "a", "kind": "switch"},
                {"id": "b", "kind": "switch"},
            ],
            "links": [{"id": "l", "a": "a", "b": "b", "bw": 5, "latency": 0}],
        }
    )
    g2 = topo.routing_graph(t2)
    res2 = pce.ResidualState.full(g2)
    res2.residual[0] = 6.0
    with pytest.raises(ConservationError):
        sample(ComputeState(t2), res2, {}, {}, t2, 0)


def series(scheme, points):
    return UtilizationSeries(
        scheme=scheme,
        samples=tuple(
            UtilizationSample(tick=t, cpu=c, mem=m, overall=(c + m) / 2)
            for t, c, m in points
        ),
    )


def wrap(s):
    return SimpleNamespace(series=s)


def test_series_requires_increasing_ticks():
    with pytest.raises(ValidationError):
        series("x", [(0, 0, 0), (0, 0, 0)])


def test_compare_identical_series_flag_true_with_equality():
    pts = [(0, 0.2, 0.4), (5, 0.2, 0.4)]
    report = compare(
        {
            "proposed": wrap(series("proposed", pts)),
            "realistic": wrap(series("realistic", pts)),
            "capacity-aware": wrap(series("capacity-aware", pts)),
        }
    )
    assert report.proposed_below_baseline_average is True
    assert len(set(report.asymmetry.values())) == 1


def test_compare_flag_directions():
    def flat(value):
        return [(0, value, value), (1, value, value)]

    low = compare(
        {
            "proposed": wrap(series("proposed", flat(0.3))),
            "realistic": wrap(series("realistic", flat(0.4))),
            "capacity-aware": wrap(series("capacity-aware", flat(0.5))),
        }
    )
    assert low.proposed_below_baseline_average is True
    high = compare(
        {
            "proposed": wrap(series("proposed", flat(0.5))),
            "realistic": wrap(series("realistic", flat(0.4))),
            "capacity-aware": wrap(series("capacity-aware", flat(0.5))),
        }
    )
    assert high.proposed_below_baseline_average is False


def test_compare_single_scheme_flag_is_null():
    report = compare({"proposed": wrap(series("proposed", [(0, 0.1, 0.2)]))})
    assert report.proposed_below_baseline_average is None
    assert report.asymmetry["proposed"] == pytest.approx(0.1)
    assert report_to_json(report).count('"proposed_below_baseline_average": null') == 1


def test_compare_grid_mismatch():
    with pytest.raises(GridMismatchError):
        compare(
            {
                "a": wrap(series("a", [(0, 0, 0)])),
                "b": wrap(series("b", [(0, 0, 0), (1, 0, 0)])),
            }
        )


def test_compare_empty_means_flag_true():
    empty = {
        label: wrap(UtilizationSeries(scheme=label, samples=()))
        for label in ("proposed", "realistic", "capacity-aware")
    }
    report = compare(empty)
    assert report.proposed_below_baseline_average is True
    assert all(m == {"cpu": 0.0, "mem": 0.0, "overall": 0.0}
               for m in report.scheme_means.values())


def test_csv_export_shapes(tmp_path):
    empty = UtilizationSeries(scheme="proposed", samples=())
    target = tmp_path / "empty.csv"
    export(empty, target)
    assert target.read_text() == "tick,cpu,mem,overall\n"

    two = series("proposed", [(0, 0.1, 0.2), (5, 0.3, 0.4)])
    target2 = tmp_path / "two.csv"
    export(two, target2)
    lines = target2.read_text().splitlines()
    assert len(lines) == 3
    assert lines[0] == "tick,cpu,mem,overall"
    assert lines[1].startswith("0,0.1,0.2,")


def test_export_byte_stable(tmp_path):
    s = series("proposed", [(0, 1 / 3, 2 / 7), (5, 0.25, 0.5)])
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    export(s, a)
    export(s, b)
    assert a.read_bytes() == b.read_bytes()


def test_overall_identity_exact():
    s = series("x", [(0, 1 / 3, 1 / 7), (1, 0.123456, 0.654321)])
    for p in s.samples:
        assert p.overall == (p.cpu + p.mem) / 2  # exact on stored values


def test_export_rejects_other_types(tmp_path):
    with pytest.raises(ValidationError):
        export({"not": "expected"}, tmp_path / "x")

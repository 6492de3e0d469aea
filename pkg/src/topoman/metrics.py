"""Utilization sampling, aggregation, and the cross-scheme comparison.

CPU utilization counts what leases actually use (share times usage
fraction); memory counts what is reserved. The overall figure is the
unweighted mean of the two. That asymmetry is deliberate: granted CPU is
routinely under-consumed, memory reservations are not.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path as FsPath

from topoman import fairshare
from topoman.errors import ConservationError, GridMismatchError, ValidationError
from topoman.topo import Topology


@dataclass(frozen=True)
class UtilizationSample:
    tick: int
    cpu: float
    mem: float
    overall: float


@dataclass(frozen=True)
class UtilizationSeries:
    scheme: str
    samples: tuple[UtilizationSample, ...]

    def __post_init__(self):
        ticks = [s.tick for s in self.samples]
        if any(b <= a for a, b in zip(ticks, ticks[1:])):
            raise ValidationError(f"series {self.scheme!r}: ticks must strictly increase")

    def ticks(self) -> tuple[int, ...]:
        return tuple(s.tick for s in self.samples)

    def mean(self, field: str) -> float:
        if not self.samples:
            return 0.0
        return sum(getattr(s, field) for s in self.samples) / len(self.samples)


@dataclass(frozen=True)
class ComparisonReport:
    scheme_means: dict[str, dict[str, float]]
    proposed_below_baseline_average: bool | None
    asymmetry: dict[str, float]


def sample(
    compute_state,
    residuals,
    shares: dict[str, float],
    usage_model: dict[str, float],
    topology: Topology,
    tick: int,
) -> UtilizationSample:
    """One utilization point across the whole cluster.

    Verifies conservation while it is at it: allocations within node
    capacities, reservations within link capacities.
    """
    total_cpu_cap = total_mem_cap = 0.0
    for node in topology.compute_nodes():
        alloc = compute_state.allocated(node.id)
        for dim, used, cap in zip(("cpu", "mem", "io"), alloc, node.capacities):
            if used > cap:
                raise ConservationError(
                    f"node {node.id!r}: allocated {dim} {used} exceeds capacity {cap}"
                )
        total_cpu_cap += node.cpu_capacity
        total_mem_cap += node.mem_capacity
    graph = residuals.graph
    for i, link_id in enumerate(graph.link_ids):
        if residuals.residual[i] < 0 or residuals.residual[i] > graph.capacity[i]:
            raise ConservationError(
                f"link {link_id!r}: residual {residuals.residual[i]} outside "
                f"[0, {graph.capacity[i]}]"
            )

    used_cpu = sum(fairshare.usage(shares, usage_model).values())
    used_mem = sum(alloc[1] for alloc in (
        compute_state.allocated(n.id) for n in topology.compute_nodes()
    ))
    cpu = used_cpu / total_cpu_cap if total_cpu_cap > 0 else 0.0
    mem = used_mem / total_mem_cap if total_mem_cap > 0 else 0.0
    return UtilizationSample(tick=tick, cpu=cpu, mem=mem, overall=(cpu + mem) / 2)


def compare(results: dict) -> ComparisonReport:
    """Cross-scheme means, the below-baseline-average flag and per-scheme
    |mean cpu - mean mem| asymmetry indices.

    `results` maps scheme label to an object exposing `.series`. All
    series must share one tick grid. The flag needs the proposed scheme
    plus both baselines; otherwise it is None.
    """
    if not results:
        raise ValidationError("nothing to compare")
    grids = {label: r.series.ticks() for label, r in results.items()}
    reference = next(iter(grids.values()))
    for label, grid in grids.items():
        if grid != reference:
            raise GridMismatchError(
                f"series {label!r} is sampled on a different tick grid"
            )
    scheme_means = {
        label: {
            "cpu": r.series.mean("cpu"),
            "mem": r.series.mean("mem"),
            "overall": r.series.mean("overall"),
        }
        for label, r in sorted(results.items())
    }
    asymmetry = {
        label: abs(means["cpu"] - means["mem"]) for label, means in scheme_means.items()
    }
    flag = None
    if {"proposed", "realistic", "capacity-aware"} <= set(scheme_means):
        baseline_avg = (
            scheme_means["realistic"]["overall"]
            + scheme_means["capacity-aware"]["overall"]
        ) / 2
        flag = scheme_means["proposed"]["overall"] <= baseline_avg
    return ComparisonReport(
        scheme_means=scheme_means,
        proposed_below_baseline_average=flag,
        asymmetry=asymmetry,
    )


def series_to_csv(series: UtilizationSeries) -> str:
    lines = ["tick,cpu,mem,overall"]
    for s in series.samples:
        lines.append(f"{s.tick},{s.cpu!r},{s.mem!r},{s.overall!r}")
    return "\n".join(lines) + "\n"


def report_to_json(report: ComparisonReport) -> str:
    doc = {
        "scheme_means": report.scheme_means,
        "proposed_below_baseline_average": report.proposed_below_baseline_average,
        "asymmetry": report.asymmetry,
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def export(obj, destination) -> None:
    """Write a series as CSV or a report as JSON; output is byte-stable."""
    if isinstance(obj, UtilizationSeries):
        payload = series_to_csv(obj)
    elif isinstance(obj, ComparisonReport):
        payload = report_to_json(obj)
    else:
        raise ValidationError(f"cannot export {type(obj).__name__}")
    FsPath(destination).write_text(payload, encoding="utf-8")

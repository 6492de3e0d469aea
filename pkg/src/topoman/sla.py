"""SLA policies and the compliance check gating admission.

A policy caps what a single request may demand. Only the demand caps are
checked here: the latency bound is carried into path computation (only
the path engine knows candidate paths), and bandwidth feasibility is the
path engine's job as well.
"""

from __future__ import annotations

from dataclasses import dataclass

from topoman.errors import ValidationError


@dataclass(frozen=True)
class SlaPolicy:
    """Per-request bounds; an absent (None) bound means unconstrained.

    min_bandwidth is carried for completeness of the policy surface but is
    not enforced by check_sla; path feasibility owns bandwidth.
    """

    max_path_latency: float | None = None
    min_bandwidth: float | None = None
    max_cpu_demand: float | None = None
    max_mem_demand: float | None = None
    max_io_demand: float | None = None

    def __post_init__(self):
        for name in (
            "max_path_latency",
            "min_bandwidth",
            "max_cpu_demand",
            "max_mem_demand",
            "max_io_demand",
        ):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ValidationError(f"SLA bound {name} must be >= 0, got {value}")

    @classmethod
    def from_dict(cls, doc: dict | None) -> "SlaPolicy":
        doc = doc or {}
        return cls(
            max_path_latency=doc.get("max_path_latency"),
            min_bandwidth=doc.get("min_bandwidth"),
            max_cpu_demand=doc.get("max_cpu_demand"),
            max_mem_demand=doc.get("max_mem_demand"),
            max_io_demand=doc.get("max_io_demand"),
        )


@dataclass(frozen=True)
class SlaViolation:
    dimension: str
    bound: float
    offered: float

    def __str__(self) -> str:
        return f"{self.dimension} demand {self.offered} exceeds SLA bound {self.bound}"


def check_sla(request, policy: SlaPolicy) -> list[SlaViolation]:
    """Demand caps vs. the request; violations sorted by dimension name."""
    checks = (
        ("cpu", policy.max_cpu_demand, request.cpu_demand),
        ("io", policy.max_io_demand, request.io_demand),
        ("mem", policy.max_mem_demand, request.mem_demand),
    )
    return [
        SlaViolation(dimension=dim, bound=bound, offered=offered)
        for dim, bound, offered in checks
        if bound is not None and offered > bound
    ]

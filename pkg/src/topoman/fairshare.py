"""Share-fair CPU allocation: weighted max-min water-filling.

Allocation and utilization are deliberately different things here: a
lease is granted an effective share (up to 100% of the node when it is
alone), but consumes only a fraction of it. Memory and I/O are reserved
rigidly elsewhere; only CPU gets share semantics.

The water level is found by bisection, then shares are clamped to
demands; results are deterministic across platforms at far better than
the 1e-9 tolerance used for comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass

from topoman.errors import ValidationError

_LEVEL_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ShareEntry:
    lease_id: str
    cpu_demand: float
    weight: float = 1.0

    def __post_init__(self):
        if self.weight <= 0:
            raise ValidationError(f"share entry {self.lease_id!r}: weight must be > 0")
        if self.cpu_demand < 0:
            raise ValidationError(f"share entry {self.lease_id!r}: demand must be >= 0")


def fair_shares(entries: list[ShareEntry], cpu_capacity: float) -> dict[str, float]:
    """Effective share per lease id.

    Each entry receives min(demand, weight * level) with the common level
    raised until capacity (or total demand, if smaller) is exhausted. A
    single entry therefore gets min(demand, capacity) exactly, and when
    everything fits, everyone gets their full demand exactly.
    """
    if cpu_capacity < 0:
        raise ValidationError("cpu capacity must be >= 0")
    if not entries:
        return {}
    if len(entries) == 1:
        entry = entries[0]
        return {entry.lease_id: min(entry.cpu_demand, cpu_capacity)}
    total_demand = sum(e.cpu_demand for e in entries)
    if total_demand <= cpu_capacity:
        return {e.lease_id: e.cpu_demand for e in entries}
    if cpu_capacity == 0:
        return {e.lease_id: 0.0 for e in entries}

    min_weight = min(e.weight for e in entries)
    lo, hi = 0.0, cpu_capacity / min_weight
    while hi - lo > _LEVEL_TOLERANCE:
        mid = (lo + hi) / 2
        filled = sum(min(e.cpu_demand, e.weight * mid) for e in entries)
        if filled < cpu_capacity:
            lo = mid
        else:
            hi = mid
    level = (lo + hi) / 2
    return {e.lease_id: min(e.cpu_demand, e.weight * level) for e in entries}


def usage(shares: dict[str, float], model: dict[str, float] | None = None) -> dict[str, float]:
    """Actual CPU consumption: share times usage fraction (default 1)."""
    model = model or {}
    return {lease_id: share * model.get(lease_id, 1.0) for lease_id, share in shares.items()}

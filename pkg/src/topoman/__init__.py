"""Resource-aware topology management: SLA-gated admission, constrained
path computation with a path allocation table, share-fair allocation,
and a deterministic batch-workload simulator with a three-scheme
utilization comparison."""

__version__ = "0.1.0"

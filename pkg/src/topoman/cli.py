"""Command-line front end.

Subcommands: validate | run | compare | gen-trace. A scenario file binds
the inputs together; flags override scenario keys, which override
built-in defaults. The output directory resolves as --out, then the
scenario's out_dir, then $TOPOMAN_OUT.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from topoman import metrics, sim, topo
from topoman.baselines import CapacityAwareParams, RealisticParams, Scheme
from topoman.errors import ParseError, TopomanError, ValidationError
from topoman.sim import GeneratorParams, SimParams, WorkloadTrace
from topoman.sla import SlaPolicy

ALL_SCHEMES = [Scheme.PROPOSED, Scheme.REALISTIC, Scheme.CAPACITY_AWARE]

_SCENARIO_FIELDS = {"topology", "trace", "generator", "scheme", "sla", "realistic",
                    "capacity_aware", "sample_interval", "seed", "out_dir"}


@dataclass
class Scenario:
    topology_path: Path
    trace_path: Path | None
    generator: GeneratorParams | None
    scheme: Scheme
    sla: SlaPolicy
    realistic: RealisticParams
    capacity_aware: CapacityAwareParams
    sample_interval: int
    seed: int | None
    out_dir: Path | None


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParseError(f"cannot read scenario file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"scenario file {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"scenario file {path} must hold a JSON object")
    unknown = set(doc) - _SCENARIO_FIELDS
    if unknown:
        raise ParseError(f"scenario file {path}: unknown keys {sorted(unknown)}")
    if "topology" not in doc:
        raise ParseError(f"scenario file {path}: missing 'topology'")
    if ("trace" in doc) == ("generator" in doc):
        raise ParseError(
            f"scenario file {path}: exactly one of 'trace' or 'generator' is required"
        )
    base = path.parent
    realistic_doc = doc.get("realistic", {})
    capacity_doc = doc.get("capacity_aware", {})
    scheme_label = doc.get("scheme", Scheme.PROPOSED.value)
    try:
        scheme = Scheme(scheme_label)
    except ValueError:
        raise ParseError(f"scenario file {path}: unknown scheme {scheme_label!r}") from None
    return Scenario(
        topology_path=base / doc["topology"],
        trace_path=(base / doc["trace"]) if "trace" in doc else None,
        generator=GeneratorParams.from_dict(doc["generator"]) if "generator" in doc else None,
        scheme=scheme,
        sla=SlaPolicy.from_dict(doc.get("sla")),
        realistic=RealisticParams(theta=realistic_doc.get("theta", 0.2)),
        capacity_aware=CapacityAwareParams(
            risk_cpu=capacity_doc.get("risk_cpu", 1.3),
            risk_io=capacity_doc.get("risk_io", 1.3),
        ),
        sample_interval=int(doc.get("sample_interval", 1)),
        seed=doc.get("seed"),
        out_dir=(base / doc["out_dir"]) if "out_dir" in doc else None,
    )


def _resolve_trace(scenario: Scenario, seed_override: int | None) -> WorkloadTrace:
    if scenario.trace_path is not None:
        return sim.load_trace(scenario.trace_path)
    params = scenario.generator
    seed = seed_override if seed_override is not None else scenario.seed
    if seed is not None:
        params = GeneratorParams.from_dict({**_generator_dict(params), "seed": seed})
    return sim.generate_batch_trace(params)


def _generator_dict(params: GeneratorParams) -> dict:
    return {
        "count": params.count,
        "seed": params.seed,
        "sources": list(params.sources),
        "destinations": list(params.destinations),
        "targets": list(params.targets),
        "cpu_range": list(params.cpu_range),
        "mem_range": list(params.mem_range),
        "io_range": list(params.io_range),
        "bw_range": list(params.bw_range),
        "duration_range": list(params.duration_range),
        "gap_range": list(params.gap_range),
        "usage_fraction_range": list(params.usage_fraction_range),
    }


def _resolve_out_dir(args, scenario: Scenario) -> Path:
    if args.out:
        return Path(args.out)
    if scenario.out_dir is not None:
        return scenario.out_dir
    env = os.environ.get("TOPOMAN_OUT")
    if env:
        return Path(env)
    raise ValidationError(
        "no output directory: pass --out, set out_dir in the scenario, "
        "or export TOPOMAN_OUT"
    )


def _sim_params(scenario: Scenario) -> SimParams:
    return SimParams(
        sla=scenario.sla,
        realistic=scenario.realistic,
        capacity_aware=scenario.capacity_aware,
    )


def _write(path: Path, payload: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(payload, encoding="utf-8")


def _write_result(result: sim.SimResult, out_dir: Path, prefix: str = "") -> list[Path]:
    files = {
        f"{prefix}utilization.csv": metrics.series_to_csv(result.series),
        f"{prefix}events.log": sim.events_to_log(result),
        f"{prefix}decisions.json": sim.decisions_to_json(result),
        f"{prefix}cache_counters.json": json.dumps(
            result.cache_counters, sort_keys=True, indent=2
        ) + "\n",
    }
    written = []
    for name, payload in files.items():
        target = out_dir / name
        _write(target, payload)
        written.append(target)
    return written


def cmd_validate(args) -> int:
    scenario = load_scenario(args.scenario)
    problems: list[str] = []
    topology = None
    try:
        topology = topo.load_topology(scenario.topology_path)
    except (ParseError, ValidationError) as exc:
        problems.extend(str(v) for v in getattr(exc, "violations", None) or [str(exc)])
    try:
        trace = _resolve_trace(scenario, args.seed)
        if topology is not None:
            problems.extend(str(v) for v in trace.validate_against(topology))
    except TopomanError as exc:
        problems.append(str(exc))
    if problems:
        print(f"{len(problems)} problem(s) found:")
        for line in problems:
            print(f"  - {line}")
        return 1
    print("scenario OK")
    return 0


def cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    out_dir = _resolve_out_dir(args, scenario)
    topology = topo.load_topology(scenario.topology_path)
    trace = _resolve_trace(scenario, args.seed)
    scheme = Scheme(args.scheme) if args.scheme else scenario.scheme
    result = sim.run(topology, trace, scheme, _sim_params(scenario), scenario.sample_interval)
    written = _write_result(result, out_dir)
    admitted = sum(1 for _, kind, _, d in result.events
                   if kind == "admission_attempt" and d == "admitted")
    print(f"scheme={scheme.value} requests={len(trace.requests)} admitted={admitted} "
          f"samples={len(result.series.samples)}")
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_compare(args) -> int:
    scenario = load_scenario(args.scenario)
    out_dir = _resolve_out_dir(args, scenario)
    topology = topo.load_topology(scenario.topology_path)
    trace = _resolve_trace(scenario, args.seed)
    results = sim.run_comparison(
        topology, trace, ALL_SCHEMES, _sim_params(scenario), scenario.sample_interval
    )
    for label, result in results.items():
        _write_result(result, out_dir, prefix=f"{label}_")
    report = metrics.compare(results)
    report_path = out_dir / "report.json"
    _write(report_path, metrics.report_to_json(report))
    for label, means in report.scheme_means.items():
        print(f"{label}: cpu={means['cpu']:.4f} mem={means['mem']:.4f} "
              f"overall={means['overall']:.4f} asymmetry={report.asymmetry[label]:.4f}")
    print(f"proposed_below_baseline_average={report.proposed_below_baseline_average}")
    print(f"wrote {report_path}")
    return 0


def cmd_gen_trace(args) -> int:
    scenario = load_scenario(args.scenario)
    if scenario.generator is None:
        raise ValidationError("scenario has no 'generator' section to generate from")
    trace = _resolve_trace(scenario, args.seed)
    if args.out_file:
        target = Path(args.out_file)
    else:
        target = _resolve_out_dir(args, scenario) / "trace.json"
    _write(target, sim.trace_to_json(trace))
    print(f"wrote {target} ({len(trace.requests)} requests)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topoman",
        description="Resource-aware topology management simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", required=True, help="scenario JSON file")
        p.add_argument("--out", help="output directory (overrides scenario out_dir)")
        p.add_argument("--seed", type=int, help="trace generator seed override")

    p_validate = sub.add_parser("validate", help="check topology and trace")
    common(p_validate)
    p_validate.set_defaults(handler=cmd_validate)

    p_run = sub.add_parser("run", help="simulate one admission scheme")
    common(p_run)
    p_run.add_argument(
        "--scheme", choices=[s.value for s in ALL_SCHEMES],
        help="admission scheme (overrides scenario key)",
    )
    p_run.set_defaults(handler=cmd_run)

    p_compare = sub.add_parser("compare", help="simulate all three schemes and report")
    common(p_compare)
    p_compare.set_defaults(handler=cmd_compare)

    p_gen = sub.add_parser("gen-trace", help="write the generated workload trace")
    common(p_gen)
    p_gen.add_argument("--out-file", help="trace file destination")
    p_gen.set_defaults(handler=cmd_gen_trace)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except TopomanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Frozen outputs for the shipped default scenario.

These bytes pin the whole deterministic pipeline: event ordering, cache
behavior, fair-share arithmetic and float formatting. Regenerate only on
a deliberate behavior change:
    topoman run --scenario scenarios/default/scenario.json --out <dir>
"""

from pathlib import Path

from topoman.cli import main

REPO = Path(__file__).resolve().parent.parent
GOLDEN = REPO / "tests" / "golden"


def test_default_scenario_matches_golden_outputs(tmp_path):
    out = tmp_path / "out"
    scenario = REPO / "scenarios" / "default" / "scenario.json"
    assert main(["run", "--scenario", str(scenario), "--out", str(out)]) == 0
    assert (out / "utilization.csv").read_bytes() == (
        GOLDEN / "default_utilization.csv"
    ).read_bytes()
    assert (out / "events.log").read_bytes() == (
        GOLDEN / "default_events.log"
    ).read_bytes()

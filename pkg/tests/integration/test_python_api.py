"""Tests for the Python API."""

from pathlib import Path

import pytest

from swampcast import Scenario, run_scenario
from swampcast.inout import read_trace
from swampcast.scenario import ScenarioError, ScenarioSpec

EXAMPLE_DIR = Path(__file__).parent.parent.parent / "example_scenarios"


class TestScenarioInstantiation:
    """Build scenarios from code and from files."""

    def test_direct_instantiation(self) -> None:
        scenario = Scenario(
            placement={"kind": "lattice-line", "n": 20},
            radio={"r": 3, "s": 1},
            algorithm="A",
        )
        outcome = scenario.run()
        assert outcome.informed_ok
        assert outcome.bound_ok
        assert outcome.net.n == 20
        assert outcome.closed_form == 18

    def test_load_example(self) -> None:
        scenario = Scenario.load(EXAMPLE_DIR / "a-line.yaml")
        assert scenario.name == "a-line"
        assert scenario.algorithm.name == "A"
        assert scenario.network().n == 100


class TestScenarioVerify:
    """`verify()` runs the algorithm and audits it."""

    @pytest.mark.parametrize(
        "example",
        ["a-line", "a-line-interior", "a2-grid", "b-random-line", "d-explicit", "flood-chain"],
    )
    def test_examples_pass(self, example: str) -> None:
        report = Scenario.load(EXAMPLE_DIR / f"{example}.yaml").verify()
        assert report.passed, [str(c) for c in report.failures()]
        assert report.rounds is not None
        assert report.bound is not None
        assert report.rounds <= report.bound

    @pytest.mark.slow
    def test_small_plane_passes(self) -> None:
        report = Scenario.load(EXAMPLE_DIR / "b2-small-plane.yaml").verify()
        assert report.passed, [str(c) for c in report.failures()]
        assert "spokesman-coverage" in {c.name for c in report.checks}

    def test_broadcast_checks(self) -> None:
        report = Scenario.load(EXAMPLE_DIR / "b-random-line.yaml").verify()
        names = [c.name for c in report.checks]
        assert names == [
            "link-set",
            "trace-reception",
            "single-home",
            "discovery-D*",
            "spokesman-coverage",
            "relay-collisions",
        ]

    def test_lattice_lower_bound_check(self) -> None:
        report = Scenario.load(EXAMPLE_DIR / "a-line.yaml").verify()
        lower = next(c for c in report.checks if c.name == "lower-bound")
        assert lower.passed
        assert report.eccentricity == 33

    @pytest.mark.parametrize("example", ["a-line", "a2-grid"])
    def test_lattice_schedule_checks(self, example: str) -> None:
        report = Scenario.load(EXAMPLE_DIR / f"{example}.yaml").verify()
        checks = {c.name: c for c in report.checks}
        assert checks["transmitter-spacing"].passed
        assert checks["scheme-collisions"].passed
        assert report.closed_form is not None
        assert report.closed_form_ok is not None

    def test_closed_form_is_reported(self) -> None:
        report = run_scenario(
            {"placement": {"kind": "lattice-line", "n": 20}, "radio": {"r": 3, "s": 1}, "algorithm": "A"}
        )
        assert report.closed_form == 18
        assert report.closed_form_ok
        assert report.rounds is not None
        assert report.rounds <= 18
        assert report.passed

    def test_run_scenario_rejects_a_bad_mapping(self) -> None:
        with pytest.raises(ScenarioError):
            run_scenario({"placement": {"kind": "lattice-line", "n": 20}, "algorithm": "Z"})

    def test_flood_rounds_are_the_eccentricity(self) -> None:
        outcome = Scenario.load(EXAMPLE_DIR / "flood-chain.yaml").run()
        assert outcome.result is None
        assert outcome.rounds == outcome.bound == 12

    def test_run_scenario_accepts_a_plain_spec(self) -> None:
        spec = ScenarioSpec.from_yaml(EXAMPLE_DIR / "a-line-interior.yaml")
        report = run_scenario(spec)
        assert report.scenario == "a-line-interior"
        assert report.passed


class TestTraceOutput:
    """JSON-lines traces written by `run()`."""

    def test_trace_has_header_and_rounds(self, tmp_path: Path) -> None:
        trace = tmp_path / "traces" / "a.jsonl"
        outcome = Scenario.load(EXAMPLE_DIR / "a-line-interior.yaml").run(trace=trace)
        records = read_trace(trace)
        header, *rounds = records
        assert header == {
            "schema": 1,
            "scenario": "a-line-interior",
            "n": 60,
            "dim": 1,
            "algorithm": "A",
        }
        assert outcome.result is not None
        assert len(rounds) == outcome.result.rounds_run
        assert rounds[0]["round"] == 0
        assert rounds[0]["transmitters"][0]["node"] == 27

    def test_flood_writes_no_trace(self, tmp_path: Path) -> None:
        trace = tmp_path / "flood.jsonl"
        Scenario.load(EXAMPLE_DIR / "flood-chain.yaml").run(trace=trace)
        assert not trace.exists()

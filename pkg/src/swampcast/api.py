"""Public Python API for swampcast.

Provides the `Scenario` class, a `ScenarioSpec` with operational methods for
building the network, running the configured algorithm and auditing the run
against the oracles, plus sweep helpers.

This module sits at the top of the internal import tree so it can safely
import from all other modules without circular dependencies.
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from collections.abc import Mapping
from typing import Any

from swampcast.discovery import KnowledgeSet, run_procedure_D, run_procedure_D_star
from swampcast.engine import SimResult
from swampcast.geometry import Network, generate_placement
from swampcast.inout import save_trace
from swampcast.lattice import (
    ImpossibleBroadcastError,
    execute_plan,
    grid_closed_form_bound,
    grid_lower_bound,
    line_closed_form_bound,
    line_lower_bound,
    plan_algorithm_a,
    plan_algorithm_a2,
)
from swampcast.oracle import (
    CheckResult,
    FloodingBaseline,
    VerificationReport,
    check_discovery_complete,
    check_collision_free,
    check_discovery_exact,
    check_link_set,
    check_single_home,
    check_spokesman_coverage,
    check_trace,
    check_transmitter_spacing,
    flooding_baseline,
)
from swampcast.partition import make_partition
from swampcast.scenario import ScenarioSpec, SweepSpec, scenario_from_mapping
from swampcast.unknown import RelayRun, run_algorithm_B, run_algorithm_B2

logger = logging.getLogger(__name__)

BROADCASTS = frozenset({"A", "A2", "B", "B2"})


@dataclass
class ScenarioRun:
    """Everything a scenario run produced.

    Attributes:
        scenario: Scenario id.
        net: The network the run used.
        baseline: Oracle flood from the source (gives D).
        result: Engine trace; None for the idealised flood.
        bound: Rounds the algorithm is guaranteed to finish within.
        rounds: Rounds used: to completion for broadcasts, all rounds for
            discovery, the eccentricity for the flood.
        relay: Audits and accounting of B and B2.
        knowledge: Per-node knowledge after D or D* (for B and B2, after
            their D* stage).
        closed_form: The closed-form round bound of A or A2, reported next
            to the schedule bound.

    """

    scenario: str
    algorithm: str
    net: Network
    baseline: FloodingBaseline
    result: SimResult | None
    bound: int | None
    rounds: int | None
    relay: RelayRun | None = None
    knowledge: list[KnowledgeSet] | None = None
    closed_form: int | None = None

    @property
    def informed_ok(self) -> bool:
        """Broadcasts must inform exactly the source's component."""
        if self.algorithm not in BROADCASTS or self.result is None:
            return True
        return set(self.result.informed_final) == set(self.baseline.hops)

    @property
    def bound_ok(self) -> bool:
        """Whether the run stayed within its bound."""
        if self.bound is None:
            return True
        return self.rounds is not None and self.rounds <= self.bound


class Scenario(ScenarioSpec):
    """A swampcast scenario with operational run and verify methods.

    Usage when loading from file::

        from swampcast import Scenario

        scenario = Scenario.load("example_scenarios/b2-small-plane.yaml")
        report = scenario.verify()
        print(report.passed, report.rounds, report.bound)

    Usage when building from code::

        scenario = Scenario(
            placement={"kind": "lattice-line", "n": 20},
            radio={"r": 3, "s": 1},
            algorithm="A",
        )
        run = scenario.run()

    """

    @classmethod
    def load(cls, config_path: Path | str) -> "Scenario":
        """Load a scenario file."""
        return cls.from_yaml(config_path)

    def network(self) -> Network:
        """Build the placement with the scenario's seed."""
        return generate_placement(self.placement, self.radio, self.run_options.seed)

    def header(self, net: Network) -> dict[str, object]:
        """Trace header fields."""
        return {
            "scenario": self.name,
            "n": net.n,
            "dim": net.dim,
            "algorithm": self.algorithm.name,
        }

    def run(
        self,
        *,
        horizon_mult: int | None = None,
        trace: Path | None = None,
    ) -> ScenarioRun:
        """Run the configured algorithm.

        Args:
            horizon_mult: Overrides `run.horizon_mult` for B and B2.
            trace: Where to write a JSON-lines trace; overrides `run.trace`.

        """
        net = self.network()
        name = self.algorithm.name
        source = self.algorithm.source
        mult = horizon_mult or self.run_options.horizon_mult
        max_rounds = self.run_options.max_rounds
        baseline = flooding_baseline(net, source)
        logger.info("Scenario %s: %s on %d nodes", self.name, name, net.n)

        if name in ("A", "A2"):
            r, s = int(self.radio.r), int(self.radio.s)
            plan_fn = plan_algorithm_a if name == "A" else plan_algorithm_a2
            plan = plan_fn(net.n, r, s, source)
            result = execute_plan(net, plan, max_rounds)
            closed_form_fn = line_closed_form_bound if name == "A" else grid_closed_form_bound
            outcome = ScenarioRun(
                self.name,
                name,
                net,
                baseline,
                result,
                plan.bound,
                result.rounds_used,
                closed_form=closed_form_fn(net.n, r, s),
            )
        elif name in ("B", "B2"):
            runner = run_algorithm_B if name == "B" else run_algorithm_B2
            relay = runner(net, source, horizon_mult=mult, max_rounds=max_rounds)
            outcome = ScenarioRun(
                self.name,
                name,
                net,
                baseline,
                relay.result,
                relay.bound,
                relay.result.rounds_used,
                relay=relay,
                knowledge=relay.knowledge,
            )
        elif name in ("D", "Dstar"):
            partition = make_partition(net.params, net.dim)
            procedure = run_procedure_D if name == "D" else run_procedure_D_star
            discovered = procedure(net, partition)
            outcome = ScenarioRun(
                self.name,
                name,
                net,
                baseline,
                discovered.result,
                discovered.result.rounds_run,
                discovered.result.rounds_run,
                knowledge=discovered.knowledge,
            )
        else:
            outcome = ScenarioRun(
                self.name,
                name,
                net,
                baseline,
                None,
                baseline.eccentricity,
                baseline.eccentricity,
            )

        trace_path = trace or self.run_options.trace
        if trace_path is not None:
            if outcome.result is None:
                logger.warning("The %s baseline has no round trace to write", name)
            else:
                save_trace(outcome.result, trace_path, self.header(net))
        logger.info(
            "Scenario %s finished: rounds=%s bound=%s", self.name, outcome.rounds, outcome.bound
        )
        return outcome

    def verify(
        self,
        *,
        horizon_mult: int | None = None,
        trace: Path | None = None,
    ) -> VerificationReport:
        """Run the scenario and audit it against the oracles."""
        started = time.perf_counter()
        outcome = self.run(horizon_mult=horizon_mult, trace=trace)
        report = audit(outcome)
        report.runtime = time.perf_counter() - started
        return report


def audit(outcome: ScenarioRun) -> VerificationReport:
    """Oracle checks applicable to a finished run."""
    net = outcome.net
    closed_form_ok = None
    if outcome.closed_form is not None and outcome.rounds is not None:
        closed_form_ok = outcome.rounds <= outcome.closed_form
    report = VerificationReport(
        outcome.scenario,
        completion_round=None if outcome.result is None else outcome.result.completion_round,
        rounds=outcome.rounds,
        bound=outcome.bound,
        eccentricity=outcome.baseline.eccentricity,
        informed_ok=outcome.informed_ok,
        bound_ok=outcome.bound_ok,
        closed_form=outcome.closed_form,
        closed_form_ok=closed_form_ok,
    )
    report.add(check_link_set(net))
    if outcome.result is not None:
        report.add(check_trace(net, outcome.result))

    name = outcome.algorithm
    if name in ("A", "A2") and outcome.result is not None:
        r, s = int(net.params.r), int(net.params.s)
        if outcome.rounds is not None:
            floor = outcome.baseline.eccentricity
            if name == "A":
                floor = max(floor, line_lower_bound(net.n, r))
            detail = f"rounds={outcome.rounds} floor={floor}"
            if name == "A2":
                detail += f" worst-source floor={grid_lower_bound(net.n, r, s)}"
            report.add(CheckResult("lower-bound", passed=outcome.rounds >= floor, detail=detail))
        report.add(check_transmitter_spacing(outcome.result, net, 2 * r))
        report.add(check_collision_free(outcome.result.rounds, "scheme-collisions"))
    if name in ("B", "B2", "D", "Dstar"):
        partition = make_partition(net.params, net.dim)
        report.add(check_single_home(net, partition))
        if name == "D":
            report.add(check_discovery_exact(net, partition))
        elif outcome.knowledge is not None:
            report.add(check_discovery_complete(net, partition, outcome.knowledge))
    if outcome.relay is not None:
        report.add(check_spokesman_coverage(net, outcome.relay))
        relaying = outcome.relay.result.rounds[outcome.relay.discovery_rounds :]
        report.add(check_collision_free(relaying, "relay-collisions"))
    return report


def run_scenario(scenario: ScenarioSpec | Mapping[str, Any]) -> VerificationReport:
    """Verify one scenario: a spec, a `Scenario` or a plain config mapping.

    Raises:
        ScenarioError: a mapping that is not a valid scenario.

    """
    if isinstance(scenario, Mapping):
        scenario = scenario_from_mapping(scenario, model=Scenario)
    elif not isinstance(scenario, Scenario):
        scenario = Scenario.model_validate(dict(scenario))
    return scenario.verify()


def csv_row(scenario: ScenarioSpec, report: VerificationReport) -> dict[str, Any]:
    """A sweep CSV row."""
    return {
        "id": scenario.name,
        "n": None,
        "r": scenario.radio.r,
        "s": scenario.radio.s,
        "gamma": scenario.radio.gamma,
        "D": report.eccentricity,
        "rounds": report.rounds,
        "bound": report.bound,
        "closed_form": report.closed_form,
        "informed_ok": report.informed_ok,
        "bound_ok": report.bound_ok,
        "closed_form_ok": report.closed_form_ok,
        "checks_ok": report.checks_ok,
        "passed": report.passed,
    }


def _sweep_row(scenario: "Scenario") -> dict[str, Any] | None:
    started = time.perf_counter()
    try:
        outcome = scenario.run()
    except ImpossibleBroadcastError as exc:
        logger.warning("Skipping %s: %s", scenario.name, exc)
        return None
    report = audit(outcome)
    report.runtime = time.perf_counter() - started
    row = csv_row(scenario, report)
    row["n"] = outcome.net.n
    return row


def load_sweep(config_path: Path | str) -> SweepSpec:
    """Load a sweep file."""
    return SweepSpec.from_yaml(config_path)


def sweep(spec: SweepSpec, *, jobs: int = 1) -> list[dict[str, Any]]:
    """Run every valid grid point; rows come back in grid order.

    Points that fail validation, or whose lattice turns out to be
    disconnected, are skipped with a warning.
    """
    scenarios = spec.expand(Scenario)
    logger.info("Sweep %s: %d scenario(s), %d job(s)", spec.name, len(scenarios), jobs)
    if jobs <= 1:
        results = [_sweep_row(s) for s in scenarios]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_row, scenarios))
    rows = [row for row in results if row is not None]
    passed = sum(1 for row in rows if row["passed"])
    logger.info("Sweep %s: %d of %d passed", spec.name, passed, len(rows))
    return rows

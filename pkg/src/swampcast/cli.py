"""swampcast CLI entry point."""

import logging
import sys
from importlib.metadata import version
from pathlib import Path
from typing import Annotated

import typer
from rich import print as rich_print
from rich.table import Table

from swampcast.api import Scenario, ScenarioRun, load_sweep, sweep
from swampcast.engine import GrantError, ProgramFaultError
from swampcast.geometry import PlacementError
from swampcast.inout import csv_text, placement_text, write_placement
from swampcast.lattice import ImpossibleBroadcastError
from swampcast.oracle import LEMMA_FAMILIES, VerificationReport
from swampcast.oracle import check_lemmas as run_lemma_battery
from swampcast.scenario import ScenarioError

VerboseOption = Annotated[
    bool,
    typer.Option(
        "--verbose",
        "-v",
        help="Enable verbose (DEBUG) logging output",
    ),
]

ConfigArgument = Annotated[
    Path,
    typer.Argument(help="Scenario configuration file (YAML)"),
]

TraceOption = Annotated[
    Path | None,
    typer.Option("--trace", "-t", help="Write a JSON-lines round trace to this file"),
]

HorizonMultOption = Annotated[
    int | None,
    typer.Option(
        "--horizon-mult",
        min=1,
        help="Round budget multiple for B and B2 (overrides run.horizon_mult)",
    ),
]

DOMAIN_ERRORS = (
    ScenarioError,
    PlacementError,
    ImpossibleBroadcastError,
    GrantError,
    ProgramFaultError,
)


def get_version() -> str:
    """Get the version of swampcast from package metadata."""
    return version("swampcast")


def version_callback(*, show_version: bool) -> None:
    """Handle --version flag."""
    if show_version:
        typer.echo(f"swampcast {get_version()}")
        raise typer.Exit


app = typer.Typer()
logger = logging.getLogger(__name__)


# Diagnostics go to stderr, leaving stdout for tables and CSV
def echo_success(msg: str) -> None:  # noqa: D103 - self-explanatory function
    typer.secho(msg, fg=typer.colors.GREEN, err=True)

def echo_neutral(msg: str) -> None:  # noqa: D103 - self-explanatory function
    typer.secho(msg, err=True)

def echo_warning(msg: str) -> None:  # noqa: D103 - self-explanatory function
    typer.secho(msg, fg=typer.colors.YELLOW, err=True)

def echo_error(msg: str) -> None:  # noqa: D103 - self-explanatory function
    typer.secho(msg, fg=typer.colors.RED, err=True)


def configure_logging(*, verbose: bool) -> None:
    """Configure logging level based on verbose flag."""
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)-8s [%(name)s] %(message)s",
        datefmt="%Y-%m-%dT%H:%M:%S",
        force=True,
    )


def _load_scenario(config: Path) -> Scenario:
    try:
        scenario = Scenario.load(config)
    except ScenarioError as exc:
        echo_error(f"Invalid scenario: {exc}")
        raise typer.Exit(code=1) from exc
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug("Resolved scenario %s:\n%s", scenario.name, scenario.to_yaml_str())
    return scenario


@app.callback()
def main_callback(
    *,
    verbose: VerboseOption = False,
    _version: Annotated[
        bool,
        typer.Option(
            "--version",
            help="Show version and exit",
            callback=version_callback,
            is_eager=True,
        ),
    ] = False,
) -> None:
    """Simulate broadcasting in geometric radio networks under the swamping model."""
    configure_logging(verbose=verbose)


@app.command()
def gen(
    config: ConfigArgument,
    output: Annotated[
        Path | None,
        typer.Option("--output", "-o", help="Placement file (default: stdout)"),
    ] = None,
) -> None:
    """Generate a scenario's placement and write it as a placement file.

    Args:
        config: scenario file whose `placement`, `radio` and seed are used.
        output: where to write; the coordinates go to stdout when omitted.

    """
    scenario = _load_scenario(config)
    try:
        net = scenario.network()
    except DOMAIN_ERRORS as exc:
        echo_error(str(exc))
        raise typer.Exit(code=1) from exc

    comment = f"{scenario.name} seed={scenario.run_options.seed}"
    if output is None:
        typer.echo(placement_text(net, comment), nl=False)
        return
    write_placement(net, output, comment)
    echo_success(f"✓ Wrote {net.n} nodes to `{output}`")


def _display_run(outcome: ScenarioRun) -> None:
    completion = None if outcome.result is None else outcome.result.completion_round
    fields = {
        "scenario": outcome.scenario,
        "algorithm": outcome.algorithm,
        "n": outcome.net.n,
        "D": outcome.baseline.eccentricity,
        "completion_round": completion,
        "rounds": outcome.rounds,
        "bound": outcome.bound,
        "closed_form": outcome.closed_form,
        "informed_ok": outcome.informed_ok,
        "bound_ok": outcome.bound_ok,
    }
    if sys.stdout.isatty():
        table = Table(show_header=True, header_style="bold yellow")
        table.add_column("field")
        table.add_column("value")
        for key, value in fields.items():
            table.add_row(key, str(value))
        rich_print(table)
    else:
        typer.echo(" ".join(f"{key}={value}" for key, value in fields.items()))


def _display_report(report: VerificationReport) -> None:
    if sys.stdout.isatty():
        table = Table(show_header=True, header_style="bold yellow")
        table.add_column("check")
        table.add_column("passed")
        table.add_column("detail")
        for check in report.checks:
            mark = "[green]yes[/green]" if check.passed else "[red]no[/red]"
            table.add_row(check.name, mark, check.detail)
        rich_print(table)
    else:
        for check in report.checks:
            typer.echo(str(check))
    echo_neutral(
        f"{report.scenario}: rounds={report.rounds} bound={report.bound}"
        f" D={report.eccentricity} informed_ok={report.informed_ok}"
        f" bound_ok={report.bound_ok}"
        + ("" if report.closed_form is None else f" closed_form={report.closed_form}")
        + f" ({report.runtime:.2f}s)"
    )


@app.command()
def run(
    config: ConfigArgument,
    trace: TraceOption = None,
    horizon_mult: HorizonMultOption = None,
) -> None:
    """Run a single scenario.

    Exits non-zero if a broadcast left part of the source's component
    uninformed or overran its round bound.
    """
    scenario = _load_scenario(config)
    try:
        outcome = scenario.run(horizon_mult=horizon_mult, trace=trace)
    except DOMAIN_ERRORS as exc:
        echo_error(str(exc))
        raise typer.Exit(code=1) from exc
    _display_run(outcome)
    if trace is not None and outcome.result is not None:
        echo_success(f"✓ Trace written to `{trace}`")
    if not (outcome.informed_ok and outcome.bound_ok):
        echo_warning(f"Scenario {scenario.name} did not meet its guarantee")
        raise typer.Exit(code=1)


@app.command()
def verify(
    config: ConfigArgument,
    trace: TraceOption = None,
    horizon_mult: HorizonMultOption = None,
) -> None:
    """Run a scenario and audit it against the brute-force oracles."""
    scenario = _load_scenario(config)
    try:
        report = scenario.verify(horizon_mult=horizon_mult, trace=trace)
    except DOMAIN_ERRORS as exc:
        echo_error(str(exc))
        raise typer.Exit(code=1) from exc
    _display_report(report)
    if not report.passed:
        echo_warning(f"✗ {len(report.failures())} check(s) failed for {scenario.name}")
        raise typer.Exit(code=1)
    echo_success(f"✓ All {len(report.checks)} checks passed for {scenario.name}")


@app.command("sweep")
def sweep_command(
    config: Annotated[Path, typer.Argument(help="Sweep configuration file (YAML)")],
    output: Annotated[
        Path | None,
        typer.Option("--output", "-o", help="CSV file (default: stdout)"),
    ] = None,
    jobs: Annotated[
        int,
        typer.Option("--jobs", "-j", min=1, help="Worker processes"),
    ] = 1,
) -> None:
    """Run a parameter sweep and write one CSV row per scenario."""
    try:
        spec = load_sweep(config)
        rows = sweep(spec, jobs=jobs)
    except DOMAIN_ERRORS as exc:
        echo_error(str(exc))
        raise typer.Exit(code=1) from exc

    text = csv_text(rows)
    if output is None:
        typer.echo(text, nl=False)
    else:
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(text)
        echo_success(f"✓ Wrote {len(rows)} rows to `{output}`")

    failed = [row["id"] for row in rows if not row["passed"]]
    if failed:
        echo_warning(f"✗ {len(failed)} of {len(rows)} scenario(s) failed: {', '.join(failed)}")
        raise typer.Exit(code=1)


@app.command()
def check_lemmas(
    family: Annotated[
        str,
        typer.Option("--family", "-f", help="line, plane, lattice or all"),
    ] = "all",
    count: Annotated[int, typer.Option("--count", "-n", min=1, help="Random instances per family")] = 5,
    seed: Annotated[int, typer.Option("--seed", "-s", help="Seed for the random instances")] = 0,
) -> None:
    """Check the structural guarantees the algorithms rely on, on random instances."""
    if family != "all" and family not in LEMMA_FAMILIES:
        echo_error(f"Unknown family {family!r}; expected one of: all, {', '.join(LEMMA_FAMILIES)}")
        raise typer.Exit(code=1)
    report = run_lemma_battery(family, count, seed)
    _display_report(report)
    if not report.passed:
        echo_warning(f"✗ {len(report.failures())} of {len(report.checks)} check(s) failed")
        raise typer.Exit(code=1)
    echo_success(f"✓ All {len(report.checks)} checks passed")

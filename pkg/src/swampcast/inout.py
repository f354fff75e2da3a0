"""Input/output utilities for swampcast.

Placement files, JSON-lines traces and CSV result tables. Everything written
here is deterministic: keys and node lists are sorted, so identical runs give
identical bytes.
"""

import csv
import io
import json
import logging
from collections.abc import Iterable, Mapping
from pathlib import Path
from typing import TextIO

from swampcast.engine import SimResult
from swampcast.geometry import Network, PlacementError

logger = logging.getLogger(__name__)

TRACE_SCHEMA = 1

CSV_COLUMNS = (
    "id",
    "n",
    "r",
    "s",
    "gamma",
    "D",
    "rounds",
    "bound",
    "closed_form",
    "informed_ok",
    "bound_ok",
    "closed_form_ok",
    "checks_ok",
    "passed",
)


def parse_placement(text: str, source: str = "<string>") -> list[list[float]]:
    """Parse one node per line, whitespace-separated coordinates, `#` comments.

    Raises:
        PlacementError: on a malformed line or mixed dimensions, naming the line.

    """
    points: list[list[float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            coords = [float(tok) for tok in line.split()]
        except ValueError as exc:
            msg = f"{source}:{lineno}: not a list of numbers: {raw.strip()!r}"
            raise PlacementError(msg) from exc
        if points and len(coords) != len(points[0]):
            msg = (
                f"{source}:{lineno}: expected {len(points[0])} coordinate(s),"
                f" got {len(coords)}"
            )
            raise PlacementError(msg)
        points.append(coords)
    if not points:
        msg = f"{source}: no nodes in placement"
        raise PlacementError(msg)
    return points


def read_placement(path: Path) -> list[list[float]]:
    """Read a placement file."""
    with path.open() as f:
        return parse_placement(f.read(), str(path))


def placement_text(net: Network, comment: str | None = None) -> str:
    """A network's coordinates in placement-file form."""
    lines = [f"# {comment}"] if comment else []
    lines.append(f"# n={net.n} dim={net.dim} r={net.params.r} s={net.params.s} gamma={net.params.gamma}")
    lines += [" ".join(f"{c:.17g}" for c in net.position(u)) for u in range(net.n)]
    return "\n".join(lines) + "\n"


def write_placement(net: Network, path: Path, comment: str | None = None) -> None:
    """Write a placement file, creating parent directories."""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(placement_text(net, comment))
    logger.info("Wrote %d nodes to %s", net.n, path)


def _dumps(record: Mapping[str, object]) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def trace_records(
    result: SimResult, header: Mapping[str, object]
) -> Iterable[dict[str, object]]:
    """Header, then round records with the grant events of each round before it."""
    yield {"schema": TRACE_SCHEMA, **header}
    grants: dict[int, list] = {}
    for event in result.grants:
        grants.setdefault(event.round, []).append(event)
    for trace in result.rounds:
        for event in grants.get(trace.round, []):
            yield {
                "grant": {
                    "round": event.round,
                    "region": list(event.region),
                    "block": event.block,
                    "homes": [[h, flag] for h, flag in event.homes],
                    "nodes": list(event.nodes),
                },
            }
        yield {
            "round": trace.round,
            "transmitters": [
                {"node": u, "kind": str(msg.kind), "origin": list(msg.origin)}
                for u, msg in sorted(trace.transmitters.items())
            ],
            "deliveries": [
                {"node": v, "from": sender, "kind": str(msg.kind)}
                for v, (sender, msg) in sorted(trace.deliveries.items())
            ],
            "collision_blocked": sorted(trace.collision_blocked),
            "swamp_blocked": sorted(trace.swamp_blocked),
        }


def write_trace(result: SimResult, out: TextIO, header: Mapping[str, object]) -> int:
    """Write a JSON-lines trace; return the number of lines."""
    count = 0
    for record in trace_records(result, header):
        out.write(_dumps(record) + "\n")
        count += 1
    return count


def save_trace(result: SimResult, path: Path, header: Mapping[str, object]) -> None:
    """Write a JSON-lines trace file."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as f:
        count = write_trace(result, f, header)
    logger.info("Wrote %d trace records to %s", count, path)


def read_trace(path: Path) -> list[dict[str, object]]:
    """Read back a JSON-lines trace."""
    with path.open() as f:
        return [json.loads(line) for line in f if line.strip()]


def csv_text(rows: Iterable[Mapping[str, object]]) -> str:
    """Result rows as CSV with the fixed column order."""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({col: _csv_cell(row.get(col)) for col in CSV_COLUMNS})
    return buffer.getvalue()


def _csv_cell(value: object) -> object:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    return value

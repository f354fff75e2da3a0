"""Brute-force oracles and the lemma battery.

The oracles re-derive links and deliveries straight from coordinates with
`math.dist`, one pair at a time, without touching the distance matrices of
`swampcast.geometry`. Agreement between the two is what the checks test.

Every checker returns a `CheckResult`; failures carry a witness (node ids,
round, distances) small enough to reproduce by hand.
"""

import logging
import math
import time
from collections import deque
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from swampcast.discovery import KnowledgeSet, run_procedure_D, run_procedure_D_star
from swampcast.engine import Message, RoundTrace, SimResult, deliveries_for_round, run
from swampcast.geometry import Network, PlacementSpec, Point, RadioParams, generate_placement
from swampcast.lattice import (
    ImpossibleBroadcastError,
    LocalScheme,
    annulus_line_coverage,
    line_network,
    local_scheme_programs,
    plan_algorithm_a,
)
from swampcast.partition import Partition, PartitionLabel, PlanePartition, make_partition
from swampcast.spokesmen import check_closer_farther, elect_plane_spokesmen
from swampcast.unknown import RelayRun, run_algorithm_B, run_procedure_T, run_procedure_T2

logger = logging.getLogger(__name__)

LemmaFamily = Literal["line", "plane", "lattice", "all"]
LEMMA_FAMILIES: tuple[str, ...] = ("line", "plane", "lattice")

COVERAGE_TOLERANCE = 1e-9
RECEPTION_ROUNDS = 10
CLOSER_FARTHER_SAMPLES = 2_000
SCALING_HOPS = (5, 10, 20, 40)
SCALING_MIN_R2 = 0.99


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one check; `witness` pins down the first failure."""

    name: str
    passed: bool
    detail: str = ""
    witness: Mapping[str, object] | None = None

    def __str__(self) -> str:
        """One line: name, verdict and detail."""
        verdict = "ok" if self.passed else "FAILED"
        text = f"{self.name}: {verdict}"
        if self.detail:
            text += f" ({self.detail})"
        if self.witness:
            text += f" witness={dict(self.witness)}"
        return text


@dataclass
class VerificationReport:
    """Checks gathered for one scenario or one lemma battery.

    The report passes iff the informed set is right, the round bound holds
    and every check passes. For A and A2 the closed-form bound is reported
    as well; it does not decide the verdict.
    """

    scenario: str
    checks: list[CheckResult] = field(default_factory=list)
    completion_round: int | None = None
    rounds: int | None = None
    bound: int | None = None
    eccentricity: int | None = None
    informed_ok: bool = True
    bound_ok: bool = True
    closed_form: int | None = None
    closed_form_ok: bool | None = None
    runtime: float = 0.0

    def add(self, check: CheckResult) -> CheckResult:
        """Append a check and log failures."""
        self.checks.append(check)
        if not check.passed:
            logger.warning("%s: %s", self.scenario, check)
        return check

    @property
    def checks_ok(self) -> bool:
        """Whether every recorded check passed."""
        return all(c.passed for c in self.checks)

    @property
    def passed(self) -> bool:
        """Overall verdict."""
        return self.informed_ok and self.bound_ok and self.checks_ok

    def failures(self) -> list[CheckResult]:
        """The failed checks."""
        return [c for c in self.checks if not c.passed]


def _coords(net: Network) -> list[tuple[float, ...]]:
    return [tuple(float(c) for c in row) for row in net.positions.tolist()]


def oracle_neighbors(net: Network, u: int) -> set[int]:
    """Nodes w with s < dist(u, w) <= r, by a linear scan."""
    coords = _coords(net)
    r, s = net.params.r, net.params.s
    here = coords[u]
    return {
        w
        for w, there in enumerate(coords)
        if w != u and s < math.dist(here, there) <= r
    }


@dataclass(frozen=True)
class OracleRound:
    """Receptions and blocked listeners of one round, derived pair by pair."""

    deliveries: dict[int, int]
    collision_blocked: frozenset[int]
    swamp_blocked: frozenset[int]


def oracle_round(net: Network, transmitters: Iterable[int]) -> OracleRound:
    """Apply the swamping rule to every listener against every sender."""
    coords = _coords(net)
    r, s = net.params.r, net.params.s
    senders = sorted(set(transmitters))
    received: dict[int, int] = {}
    collided: set[int] = set()
    swamped: set[int] = set()
    for v, here in enumerate(coords):
        if v in senders:
            continue
        near = [w for w in senders if math.dist(here, coords[w]) <= s]
        heard = [w for w in senders if s < math.dist(here, coords[w]) <= r]
        if near:
            swamped.add(v)
        elif len(heard) == 1:
            received[v] = heard[0]
        elif heard:
            collided.add(v)
    return OracleRound(received, frozenset(collided), frozenset(swamped))


def oracle_deliveries(net: Network, transmitters: Iterable[int]) -> dict[int, int]:
    """Receiver -> sender under the swamping rule, pair by pair."""
    return oracle_round(net, transmitters).deliveries


@dataclass
class FloodingBaseline:
    """Hop counts of an idealised collision-free flood from `source`.

    When the network is disconnected, `hops` covers the source's component
    and `layers` holds one hop map per component, rooted at its lowest id.
    """

    source: int
    hops: dict[int, int]
    connected: bool
    layers: list[dict[int, int]]

    @property
    def eccentricity(self) -> int:
        """Largest hop count from the source."""
        return max(self.hops.values())


def _bfs(adjacency: Sequence[set[int]], root: int) -> dict[int, int]:
    hops = {root: 0}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for w in sorted(adjacency[u]):
            if w not in hops:
                hops[w] = hops[u] + 1
                queue.append(w)
    return hops


def flooding_baseline(net: Network, source: int) -> FloodingBaseline:
    """BFS layers of the oracle link graph from `source`."""
    if not 0 <= source < net.n:
        msg = f"Source {source} is not a node of a {net.n}-node network"
        raise ValueError(msg)
    adjacency = [oracle_neighbors(net, u) for u in range(net.n)]
    hops = _bfs(adjacency, source)
    layers = [hops]
    seen = set(hops)
    for u in range(net.n):
        if u not in seen:
            component = _bfs(adjacency, u)
            layers.append(component)
            seen.update(component)
    return FloodingBaseline(source, hops, len(hops) == net.n, layers)


def oracle_knowledge(net: Network, partition: Partition) -> list[KnowledgeSet]:
    """What D* should leave behind: every node within distance 1, by home centre."""
    coords = _coords(net)
    labels = [partition.label_of(p) for p in coords]
    knowledge = []
    for u, here in enumerate(coords):
        ks = KnowledgeSet(labels[u])
        for w, there in enumerate(coords):
            if w != u and math.dist(here, there) <= 1:
                ks.add(labels[w], partition.home_center(labels[w]))
        knowledge.append(ks)
    return knowledge


def check_link_set(net: Network) -> CheckResult:
    """Engine neighbour sets equal the oracle's."""
    for u in range(net.n):
        expected = oracle_neighbors(net, u)
        actual = net.neighbors(u)
        if actual != expected:
            return CheckResult(
                "link-set",
                passed=False,
                witness={"node": u, "extra": sorted(actual - expected),
                         "missing": sorted(expected - actual)},
            )
    return CheckResult("link-set", passed=True, detail=f"{net.n} nodes")


def check_reception_rule(
    net: Network, rng: np.random.Generator, rounds: int = RECEPTION_ROUNDS
) -> CheckResult:
    """Engine deliveries and blocked sets equal the oracle's on random transmitter sets."""
    for t in range(rounds):
        size = int(rng.integers(0, net.n + 1))
        chosen = sorted(int(u) for u in rng.choice(net.n, size=size, replace=False))
        transmitters = {u: Message.data(net.position(u)) for u in chosen}
        outcome = deliveries_for_round(net, transmitters)
        engine = {v: sender for v, (sender, _) in outcome.deliveries.items()}
        expected = oracle_round(net, chosen)
        mismatch: dict[str, object] = {}
        if engine != expected.deliveries:
            mismatch["deliveries"] = sorted(set(engine.items()) ^ set(expected.deliveries.items()))[:5]
        if outcome.collision_blocked != expected.collision_blocked:
            mismatch["collision"] = sorted(outcome.collision_blocked ^ expected.collision_blocked)[:5]
        if outcome.swamp_blocked != expected.swamp_blocked:
            mismatch["swamp"] = sorted(outcome.swamp_blocked ^ expected.swamp_blocked)[:5]
        if mismatch:
            return CheckResult(
                "reception-rule",
                passed=False,
                witness={"round": t, "transmitters": chosen, **mismatch},
            )
    return CheckResult("reception-rule", passed=True, detail=f"{rounds} rounds")


def check_trace(net: Network, result: SimResult) -> CheckResult:
    """Every recorded round delivers what the oracle says it should."""
    for trace in result.rounds:
        recorded = {v: sender for v, (sender, _) in trace.deliveries.items()}
        expected = oracle_deliveries(net, trace.transmitters)
        if recorded != expected:
            diff = sorted(set(recorded.items()) ^ set(expected.items()))
            return CheckResult(
                "trace-reception",
                passed=False,
                witness={"round": trace.round, "mismatch": diff[:5]},
            )
    return CheckResult("trace-reception", passed=True, detail=f"{result.rounds_run} rounds")


def check_collision_free(rounds: Sequence[RoundTrace], name: str) -> CheckResult:
    """No listener in `rounds` was blocked by a collision."""
    for trace in rounds:
        if trace.collision_blocked:
            return CheckResult(
                name,
                passed=False,
                witness={"round": trace.round, "listeners": sorted(trace.collision_blocked),
                         "transmitters": sorted(trace.transmitters)},
            )
    return CheckResult(name, passed=True, detail=f"{len(rounds)} rounds")


def check_transmitter_spacing(result: SimResult, net: Network, spacing: float) -> CheckResult:
    """Transmitters of the same round are more than `spacing` apart."""
    coords = _coords(net)
    for trace in result.rounds:
        senders = sorted(trace.transmitters)
        for i, u in enumerate(senders):
            for w in senders[i + 1 :]:
                gap = math.dist(coords[u], coords[w])
                if gap <= spacing:
                    return CheckResult(
                        "transmitter-spacing",
                        passed=False,
                        witness={"round": trace.round, "nodes": (u, w), "distance": gap},
                    )
    return CheckResult("transmitter-spacing", passed=True, detail=f"> {spacing:g} apart")


def check_single_home(net: Network, partition: Partition) -> CheckResult:
    """No two nodes share a label, and a home never spans distance gamma."""
    owner: dict[object, int] = {}
    for u in range(net.n):
        label = partition.label_of(net.position(u))
        if label in owner:
            w = owner[label]
            return CheckResult(
                "single-home",
                passed=False,
                witness={"nodes": (w, u), "label": str(label), "distance": net.distance(w, u)},
            )
        owner[label] = u

    # a point and its partner at distance gamma across the home's longest diagonal
    step = partition.gamma / math.sqrt(partition.dim)
    for block, home in partition.iter_slots():
        lo, _ = partition.home_box(partition.locate((block, home), (0.0,) * partition.dim))
        partner = tuple(c + step for c in lo)
        if partition.label_of(lo) == partition.label_of(partner):
            return CheckResult(
                "single-home",
                passed=False,
                witness={"points": (lo, partner), "distance": math.dist(lo, partner)},
            )
    return CheckResult("single-home", passed=True, detail=f"{net.n} nodes")


def _box_gap(a: tuple[Point, Point], b: tuple[Point, Point]) -> float:
    (alo, ahi), (blo, bhi) = a, b
    gaps = [max(bl - ah, al - bh, 0.0) for al, ah, bl, bh in zip(alo, ahi, blo, bhi, strict=True)]
    return math.hypot(*gaps)


def check_no_cross_region_collision(
    partition: Partition, rng: np.random.Generator, samples: int = 100
) -> CheckResult:
    """Identically labelled blocks of neighbouring regions are more than 1 apart."""
    origin = (0,) * partition.dim
    here = (1,) * partition.dim
    for region in (origin, here):
        for block in range(1, partition.mu + 1):
            box = partition.block_box(region, block)
            for other in partition.nearby_regions(region):
                if other == region:
                    continue
                gap = _box_gap(box, partition.block_box(other, block))
                if gap <= 1:
                    return CheckResult(
                        "cross-region",
                        passed=False,
                        witness={"block": block, "regions": (region, other), "gap": gap},
                    )
    for _ in range(samples):
        block = int(rng.integers(1, partition.mu + 1))
        others = [o for o in partition.nearby_regions(here) if o != here]
        other = others[int(rng.integers(len(others)))]
        (alo, ahi), (blo, bhi) = partition.block_box(here, block), partition.block_box(other, block)
        p = tuple(float(rng.uniform(lo, hi)) for lo, hi in zip(alo, ahi, strict=True))
        q = tuple(float(rng.uniform(lo, hi)) for lo, hi in zip(blo, bhi, strict=True))
        if math.dist(p, q) <= 1:
            return CheckResult(
                "cross-region",
                passed=False,
                witness={"block": block, "points": (p, q), "distance": math.dist(p, q)},
            )
    return CheckResult("cross-region", passed=True, detail=f"mu={partition.mu}")


def check_range_overlap(net: Network) -> CheckResult:
    """On the line, a node between u and v (dist <= r - s) has no neighbour outside theirs."""
    coords = [c[0] for c in _coords(net)]
    reach = net.params.r - net.params.s
    gamma = [oracle_neighbors(net, u) for u in range(net.n)]
    order = sorted(range(net.n), key=lambda u: coords[u])
    for i, u in enumerate(order):
        for j in range(i + 2, len(order)):
            v = order[j]
            if coords[v] - coords[u] > reach:
                break
            for w in order[i + 1 : j]:
                outside = gamma[w] - gamma[u] - gamma[v]
                if outside:
                    return CheckResult(
                        "range-overlap",
                        passed=False,
                        witness={"u": u, "v": v, "w": w, "uncovered": sorted(outside)},
                    )
    return CheckResult("range-overlap", passed=True, detail=f"{net.n} nodes")


def check_discovery_exact(net: Network, partition: Partition) -> CheckResult:
    """After D each node knows exactly the labels of its oracle neighbours."""
    outcome = run_procedure_D(net, partition)
    if outcome.result.rounds_run != partition.slots:
        return CheckResult(
            "discovery-D",
            passed=False,
            witness={"rounds": outcome.result.rounds_run, "expected": partition.slots},
        )
    for u, knowledge in enumerate(outcome.knowledge):
        expected = {partition.label_of(net.position(w)) for w in oracle_neighbors(net, u)}
        known = {node.label for node in knowledge.known.values()}
        if known != expected:
            return CheckResult(
                "discovery-D",
                passed=False,
                witness={"node": u, "extra": sorted(map(str, known - expected)),
                         "missing": sorted(map(str, expected - known))},
            )
    return CheckResult("discovery-D", passed=True, detail=f"{partition.slots} rounds")


def check_discovery_complete(
    net: Network, partition: Partition, knowledge: Sequence[KnowledgeSet]
) -> CheckResult:
    """After D* each node knows every node within distance 1, and nothing else."""
    coords = _coords(net)
    labels = [partition.label_of(p) for p in coords]
    for u, ks in enumerate(knowledge):
        close = {labels[w] for w in range(net.n) if w != u and math.dist(coords[u], coords[w]) <= 1}
        known = {node.label for node in ks.known.values()}
        if known != close:
            return CheckResult(
                "discovery-D*",
                passed=False,
                witness={"node": u, "extra": sorted(map(str, known - close)),
                         "missing": sorted(map(str, close - known))},
            )
    return CheckResult("discovery-D*", passed=True, detail=f"{net.n} nodes")


def check_spokesman_coverage(net: Network, relay: RelayRun) -> CheckResult:
    """Spokesmen of every audited block group reach all neighbours of its informed nodes."""
    gamma = [oracle_neighbors(net, u) for u in range(net.n)]
    for audit in relay.audits:
        needed = set().union(*(gamma[v] for v in audit.informed))
        covered = set().union(*(gamma[w] for w in audit.spokesmen))
        missing = needed - covered
        if missing:
            return CheckResult(
                "spokesman-coverage",
                passed=False,
                witness={"round": audit.round, "region": audit.region, "block": audit.block,
                         "spokesmen": audit.spokesmen, "uncovered": sorted(missing)},
            )
    return CheckResult("spokesman-coverage", passed=True, detail=f"{len(relay.audits)} groups")


def check_relay_scaling(
    hops: Sequence[int] = SCALING_HOPS, min_r2: float = SCALING_MIN_R2
) -> CheckResult:
    """Relaying rounds of Algorithm B grow linearly with the source eccentricity.

    Each chain has nodes 0.5 apart with s = 0.2, so a hop spans at most two
    nodes and a chain of 2D + 1 nodes has eccentricity D from its left end.
    A least-squares line through (D, relaying rounds) must fit with
    R^2 >= `min_r2`.
    """
    params = RadioParams(r=1, s=0.2, gamma=0.5)
    rounds: list[int] = []
    for d in hops:
        net = generate_placement(PlacementSpec(kind="chain-line", n=2 * d + 1, spacing=0.5), params)
        relay = run_algorithm_B(net, 0)
        used = relay.result.rounds_used
        if used is None:
            return CheckResult(
                "relay-scaling",
                passed=False,
                witness={"eccentricity": d, "informed": len(relay.result.informed_final),
                         "n": net.n},
            )
        rounds.append(used - relay.discovery_rounds)
    x = np.asarray(hops, dtype=float)
    y = np.asarray(rounds, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sum((y - (slope * x + intercept)) ** 2))
    spread = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if spread == 0 else 1 - residual / spread
    detail = f"slope={slope:.3g} R2={r2:.4f} rounds={rounds}"
    if not (math.isfinite(slope) and r2 >= min_r2):
        return CheckResult(
            "relay-scaling",
            passed=False,
            detail=detail,
            witness={"hops": tuple(hops), "rounds": tuple(rounds), "r2": r2},
        )
    return CheckResult("relay-scaling", passed=True, detail=detail)


def check_closer_farther_samples(
    partition: PlanePartition, rng: np.random.Generator, samples: int = CLOSER_FARTHER_SAMPLES
) -> CheckResult:
    """Spokesmen bracket every non-spokesman's distance to far-away points.

    One point is drawn in each informed home of a random block; `p` is drawn
    from the annulus between twice the block diameter and 1 + diameter
    around the block centre.
    """
    k = partition.homes_per_side
    diameter = partition.block_diameter
    region = (1, 1)
    for trial in range(samples):
        block = int(rng.integers(1, partition.mu + 1))
        (x0, y0), (x1, y1) = partition.block_box(region, block)
        homes = sorted({int(h) for h in rng.integers(1, k * k + 1, size=int(rng.integers(1, k * k + 1)))})
        points = {}
        for h in homes:
            (hx0, hy0), (hx1, hy1) = partition.home_box(PartitionLabel(region, block, h))
            if hx1 <= hx0 or hy1 <= hy0:
                continue
            points[h] = (float(rng.uniform(hx0, hx1)), float(rng.uniform(hy0, hy1)))
        elected = set(elect_plane_spokesmen(points, k).values())
        quiet = [h for h in points if h not in elected]
        if not quiet:
            continue
        u = points[quiet[int(rng.integers(len(quiet)))]]
        angle = float(rng.uniform(0, 2 * math.pi))
        radius = float(rng.uniform(2 * diameter, 1 + diameter))
        centre = ((x0 + x1) / 2, (y0 + y1) / 2)
        p = (centre[0] + radius * math.cos(angle), centre[1] + radius * math.sin(angle))
        closer, farther = check_closer_farther([(h, points[h]) for h in sorted(elected)], u, p)
        if closer is None or farther is None:
            return CheckResult(
                "closer-farther",
                passed=False,
                witness={"trial": trial, "block": block, "u": u, "p": p,
                         "spokesmen": {h: points[h] for h in sorted(elected)}},
            )
    return CheckResult("closer-farther", passed=True, detail=f"{samples} samples")


def check_impossibility(r: int, s: int, n: int) -> CheckResult:
    """With s > 0 and r - s = 1 node 0 only reaches multiples of r, and A refuses."""
    net = line_network(n, r, s)
    reached = set(flooding_baseline(net, 0).hops)
    expected = set(range(0, n, r))
    if reached != expected:
        return CheckResult(
            "impossibility",
            passed=False,
            witness={"r": r, "s": s, "n": n, "reached": sorted(reached ^ expected)},
        )
    try:
        plan_algorithm_a(n, r, s)
    except ImpossibleBroadcastError:
        return CheckResult("impossibility", passed=True, detail=f"r={r} s={s} n={n}")
    return CheckResult(
        "impossibility", passed=False, witness={"r": r, "s": s, "n": n, "planned": True}
    )


def check_annulus_coverage(r: int, s: int) -> CheckResult:
    """Each line within floor(sqrt(3) r / 2) of a transmitter gets at least r - s covered."""
    for dist in range(math.isqrt(3 * r * r) // 2 + 1):
        covered = annulus_line_coverage(r, s, dist)
        if covered < r - s - COVERAGE_TOLERANCE:
            return CheckResult(
                "annulus-coverage",
                passed=False,
                witness={"r": r, "s": s, "dist": dist, "covered": covered},
            )
    return CheckResult("annulus-coverage", passed=True, detail=f"r={r} s={s}")


def check_local_scheme(r: int, s: int, k: int = 0) -> CheckResult:
    """Local_k* run from an informed node k informs k .. k + 2r - 1."""
    scheme = LocalScheme(k, r, s)
    n = k + 3 * r + 1
    programs = local_scheme_programs(scheme, n)
    result = run(line_network(n, r, s), programs, len(scheme.schedule(n)))
    missing = sorted(set(scheme.targets()) - result.informed_final)
    if missing:
        return CheckResult(
            "local-scheme", passed=False, witness={"r": r, "s": s, "k": k, "missing": missing}
        )
    return CheckResult("local-scheme", passed=True, detail=f"r={r} s={s} k={k}")


_LINE_GRID = ((0.2, 0.1), (0.5, 0.1), (0.8, 0.1), (0.5, 0.2), (0.2, 0.5))
_PLANE_GRID = ((0.2, 0.5), (0.2, 0.2), (0.5, 0.1))


def _random_net(
    kind: str, s: float, gamma: float, seed: int, *, connected: bool = False
) -> Network:
    params = RadioParams(r=1, s=s, gamma=gamma)
    if kind == "random-line":
        spec = PlacementSpec(kind=kind, length=6.0, connected=connected)
    else:
        spec = PlacementSpec(kind=kind, width=4.0, height=4.0, count=30, connected=connected)
    return generate_placement(spec, params, seed)


def _line_family(report: VerificationReport, count: int, rng: np.random.Generator) -> None:
    for i in range(count):
        s, gamma = _LINE_GRID[i % len(_LINE_GRID)]
        net = _random_net("random-line", s, gamma, int(rng.integers(2**31)))
        partition = make_partition(net.params, 1)
        for check in (
            check_link_set(net),
            check_reception_rule(net, rng),
            check_single_home(net, partition),
            check_no_cross_region_collision(partition, rng),
            check_range_overlap(net),
            check_discovery_exact(net, partition),
        ):
            report.add(check)
        if i == 0 and net.n > 1:
            relay = run_procedure_T(net, partition, oracle_knowledge(net, partition))
            report.add(check_spokesman_coverage(net, relay))
    # D* is exact only on connected networks
    s, gamma = _LINE_GRID[0]
    net = _random_net("random-line", s, gamma, int(rng.integers(2**31)), connected=True)
    partition = make_partition(net.params, 1)
    discovered = run_procedure_D_star(net, partition).knowledge
    report.add(check_discovery_complete(net, partition, discovered))
    report.add(check_relay_scaling())


def _plane_family(report: VerificationReport, count: int, rng: np.random.Generator) -> None:
    for i in range(count):
        s, gamma = _PLANE_GRID[i % len(_PLANE_GRID)]
        net = _random_net("random-plane", s, gamma, int(rng.integers(2**31)))
        partition = make_partition(net.params, 2)
        for check in (
            check_link_set(net),
            check_reception_rule(net, rng),
            check_single_home(net, partition),
            check_no_cross_region_collision(partition, rng),
        ):
            report.add(check)
        if partition.slots <= 1_100:
            report.add(check_discovery_exact(net, partition))
        if isinstance(partition, PlanePartition):
            report.add(check_closer_farther_samples(partition, rng))
        if i == 0 and net.n > 1:
            relay = run_procedure_T2(net, partition, oracle_knowledge(net, partition))
            report.add(check_spokesman_coverage(net, relay))


def _lattice_family(report: VerificationReport) -> None:
    for r in range(2, 11):
        report.add(check_impossibility(r, r - 1, 10 * r))
        for s in range(r - 1):
            report.add(check_annulus_coverage(r, s))
            report.add(check_local_scheme(r, s))
            report.add(check_local_scheme(r, s, k=r))


def check_lemmas(family: LemmaFamily = "all", count: int = 5, seed: int = 0) -> VerificationReport:
    """Run the lemma battery on random instances of one family or of all of them."""
    started = time.perf_counter()
    report = VerificationReport(f"lemmas-{family}")
    rng = np.random.default_rng(seed)
    families = LEMMA_FAMILIES if family == "all" else (family,)
    for name in families:
        logger.info("Checking %s lemmas on %d instances", name, count)
        if name == "line":
            _line_family(report, count, rng)
        elif name == "plane":
            _plane_family(report, count, rng)
        elif name == "lattice":
            _lattice_family(report)
        else:
            msg = f"Unknown lemma family {name!r}"
            raise ValueError(msg)
    report.runtime = time.perf_counter() - started
    return report

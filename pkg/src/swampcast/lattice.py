"""Broadcast schedules for the lattice line and the 2-D lattice.

Nodes sit on integer points and the whole topology is known in advance, so
a broadcast is a precomputed plan: the set of transmitters for every round.
Each node runs a `ScheduledRelayProgram` that transmits the source message
in its planned rounds, provided it already holds it.

Algorithm A relays the message to every r-th node one hop per round (the
sparse phase), then fills the gaps with Local_k* schemes tiled 2r apart in
two alternating phases, then finishes the line end with one more scheme.
Algorithm A2 runs A along the source row and then along vertical lines
spaced 2d apart, where d = floor(sqrt(3) r / 2), in three phases.

Every plan is replayed against the reception rule before use. A layout that
does not cover the lattice (short lines, awkward sources) is replaced by a
sequential relay computed from the known topology.
"""

import logging
import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from typing import Literal

from swampcast.engine import (
    LISTEN,
    Action,
    Heard,
    Message,
    MessageKind,
    NodeProgram,
    Observation,
    SimResult,
    Transmit,
    deliveries_for_round,
    run,
)
from swampcast.geometry import Network, Point, RadioParams, lattice_2d, lattice_line

logger = logging.getLogger(__name__)

Schedule = tuple[frozenset[int], ...]


class ImpossibleBroadcastError(ValueError):
    """Broadcasting cannot succeed on this lattice."""


def check_lattice_params(r: int, s: int) -> None:
    """Reject radii for which the lattice line cannot be broadcast on.

    Raises:
        ImpossibleBroadcastError: for s > 0 with r - s = 1, or r - s < 1.

    """
    if r < 1 or s < 0:
        msg = f"Lattice radii must satisfy r >= 1 and s >= 0, got r={r}, s={s}"
        raise ImpossibleBroadcastError(msg)
    if r - s < 1:
        msg = f"No links exist on the lattice when r - s < 1 (r={r}, s={s})"
        raise ImpossibleBroadcastError(msg)
    if s > 0 and r - s == 1:
        msg = (
            f"Broadcast is impossible on the lattice line for r={r}, s={s}:"
            f" only multiples of r are reachable from node 0"
        )
        raise ImpossibleBroadcastError(msg)


def step_width(r: int, s: int) -> int:
    """Advance between successive steps of a scheme, r - (s + 1) (1 when that is 0)."""
    return max(r - s - 1, 1)


def scheme_steps(r: int, s: int) -> int:
    """Steps x = ceil(r / (r - (s + 1))) of Local_k."""
    check_lattice_params(r, s)
    return math.ceil(r / step_width(r, s))


def line_closed_form_bound(n: int, r: int, s: int) -> int:
    """Closed form floor(n/r) + 3(x + 1), counting a two-round step as one unit."""
    return n // r + 3 * (scheme_steps(r, s) + 1)


def line_schedule_bound(n: int, r: int, s: int) -> int:
    """Round-exact bound of Algorithm A from a line end: floor(n/r) + 6(x + 1)."""
    return n // r + 6 * (scheme_steps(r, s) + 1)


def grid_closed_form_bound(n: int, r: int, s: int) -> int:
    """Closed form 4 floor(sqrt(n)/r) + 12(x + 1) of Algorithm A2."""
    return 4 * (math.isqrt(n) // r) + 12 * (scheme_steps(r, s) + 1)


def line_lower_bound(n: int, r: int) -> int:
    """No broadcast on n lattice nodes finishes in fewer than ceil((n-1)/(2r)) rounds."""
    return max(math.ceil((n - 1) / (2 * r)), 0)


def grid_lower_bound(n: int, r: int, s: int) -> int:
    """Reported lower bound ceil(sqrt(n)/(2r)) + ceil(r/(2(r - s)))."""
    return math.ceil(math.isqrt(n) / (2 * r)) + math.ceil(r / (2 * (r - s)))


def annulus_line_coverage(r: float, s: float, dist: float) -> float:
    """Length covered by one transmitter on a parallel line `dist` away.

    For dist <= s the covered set is two chords and the per-side length is
    returned; beyond s it is one segment of length 2 sqrt(r^2 - dist^2).
    """
    if dist > r:
        return 0.0
    if dist <= s:
        return math.sqrt(r * r - dist * dist) - math.sqrt(s * s - dist * dist)
    return 2 * math.sqrt(r * r - dist * dist)


@dataclass(frozen=True)
class LocalScheme:
    """Local_k (or Local_k* when `starred`) anchored at node `k`.

    Step i transmits from a = k + i(r - s - 1) and then from b = a + r. A
    mirrored scheme runs leftwards: a = k - i(r - s - 1), b = a - r.
    """

    k: int
    r: int
    s: int
    starred: bool = True
    mirrored: bool = False

    @property
    def x(self) -> int:
        """Steps of the unstarred scheme."""
        return scheme_steps(self.r, self.s)

    @property
    def steps(self) -> int:
        """Steps actually run."""
        return self.x + 1 if self.starred else self.x

    def a_transmitters(self) -> list[int]:
        """First-round transmitter of every step."""
        c = step_width(self.r, self.s)
        sign = -1 if self.mirrored else 1
        return [self.k + sign * i * c for i in range(self.steps)]

    def b_transmitters(self) -> list[int]:
        """Second-round transmitter of every step."""
        sign = -1 if self.mirrored else 1
        return [a + sign * self.r for a in self.a_transmitters()]

    def targets(self) -> range:
        """The node labels A_k and B_k the scheme is responsible for."""
        if self.mirrored:
            return range(self.k - 2 * self.r + 1, self.k + 1)
        return range(self.k, self.k + 2 * self.r)

    def schedule(self, n: int) -> Schedule:
        """Transmitters per round, restricted to nodes 0..n-1."""
        rounds = []
        for a, b in zip(self.a_transmitters(), self.b_transmitters(), strict=True):
            rounds.append(frozenset(u for u in (a,) if 0 <= u < n))
            rounds.append(frozenset(u for u in (b,) if 0 <= u < n))
        return tuple(rounds)


@dataclass(frozen=True)
class BroadcastPlan:
    """Transmitters of every round of a lattice broadcast.

    Attributes:
        rounds: Transmitter ids per round.
        source: Node id holding the message at round 0.
        kind: "schemes" for the tiled layout, "relay" for the sequential fallback.
        bound: Rounds within which the plan is guaranteed to finish.
        phases: Name and length of each consecutive phase.

    """

    rounds: Schedule
    source: int
    kind: Literal["schemes", "relay"]
    bound: int
    phases: tuple[tuple[str, int], ...] = ()

    def __len__(self) -> int:
        """Number of planned rounds."""
        return len(self.rounds)

    def transmit_rounds(self, n: int) -> list[frozenset[int]]:
        """Rounds in which each node 0..n-1 is scheduled."""
        per_node: list[set[int]] = [set() for _ in range(n)]
        for t, group in enumerate(self.rounds):
            for u in group:
                per_node[u].add(t)
        return [frozenset(rounds) for rounds in per_node]


class ScheduledRelayProgram(NodeProgram):
    """Transmit the source message in planned rounds, if already informed."""

    def __init__(
        self,
        node: int,
        position: Point,
        rounds: Iterable[int],
        *,
        source: bool = False,
    ) -> None:
        """Prepare the program with its planned transmit rounds."""
        super().__init__(node, position)
        self.rounds = frozenset(rounds)
        self._informed = source

    def act(self, round_index: int) -> Action:
        """Transmit when planned and informed."""
        if self._informed and round_index in self.rounds:
            return Transmit(Message.data(self.position))
        return LISTEN

    def observe(self, round_index: int, observation: Observation) -> None:  # noqa: ARG002
        """Pick up the source message."""
        if isinstance(observation, Heard) and observation.message.kind == MessageKind.DATA:
            self._informed = True

    @property
    def informed(self) -> bool:
        """Whether the node holds the source message."""
        return self._informed


def lattice_params(r: int, s: int) -> RadioParams:
    """Radio parameters of an integer lattice."""
    return RadioParams(r=r, s=s, gamma=1)


def line_network(n: int, r: int, s: int) -> Network:
    """The lattice line 0..n-1."""
    return Network(params=lattice_params(r, s), positions=lattice_line(n))


def grid_network(n: int, r: int, s: int) -> Network:
    """The sqrt(n) x sqrt(n) lattice."""
    return Network(params=lattice_params(r, s), positions=lattice_2d(n))


def replay(net: Network, rounds: Sequence[Iterable[int]], source: int) -> set[int]:
    """Informed set after running `rounds` with informed-only transmission."""
    informed = {source}
    for group in rounds:
        transmitters = {u: Message.data(net.position(u)) for u in group if u in informed}
        informed.update(deliveries_for_round(net, transmitters).deliveries)
    return informed


def relay_schedule(net: Network, source: int) -> Schedule:
    """One transmitter per round, always the informed node reaching most new nodes.

    Ties go to the lowest id. Each round informs at least one node, so the
    schedule has at most n - 1 rounds.

    Raises:
        ImpossibleBroadcastError: the source's component is not the whole network.

    """
    informed = {source}
    rounds = []
    while len(informed) < net.n:
        best, best_new = -1, set()
        for u in sorted(informed):
            new = net.neighbors(u) - informed
            if len(new) > len(best_new):
                best, best_new = u, new
        if not best_new:
            msg = f"Node(s) {sorted(set(range(net.n)) - informed)} unreachable from {source}"
            raise ImpossibleBroadcastError(msg)
        rounds.append(frozenset({best}))
        informed |= best_new
    return tuple(rounds)


def _union_phase(schemes: Iterable[Schedule]) -> Schedule:
    schemes = list(schemes)
    length = max((len(sch) for sch in schemes), default=0)
    merged = []
    for t in range(length):
        group: set[int] = set()
        for sch in schemes:
            if t < len(sch):
                group |= sch[t]
        merged.append(frozenset(group))
    return tuple(merged)


def _tiled_line_plan(n: int, r: int, s: int, p: int) -> BroadcastPlan:
    x = scheme_steps(r, s)
    phases: list[tuple[str, Schedule]] = []

    right_hops = (n - 1 - p) // r
    left_hops = p // r
    sparse = [frozenset({p + j * r}) for j in range(right_hops)]
    first_left = 1 if right_hops >= 1 else 0
    sparse += [frozenset({p - j * r}) for j in range(first_left, left_hops)]
    phases.append(("sparse", tuple(sparse)))

    tiles: list[list[Schedule]] = [[], []]
    right_end = p - 1
    j = 0
    while p + 2 * r * j + 2 * r - 1 <= n - 1:
        tiles[j % 2].append(LocalScheme(p + 2 * r * j, r, s).schedule(n))
        right_end = p + 2 * r * j + 2 * r - 1
        j += 1
    left_start = p
    j = 0
    while p - r - 2 * r * j - 2 * r + 1 >= 0:
        anchor = p - r - 2 * r * j
        tiles[(j + 1) % 2].append(LocalScheme(anchor, r, s, mirrored=True).schedule(n))
        left_start = anchor - 2 * r + 1
        j += 1
    for index, group in enumerate(tiles):
        if group:
            phases.append((f"tiles-{index}", _union_phase(group)))

    endings: list[Schedule] = []
    if right_end < n - 1:
        endings.append(LocalScheme(max(n - 2 * r, 0), r, s).schedule(n))
    if p > 0 and left_start > 0:
        endings.append(LocalScheme(min(2 * r - 1, n - 1), r, s, mirrored=True).schedule(n))
    if len(endings) == 2 and n >= 6 * r:  # noqa: PLR2004
        phases.append(("endings", _union_phase(endings)))
    else:
        phases.extend((f"ending-{i}", ending) for i, ending in enumerate(endings))

    phases = [(name, sch) for name, sch in phases if sch]
    scheme_phases = sum(1 for name, _ in phases if name != "sparse")
    rounds = tuple(group for _, sch in phases for group in sch)
    return BroadcastPlan(
        rounds=rounds,
        source=p,
        kind="schemes",
        bound=len(sparse) + 2 * (x + 1) * scheme_phases,
        phases=tuple((name, len(sch)) for name, sch in phases),
    )


def plan_algorithm_a(n: int, r: int, s: int, source: int = 0) -> BroadcastPlan:
    """Plan Algorithm A on the lattice line 0..n-1 from `source`.

    Raises:
        ImpossibleBroadcastError: for impossible radii or a disconnected line.

    """
    check_lattice_params(r, s)
    if not 0 <= source < n:
        msg = f"Source {source} is not a node of the lattice line 0..{n - 1}"
        raise ValueError(msg)
    net = line_network(n, r, s)
    if not net.is_connected():
        msg = f"The lattice line n={n}, r={r}, s={s} is disconnected"
        raise ImpossibleBroadcastError(msg)
    if n == 1:
        return BroadcastPlan((), source, "schemes", 0)

    plan = _tiled_line_plan(n, r, s, source)
    if len(replay(net, plan.rounds, source)) == n:
        return plan
    logger.info(
        "Tiled layout does not cover n=%d, r=%d, s=%d from %d; using sequential relay",
        n, r, s, source,
    )
    return _relay_plan(net, source)


def _shift(schedule: Schedule, to_id: Callable[[int], int]) -> Schedule:
    return tuple(frozenset(to_id(t) for t in group) for group in schedule)


def vertical_lines(side: int, r: int) -> list[tuple[int, int]]:
    """(column, phase group 0..2) of the vertical lines used by A2.

    Lines sit on odd multiples of d; phases group them 6d apart. When the last
    column lies more than d from every line, an extra line on that column
    joins the group its successor would have joined.
    """
    d = math.isqrt(3 * r * r) // 2
    d = max(d, 1)
    lines = []
    j = 1
    while j * d <= side - 1:
        lines.append((j * d, (j // 2) % 3))
        j += 2
    last = lines[-1][0] if lines else None
    if last is None:
        lines.append((side - 1, 0))
    elif side - 1 - last > d:
        lines.append((side - 1, (j // 2) % 3))
    return lines


def plan_algorithm_a2(n: int, r: int, s: int, source: int = 0) -> BroadcastPlan:
    """Plan Algorithm A2 on the sqrt(n) x sqrt(n) lattice.

    A disconnected source row or column does not stop the broadcast as long
    as the lattice itself is connected: the plan then uses the sequential
    relay.

    Raises:
        ImpossibleBroadcastError: r < 2, impossible radii or a disconnected
            lattice.

    """
    side = math.isqrt(n)
    if side * side != n:
        msg = f"A2 needs a square node count, got n={n}"
        raise ValueError(msg)
    if r < 2:  # noqa: PLR2004
        msg = f"Broadcast with swamping is impossible on the 2-D lattice for r={r} < 2"
        raise ImpossibleBroadcastError(msg)
    check_lattice_params(r, s)
    if not 0 <= source < n:
        msg = f"Source {source} is not a node of the {side}x{side} lattice"
        raise ValueError(msg)

    net = grid_network(n, r, s)
    if not net.is_connected():
        msg = f"The {side}x{side} lattice with r={r}, s={s} is disconnected"
        raise ImpossibleBroadcastError(msg)

    sx, sy = source % side, source // side
    try:
        row = plan_algorithm_a(side, r, s, sx)
        column = plan_algorithm_a(side, r, s, sy)
    except ImpossibleBroadcastError as exc:
        logger.info(
            "No line layout on the %dx%d lattice (%s); using sequential relay", side, side, exc
        )
        return _relay_plan(net, source)
    phases: list[tuple[str, Schedule]] = [
        ("row", _shift(row.rounds, lambda t: sy * side + t)),
    ]
    groups: list[list[int]] = [[], [], []]
    for col, group in vertical_lines(side, r):
        groups[group].append(col)
    for index, cols in enumerate(groups):
        if not cols:
            continue
        schedules = [_shift(column.rounds, lambda t, c=c: t * side + c) for c in cols]
        phases.append((f"columns-{index}", _union_phase(schedules)))

    rounds = tuple(group for _, sch in phases for group in sch)
    used_phases = sum(1 for name, _ in phases if name != "row")
    plan = BroadcastPlan(
        rounds=rounds,
        source=source,
        kind="schemes",
        bound=row.bound + used_phases * column.bound,
        phases=tuple((name, len(sch)) for name, sch in phases),
    )
    if len(replay(net, plan.rounds, source)) == n:
        return plan
    logger.info("Line layout does not cover the %dx%d lattice; using sequential relay", side, side)
    return _relay_plan(net, source)


def _relay_plan(net: Network, source: int) -> BroadcastPlan:
    rounds = relay_schedule(net, source)
    return BroadcastPlan(rounds, source, "relay", net.n - 1, (("relay", len(rounds)),))


def plan_programs(net: Network, plan: BroadcastPlan) -> list[ScheduledRelayProgram]:
    """One scheduled program per node of `net`."""
    per_node = plan.transmit_rounds(net.n)
    return [
        ScheduledRelayProgram(u, net.position(u), per_node[u], source=u == plan.source)
        for u in range(net.n)
    ]


def local_scheme_programs(scheme: LocalScheme, n: int) -> list[ScheduledRelayProgram]:
    """Programs running `scheme` alone on the lattice line 0..n-1, node k informed."""
    net = line_network(n, scheme.r, scheme.s)
    plan = BroadcastPlan(scheme.schedule(n), scheme.k, "schemes", len(scheme.schedule(n)))
    return plan_programs(net, plan)


def execute_plan(net: Network, plan: BroadcastPlan, horizon: int | None = None) -> SimResult:
    """Run a plan on `net`, marking where each phase starts."""
    programs = plan_programs(net, plan)
    max_rounds = max(len(plan), 1) if horizon is None else max(horizon, 1)
    result = run(net, programs, max_rounds)
    offset = 0
    for name, length in plan.phases:
        result.markers[name] = offset
        offset += length
    return result


def run_algorithm_A(  # noqa: N802
    n: int, r: int, s: int, source: int = 0, *, horizon: int | None = None
) -> SimResult:
    """Broadcast on the lattice line with Algorithm A."""
    plan = plan_algorithm_a(n, r, s, source)
    logger.info("Algorithm A n=%d r=%d s=%d: %d planned rounds", n, r, s, len(plan))
    return execute_plan(line_network(n, r, s), plan, horizon)


def run_algorithm_A2(  # noqa: N802
    n: int, r: int, s: int, source: int = 0, *, horizon: int | None = None
) -> SimResult:
    """Broadcast on the 2-D lattice with Algorithm A2."""
    plan = plan_algorithm_a2(n, r, s, source)
    logger.info("Algorithm A2 n=%d r=%d s=%d: %d planned rounds", n, r, s, len(plan))
    return execute_plan(grid_network(n, r, s), plan, horizon)

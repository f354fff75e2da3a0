"""Round-synchronous execution of node programs under the swamping model.

Every round each node program chooses to transmit a message or to listen.
A listener `v` receives iff exactly one transmitter lies in its range
(s, r] and no transmitter lies within distance s. Everything else looks like
silence: noise, collisions and swamping are indistinguishable to the node.

Programs are objects holding their own state. `act` is called once per round,
then `observe` is called on every node that listened. Transmitters get no
observation for the round they transmitted in.
"""

import logging
from abc import ABC, abstractmethod
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Protocol, runtime_checkable

import numpy as np

from swampcast.geometry import Network, Point
from swampcast.partition import Partition

logger = logging.getLogger(__name__)

SOURCE_PAYLOAD = "m"


class ProgramFaultError(RuntimeError):
    """A node program raised or returned something other than an action."""

    def __init__(self, node: int, round_index: int, detail: str) -> None:
        """Record where the fault happened."""
        self.node = node
        self.round_index = round_index
        super().__init__(f"Program of node {node} faulted in round {round_index}: {detail}")


class GrantError(RuntimeError):
    """A block-knowledge grant cannot be applied."""


class MessageKind(StrEnum):
    """The two message kinds nodes exchange."""

    HELLO = "hello"
    DATA = "data"


@dataclass(frozen=True)
class Message:
    """A constant-size message stamped with its sender's location."""

    kind: MessageKind
    origin: Point
    payload: str | None = None

    @classmethod
    def hello(cls, origin: Point) -> "Message":
        """A discovery beacon."""
        return cls(MessageKind.HELLO, origin)

    @classmethod
    def data(cls, origin: Point) -> "Message":
        """A copy of the source message."""
        return cls(MessageKind.DATA, origin, SOURCE_PAYLOAD)


@dataclass(frozen=True)
class Transmit:
    """Send `message` this round."""

    message: Message


@dataclass(frozen=True)
class Listen:
    """Stay silent and listen this round."""


@dataclass(frozen=True)
class Heard:
    """A message was received."""

    message: Message


@dataclass(frozen=True)
class Silence:
    """Nothing was received: background noise, a collision, or swamping."""


LISTEN = Listen()
SILENCE = Silence()

Action = Transmit | Listen
Observation = Heard | Silence


class NodeProgram(ABC):
    """Local state machine run by one node.

    A program knows its own id, position and the radio parameters, sees the
    global round counter and whatever it has observed. Nothing else.

    Attributes:
        horizon: Optional number of rounds after which the program is done.

    """

    horizon: int | None = None

    def __init__(self, node: int, position: Point) -> None:
        """Bind the program to a node."""
        self.node = node
        self.position = position

    @abstractmethod
    def act(self, round_index: int) -> Action:
        """Choose this round's action."""

    def observe(self, round_index: int, observation: Observation) -> None:  # noqa: B027
        """Consume the outcome of a round in which the node listened."""

    @property
    def informed(self) -> bool:
        """Whether the node holds the source message."""
        return False


@runtime_checkable
class GrantReceiver(Protocol):
    """A program that accepts block-knowledge grants."""

    def known_slots(self) -> set[tuple[int, int]]:
        """(block, home) pairs of the nodes this program has discovered."""
        ...

    def receive_grant(self, grant: Mapping[int, bool]) -> None:
        """Accept the informed flag of every co-block home."""
        ...


@dataclass(frozen=True)
class RoundOutcome:
    """Result of applying the reception rule to one round."""

    deliveries: dict[int, tuple[int, Message]]
    collision_blocked: frozenset[int]
    swamp_blocked: frozenset[int]


@dataclass(frozen=True)
class RoundTrace:
    """Everything that happened in one round."""

    round: int
    transmitters: dict[int, Message]
    deliveries: dict[int, tuple[int, Message]]
    collision_blocked: frozenset[int]
    swamp_blocked: frozenset[int]


@dataclass(frozen=True)
class GrantEvent:
    """A block-knowledge grant, the only sanctioned breach of locality."""

    round: int
    region: tuple[int, ...]
    block: int
    homes: tuple[tuple[int, bool], ...]
    nodes: tuple[int, ...]


@dataclass
class SimResult:
    """Trace of a run.

    `completion_round` is the first round after which every node was
    informed, -1 if all were informed before round 0, None if never.
    """

    rounds: list[RoundTrace]
    completion_round: int | None
    informed_final: frozenset[int]
    grants: list[GrantEvent] = field(default_factory=list)
    markers: dict[str, int] = field(default_factory=dict)

    @property
    def rounds_used(self) -> int | None:
        """Rounds until completion, counting from round 0."""
        if self.completion_round is None:
            return None
        return self.completion_round + 1

    @property
    def rounds_run(self) -> int:
        """Number of rounds executed."""
        return len(self.rounds)

    def transmissions(self, kind: MessageKind | None = None) -> list[tuple[int, int]]:
        """(round, node) of every transmission, optionally of one kind only."""
        return [
            (t.round, u)
            for t in self.rounds
            for u, msg in sorted(t.transmitters.items())
            if kind is None or msg.kind == kind
        ]


def deliveries_for_round(
    net: Network, transmitters: Mapping[int, Message]
) -> RoundOutcome:
    """Apply the swamping reception rule to one round.

    Args:
        net: The network.
        transmitters: Message sent by each transmitting node.

    Returns:
        Deliveries as receiver -> (sender, message), and the listeners blocked
        by collision or by swamping.

    """
    if not transmitters:
        return RoundOutcome({}, frozenset(), frozenset())
    ids = np.array(sorted(transmitters), dtype=int)
    bad = [int(u) for u in ids if not 0 <= u < net.n]
    if bad:
        msg = f"Invalid transmitter id(s) {bad} for a network of {net.n} nodes"
        raise ValueError(msg)

    linked = net.link_matrix[:, ids]
    swamped = net.swamp_matrix[:, ids]
    in_range = linked.sum(axis=1)
    too_close = swamped.sum(axis=1)
    listening = np.ones(net.n, dtype=bool)
    listening[ids] = False

    receivers = listening & (in_range == 1) & (too_close == 0)
    swamp = listening & (too_close >= 1)
    collision = listening & (too_close == 0) & (in_range >= 2)  # noqa: PLR2004

    deliveries: dict[int, tuple[int, Message]] = {}
    for v in np.flatnonzero(receivers):
        sender = int(ids[np.argmax(linked[v])])
        deliveries[int(v)] = (sender, transmitters[sender])
    return RoundOutcome(
        deliveries,
        frozenset(int(v) for v in np.flatnonzero(collision)),
        frozenset(int(v) for v in np.flatnonzero(swamp)),
    )


class Simulator:
    """Steps a set of programs through synchronous rounds.

    The simulator can be driven round by round, so callers can interleave
    grants or stop on conditions of their own.
    """

    def __init__(
        self, net: Network, programs: Sequence[NodeProgram], *, start_round: int = 0
    ) -> None:
        """Prepare a run of `programs`, one per node of `net`."""
        if len(programs) != net.n:
            msg = f"Expected {net.n} programs, got {len(programs)}"
            raise ValueError(msg)
        self.net = net
        self.programs = list(programs)
        self.round = start_round
        self.traces: list[RoundTrace] = []
        self.grants: list[GrantEvent] = []
        self.markers: dict[str, int] = {}
        self.completion_round: int | None = (
            start_round - 1 if self.all_informed() else None
        )

    def all_informed(self) -> bool:
        """True when every program holds the source message."""
        return all(p.informed for p in self.programs)

    def informed(self) -> frozenset[int]:
        """Ids of the informed nodes."""
        return frozenset(u for u, p in enumerate(self.programs) if p.informed)

    def mark(self, name: str) -> None:
        """Remember the current round under `name` (e.g. a phase boundary)."""
        self.markers[name] = self.round

    def _action(self, u: int, program: NodeProgram) -> Action:
        try:
            action = program.act(self.round)
        except Exception as exc:
            raise ProgramFaultError(u, self.round, repr(exc)) from exc
        if not isinstance(action, Transmit | Listen):
            raise ProgramFaultError(u, self.round, f"returned {action!r}")
        return action

    def step(self) -> RoundTrace:
        """Run one round and return its trace."""
        transmitters: dict[int, Message] = {}
        for u, program in enumerate(self.programs):
            action = self._action(u, program)
            if isinstance(action, Transmit):
                transmitters[u] = action.message

        outcome = deliveries_for_round(self.net, transmitters)
        for v, program in enumerate(self.programs):
            if v in transmitters:
                continue
            delivery = outcome.deliveries.get(v)
            observation = SILENCE if delivery is None else Heard(delivery[1])
            try:
                program.observe(self.round, observation)
            except Exception as exc:
                raise ProgramFaultError(v, self.round, repr(exc)) from exc

        trace = RoundTrace(
            self.round,
            transmitters,
            outcome.deliveries,
            outcome.collision_blocked,
            outcome.swamp_blocked,
        )
        self.traces.append(trace)
        if self.completion_round is None and self.all_informed():
            self.completion_round = self.round
        self.round += 1
        return trace

    def run(self, rounds: int) -> None:
        """Run `rounds` rounds."""
        for _ in range(rounds):
            self.step()

    def grant_block_knowledge(self, partition: Partition, block: int) -> list[GrantEvent]:
        """Tell every node of `block` (in every region) which co-block homes are informed."""
        events = grant_block_knowledge(self.net, partition, self.programs, block, self.round)
        self.grants.extend(events)
        return events

    def result(self) -> SimResult:
        """Snapshot of the run so far."""
        return SimResult(
            rounds=list(self.traces),
            completion_round=self.completion_round,
            informed_final=self.informed(),
            grants=list(self.grants),
            markers=dict(self.markers),
        )


def run(net: Network, programs: Sequence[NodeProgram], max_rounds: int) -> SimResult:
    """Run `programs` on `net` for at most `max_rounds` rounds.

    The run also stops at the programs' declared horizon, when every program
    declares one.
    """
    if max_rounds <= 0:
        msg = f"max_rounds must be positive, got {max_rounds}"
        raise ValueError(msg)
    horizons = [p.horizon for p in programs]
    limit = max_rounds
    if programs and all(h is not None for h in horizons):
        limit = min(limit, max(horizons))
    sim = Simulator(net, programs)
    sim.run(limit)
    logger.debug("Ran %d rounds, completion round %s", limit, sim.completion_round)
    return sim.result()


def grant_block_knowledge(
    net: Network,
    partition: Partition,
    programs: Sequence[NodeProgram],
    block: int,
    round_index: int = 0,
) -> list[GrantEvent]:
    """Inject, in every region, the informed flags of `block`'s homes into its nodes.

    Raises:
        GrantError: outside the plane model, for a program that cannot take
            grants, or for a node that has not discovered a co-block node.

    """
    if partition.dim != 2 or net.dim != 2:  # noqa: PLR2004
        msg = "Block-knowledge grants exist only in the plane model"
        raise GrantError(msg)

    members: dict[tuple[int, ...], list[tuple[int, int]]] = {}
    for u in range(net.n):
        label = partition.label_of(net.position(u))
        if label.block == block:
            members.setdefault(label.region, []).append((u, label.home))

    events = []
    for region in sorted(members):
        nodes = members[region]
        grant = {home: programs[u].informed for u, home in nodes}
        for u, home in nodes:
            program = programs[u]
            if not isinstance(program, GrantReceiver):
                msg = f"Program of node {u} cannot receive block grants"
                raise GrantError(msg)
            known = program.known_slots()
            missing = [h for _, h in nodes if h != home and (block, h) not in known]
            if missing:
                msg = (
                    f"Node {u} has not discovered co-block home(s) {missing}"
                    f" of block {block} in region {region}"
                )
                raise GrantError(msg)
            program.receive_grant(grant)
        event = GrantEvent(
            round_index,
            region,
            block,
            tuple(sorted(grant.items())),
            tuple(u for u, _ in nodes),
        )
        logger.debug("Grant %s", event)
        events.append(event)
    return events

"""Broadcast with unknown topology: Procedures T and T2, Algorithms B and B2.

After D* every node knows the nodes within distance 1. Relaying then runs in
iterations. An iteration visits the mu blocks of a region in order and gives
each block a group of slots: 6 on the line, 12k - 4 in the plane. At the head
of its block's group a node elects the spokesmen of its block; a spokesman
sends the source message once, in the slot of its first role. Identically
labelled blocks of distinct regions run at the same time without
interfering, so no listener ever sees a collision.

Iterations repeat until one passes without any transmission. Algorithm B
(B2) is D* followed by T (T2) in one run of the simulator.
"""

import logging
from abc import abstractmethod
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import ClassVar

import networkx as nx

from swampcast.discovery import (
    DiscoveryProgram,
    KnowledgeSet,
    d_star_rounds,
    d_star_stages,
)
from swampcast.engine import (
    LISTEN,
    Action,
    GrantError,
    Heard,
    Message,
    MessageKind,
    NodeProgram,
    Observation,
    SimResult,
    Simulator,
    Transmit,
)
from swampcast.geometry import Network, Point
from swampcast.partition import (
    LinePartition,
    Partition,
    PartitionLabel,
    PlanePartition,
    make_partition,
)
from swampcast.spokesmen import (
    LINE_SLOT_ORDER,
    LineRole,
    elect_line_spokesmen,
    elect_plane_spokesmen,
    line_families,
    plane_slot_calendar,
)

logger = logging.getLogger(__name__)

DEFAULT_HORIZON_MULT = 16


class RelayProgram(NodeProgram):
    """Once-only spokesman relay driven by a per-block slot calendar."""

    slots_per_block: int
    calendar: Mapping[object, int]

    def __init__(
        self,
        node: int,
        position: Point,
        partition: Partition,
        knowledge: KnowledgeSet,
        *,
        source: bool = False,
        start_round: int = 0,
    ) -> None:
        """Start relaying at `start_round` with the knowledge left by D*."""
        super().__init__(node, position)
        self.partition = partition
        self.knowledge = knowledge
        self.label = partition.label_of(position)
        self.source = source
        self.start_round = start_round
        self.sent = False
        self.roles: set = set()
        self.heard: list[Point] = []
        self._informed = source

    @property
    def iteration_length(self) -> int:
        """Rounds of one iteration over all blocks."""
        return self.partition.mu * self.slots_per_block

    def group_position(self, round_index: int) -> tuple[int, int] | None:
        """(block, slot) whose group runs in `round_index`."""
        rel = round_index - self.start_round
        if rel < 0:
            return None
        offset = rel % self.iteration_length
        block, slot = divmod(offset, self.slots_per_block)
        return block + 1, slot

    @property
    def first_slot(self) -> int | None:
        """Calendar slot of the first held role."""
        if not self.roles:
            return None
        return min(self.calendar[role] for role in self.roles)

    @abstractmethod
    def elect(self) -> None:
        """Refresh `roles` at the head of the own block's group."""

    def act(self, round_index: int) -> Action:
        """Send once, in the slot of the first held role."""
        position = self.group_position(round_index)
        if position is None or position[0] != self.label.block:
            return LISTEN
        slot = position[1]
        if slot == 0:
            self.elect()
        if (
            self._informed
            and not self.sent
            and len(self.knowledge) > 0
            and self.first_slot == slot
        ):
            self.sent = True
            return Transmit(Message.data(self.position))
        return LISTEN

    def observe(self, round_index: int, observation: Observation) -> None:  # noqa: ARG002
        """Pick up the source message and remember where it came from."""
        if isinstance(observation, Heard) and observation.message.kind == MessageKind.DATA:
            self._informed = True
            self.heard.append(observation.message.origin)

    @property
    def informed(self) -> bool:
        """Whether the node holds the source message."""
        return self._informed


class LineRelayProgram(RelayProgram):
    """Procedure T on the line."""

    slots_per_block = len(LINE_SLOT_ORDER)
    calendar: ClassVar[Mapping[object, int]] = {
        role: i for i, role in enumerate(LINE_SLOT_ORDER)
    }

    def __init__(
        self,
        node: int,
        position: Point,
        partition: Partition,
        knowledge: KnowledgeSet,
        *,
        source: bool = False,
        start_round: int = 0,
    ) -> None:
        """Relay on a line partition."""
        if not isinstance(partition, LinePartition):
            msg = f"Procedure T needs a line partition, got {partition!r}"
            raise TypeError(msg)
        super().__init__(
            node, position, partition, knowledge, source=source, start_round=start_round
        )

    def _interval(self, home: int) -> tuple[float, float]:
        label = PartitionLabel(self.label.region, self.label.block, home)
        (lo,), (hi,) = self.partition.home_box(label)
        return lo, hi

    def elect(self) -> None:
        """Elect from the heard ranges and the known block-mates."""
        roles: set[LineRole] = set()
        if self.partition.nu == 1:
            if self._informed:
                roles.add(LineRole.LEFT_BOUNDARY)
        else:
            own = self.label.home
            homes = {own: self._interval(own)}
            for mate in self.knowledge.block_mates():
                homes[mate.label.home] = self._interval(mate.label.home)
            (lo,), (hi,) = self.partition.block_box(self.label.region, self.label.block)
            left, right = line_families(
                (x for (x,) in self.heard), (lo, hi), self.partition.s
            )
            elected = elect_line_spokesmen(
                homes, left, right, [own] if self._informed else []
            )
            roles = {role for role, home in elected.items() if home == own}
            if self.source and not self.sent:
                roles.add(LineRole.LEFT_BOUNDARY)
        self.roles = roles


class PlaneRelayProgram(RelayProgram):
    """Procedure T2 in the plane; elections come from block-knowledge grants."""

    def __init__(
        self,
        node: int,
        position: Point,
        partition: Partition,
        knowledge: KnowledgeSet,
        *,
        source: bool = False,
        start_round: int = 0,
    ) -> None:
        """Relay on a plane partition."""
        if not isinstance(partition, PlanePartition):
            msg = f"Procedure T2 needs a plane partition, got {partition!r}"
            raise TypeError(msg)
        super().__init__(
            node, position, partition, knowledge, source=source, start_round=start_round
        )
        self.k = partition.homes_per_side
        order = plane_slot_calendar(self.k)
        self.slots_per_block = len(order)
        self.calendar = {role: i for i, role in enumerate(order)}

    def elect(self) -> None:
        """Roles were set by the grant preceding the group."""

    def known_slots(self) -> set[tuple[int, int]]:
        """(block, home) pairs discovered by D*."""
        return self.knowledge.slots()

    def receive_grant(self, grant: Mapping[int, bool]) -> None:
        """Elect from the informed flags of the block's homes."""
        elected = elect_plane_spokesmen([h for h, flag in grant.items() if flag], self.k)
        self.roles = {role for role, home in elected.items() if home == self.label.home}


class BroadcastProgram(NodeProgram):
    """D* followed by a relay program sharing its knowledge."""

    def __init__(
        self,
        node: int,
        position: Point,
        partition: Partition,
        relay_cls: type[RelayProgram],
        *,
        source: bool = False,
    ) -> None:
        """Chain discovery and relaying."""
        super().__init__(node, position)
        self.discovery = DiscoveryProgram(node, position, partition, d_star_stages(partition))
        self.switch = d_star_rounds(partition)
        self.relay = relay_cls(
            node,
            position,
            partition,
            self.discovery.knowledge,
            source=source,
            start_round=self.switch,
        )

    def act(self, round_index: int) -> Action:
        """Delegate to the current stage."""
        if round_index < self.switch:
            return self.discovery.act(round_index)
        return self.relay.act(round_index)

    def observe(self, round_index: int, observation: Observation) -> None:
        """Delegate to the current stage."""
        if round_index < self.switch:
            self.discovery.observe(round_index, observation)
        else:
            self.relay.observe(round_index, observation)

    @property
    def informed(self) -> bool:
        """Whether the node holds the source message."""
        return self.relay.informed

    @property
    def roles(self) -> set:
        """Roles currently held by the relay stage."""
        return self.relay.roles

    def known_slots(self) -> set[tuple[int, int]]:
        """(block, home) pairs discovered so far."""
        return self.discovery.knowledge.slots()

    def receive_grant(self, grant: Mapping[int, bool]) -> None:
        """Forward a grant to a plane relay."""
        if not isinstance(self.relay, PlaneRelayProgram):
            msg = f"Node {self.node} runs a line relay and takes no grants"
            raise GrantError(msg)
        self.relay.receive_grant(grant)


@dataclass(frozen=True)
class SpokesmanAudit:
    """Informed nodes and elected spokesmen of one block group in one region."""

    round: int
    region: tuple[int, ...]
    block: int
    informed: tuple[int, ...]
    spokesmen: tuple[int, ...]


@dataclass
class RelayRun:
    """A relay run with its audits and round accounting.

    `bound` is the number of rounds within which the run should complete:
    the discovery rounds plus one iteration per hop of the source's
    eccentricity. `knowledge` is what every node knew when relaying began.
    """

    result: SimResult
    bound: int
    iteration_length: int
    iterations: int
    discovery_rounds: int = 0
    audits: list[SpokesmanAudit] = field(default_factory=list)
    knowledge: list[KnowledgeSet] = field(default_factory=list)


def eccentricity(net: Network, source: int) -> int:
    """Hop eccentricity of `source` within its connected component."""
    return max(nx.single_source_shortest_path_length(net.graph, source).values())


def _check_source(net: Network, source: int) -> None:
    if not 0 <= source < net.n:
        msg = f"Source {source} is not a node of a {net.n}-node network"
        raise ValueError(msg)


def _check_unknown_topology(net: Network, dim: int) -> None:
    if net.dim != dim:
        msg = f"Expected a {dim}-D network, got {net.dim}-D"
        raise ValueError(msg)
    if net.params.r != 1:
        msg = f"Unknown-topology broadcast needs r = 1, got r = {net.params.r}"
        raise ValueError(msg)
    if net.params.gamma > 1:
        msg = f"Unknown-topology broadcast needs gamma <= 1, got {net.params.gamma}"
        raise ValueError(msg)


def _block_members(
    net: Network, partition: Partition
) -> dict[int, dict[tuple[int, ...], list[int]]]:
    members: dict[int, dict[tuple[int, ...], list[int]]] = {}
    for u in range(net.n):
        label = partition.label_of(net.position(u))
        members.setdefault(label.block, {}).setdefault(label.region, []).append(u)
    return members


def _relay_loop(
    sim: Simulator,
    partition: Partition,
    slots_per_block: int,
    limit: int,
    *,
    grants: bool,
) -> tuple[int, list[SpokesmanAudit]]:
    """Run iterations until one is silent or `limit` rounds have passed."""
    members = _block_members(sim.net, partition)
    programs = sim.programs
    audits: list[SpokesmanAudit] = []
    iterations = 0
    while sim.round < limit:
        start = len(sim.traces)
        iterations += 1
        for block in range(1, partition.mu + 1):
            if sim.round >= limit:
                break
            head = sim.round
            if grants:
                sim.grant_block_knowledge(partition, block)
            regions = members.get(block, {})
            informed = {
                region: tuple(u for u in nodes if programs[u].informed)
                for region, nodes in regions.items()
            }
            sim.run(min(slots_per_block, limit - sim.round))
            for region, nodes in sorted(regions.items()):
                elected = tuple(u for u in nodes if getattr(programs[u], "roles", None))
                if informed[region] or elected:
                    audits.append(
                        SpokesmanAudit(head, region, block, informed[region], elected)
                    )
        sent = sum(len(trace.transmitters) for trace in sim.traces[start:])
        logger.debug("Iteration %d: %d transmissions", iterations, sent)
        if sent == 0:
            break
    return iterations, audits


def _relay_programs(
    net: Network,
    partition: Partition,
    knowledge: Sequence[KnowledgeSet],
    source: int,
    relay_cls: type[RelayProgram],
) -> list[RelayProgram]:
    if len(knowledge) != net.n:
        msg = f"Expected knowledge for {net.n} nodes, got {len(knowledge)}"
        raise ValueError(msg)
    return [
        relay_cls(u, net.position(u), partition, knowledge[u].copy(), source=u == source)
        for u in range(net.n)
    ]


def _run_relay(
    net: Network,
    partition: Partition,
    knowledge: Sequence[KnowledgeSet],
    source: int,
    relay_cls: type[RelayProgram],
    horizon_mult: int,
) -> RelayRun:
    _check_source(net, source)
    programs = _relay_programs(net, partition, knowledge, source, relay_cls)
    spb = programs[0].slots_per_block
    iteration_length = partition.mu * spb
    bound = eccentricity(net, source) * iteration_length
    sim = Simulator(net, programs)
    sim.mark("T")
    iterations, audits = _relay_loop(
        sim,
        partition,
        spb,
        horizon_mult * (bound + iteration_length),
        grants=relay_cls is PlaneRelayProgram,
    )
    return RelayRun(
        sim.result(),
        bound,
        iteration_length,
        iterations,
        0,
        audits,
        [ks.copy() for ks in knowledge],
    )


def run_procedure_T(  # noqa: N802
    net: Network,
    partition: Partition,
    knowledge: Sequence[KnowledgeSet],
    source: int = 0,
    *,
    horizon_mult: int = DEFAULT_HORIZON_MULT,
) -> RelayRun:
    """Procedure T on a line network whose nodes ran D*."""
    return _run_relay(net, partition, knowledge, source, LineRelayProgram, horizon_mult)


def run_procedure_T2(  # noqa: N802
    net: Network,
    partition: Partition,
    knowledge: Sequence[KnowledgeSet],
    source: int = 0,
    *,
    horizon_mult: int = DEFAULT_HORIZON_MULT,
) -> RelayRun:
    """Procedure T2 on a plane network whose nodes ran D*."""
    return _run_relay(net, partition, knowledge, source, PlaneRelayProgram, horizon_mult)


def _run_broadcast(
    net: Network,
    source: int,
    dim: int,
    relay_cls: type[RelayProgram],
    horizon_mult: int,
    max_rounds: int | None,
) -> RelayRun:
    _check_unknown_topology(net, dim)
    _check_source(net, source)
    partition = make_partition(net.params, dim)
    programs = [
        BroadcastProgram(u, net.position(u), partition, relay_cls, source=u == source)
        for u in range(net.n)
    ]
    discovery = d_star_rounds(partition)
    spb = programs[0].relay.slots_per_block
    iteration_length = partition.mu * spb
    bound = discovery + eccentricity(net, source) * iteration_length
    limit = horizon_mult * (bound + iteration_length)
    if max_rounds is not None:
        limit = min(limit, max_rounds)
    logger.info(
        "%s on %d nodes: %r, D* %d rounds, iteration %d rounds, bound %d",
        "B" if dim == 1 else "B2",
        net.n,
        partition,
        discovery,
        iteration_length,
        bound,
    )

    sim = Simulator(net, programs)
    sim.mark("D*")
    sim.run(min(discovery, limit))
    knowledge = [p.discovery.knowledge.copy() for p in programs]
    sim.mark("T")
    iterations, audits = _relay_loop(
        sim, partition, spb, limit, grants=relay_cls is PlaneRelayProgram
    )
    result = sim.result()
    if result.completion_round is None:
        logger.warning(
            "Broadcast stopped after %d rounds with %d of %d nodes informed",
            result.rounds_run,
            len(result.informed_final),
            net.n,
        )
    return RelayRun(
        result, bound, iteration_length, iterations, discovery, audits, knowledge
    )


def run_algorithm_B(  # noqa: N802
    net: Network,
    source: int = 0,
    *,
    horizon_mult: int = DEFAULT_HORIZON_MULT,
    max_rounds: int | None = None,
) -> RelayRun:
    """Algorithm B: D* then T, on a line network of unknown topology."""
    return _run_broadcast(net, source, 1, LineRelayProgram, horizon_mult, max_rounds)


def run_algorithm_B2(  # noqa: N802
    net: Network,
    source: int = 0,
    *,
    horizon_mult: int = DEFAULT_HORIZON_MULT,
    max_rounds: int | None = None,
) -> RelayRun:
    """Algorithm B2: D* then T2, on a plane network of unknown topology."""
    return _run_broadcast(net, source, 2, PlaneRelayProgram, horizon_mult, max_rounds)

"""Neighbourhood discovery by hello slots and by silence.

Procedure D gives every (block, home) slot of a region one round: the node in
that slot (in every region at once) says hello and everyone else listens.
Identically labelled slots of distinct regions are too far apart to collide,
so each node hears exactly its neighbours at distance (s, 1].

Nodes within distance s can never be heard. Procedure D_(b,h) finds them by
silence: the (b, h) node of each region transmits every round, the others
transmit in their own slot, and a node that normally hears (b, h) but gets
silence in some slot learns that the slot's node sits within distance 1.
D* runs D and then D_(b,h) for every slot.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
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
    Silence,
    Transmit,
    run,
)
from swampcast.geometry import Network, Point
from swampcast.partition import Partition, PartitionLabel

logger = logging.getLogger(__name__)

Slot = tuple[int, int]


@dataclass(frozen=True)
class KnownNode:
    """A discovered node: its label and its home centre."""

    label: PartitionLabel
    location: Point


@dataclass
class KnowledgeSet:
    """The nodes a node knows about, keyed by (block, home).

    Two nodes sharing a (block, home) pair are never both within distance 1
    of a third, so the pair identifies a known node.
    """

    owner: PartitionLabel
    known: dict[Slot, KnownNode] = field(default_factory=dict)

    def add(self, label: PartitionLabel, location: Point) -> bool:
        """Record a node; return true if it was new."""
        if label.slot in self.known:
            return False
        self.known[label.slot] = KnownNode(label, location)
        return True

    def __contains__(self, slot: object) -> bool:
        """Whether a (block, home) pair is known."""
        return slot in self.known

    def __len__(self) -> int:
        """Number of known nodes."""
        return len(self.known)

    def slots(self) -> set[Slot]:
        """Known (block, home) pairs."""
        return set(self.known)

    def block_mates(self) -> list[KnownNode]:
        """Known nodes in the owner's own block of its own region."""
        return [
            node
            for node in self.known.values()
            if node.label.region == self.owner.region and node.label.block == self.owner.block
        ]

    def copy(self) -> "KnowledgeSet":
        """Independent copy."""
        return KnowledgeSet(self.owner, dict(self.known))


Stage = tuple[Literal["D"]] | tuple[Literal["D_bh"], int, int]


def d_stages() -> list[Stage]:
    """Stages of Procedure D."""
    return [("D",)]


def d_star_stages(partition: Partition) -> list[Stage]:
    """Stages of Procedure D*: D, then D_(b,h) for every slot in schedule order."""
    return [("D",)] + [("D_bh", b, h) for b, h in partition.iter_slots()]


class DiscoveryProgram(NodeProgram):
    """Runs a sequence of discovery stages, each lasting mu * nu rounds."""

    def __init__(
        self,
        node: int,
        position: Point,
        partition: Partition,
        stages: Sequence[Stage],
        knowledge: KnowledgeSet | None = None,
        *,
        start_round: int = 0,
    ) -> None:
        """Prepare the stages; reuse `knowledge` when given.

        Knowledge handed in is taken as the outcome of a prior Procedure D, so
        its nodes count as heard neighbours.
        """
        super().__init__(node, position)
        self.partition = partition
        self.stages = list(stages)
        self.label = partition.label_of(position)
        self.knowledge = knowledge if knowledge is not None else KnowledgeSet(self.label)
        # slots heard saying hello; only these can anchor a D_(b,h) stage
        self.heard_slots: set[Slot] = self.knowledge.slots()
        self.start_round = start_round
        self.horizon = start_round + len(self.stages) * partition.slots

    def _where(self, round_index: int) -> tuple[Stage, Slot] | None:
        rel = round_index - self.start_round
        if rel < 0 or rel >= len(self.stages) * self.partition.slots:
            return None
        stage_index, slot_index = divmod(rel, self.partition.slots)
        return self.stages[stage_index], self.partition.slot_of(slot_index)

    def act(self, round_index: int) -> Action:
        """Say hello in the own slot, and continuously when being (b, h)."""
        where = self._where(round_index)
        if where is None:
            return LISTEN
        stage, slot = where
        if slot == self.label.slot or (stage[0] == "D_bh" and stage[1:] == self.label.slot):
            return Transmit(Message.hello(self.position))
        return LISTEN

    def observe(self, round_index: int, observation: Observation) -> None:
        """Learn hello senders in D and silent slots in D_(b,h)."""
        where = self._where(round_index)
        if where is None:
            return
        stage, slot = where
        if stage[0] == "D":
            if isinstance(observation, Heard) and observation.message.kind == MessageKind.HELLO:
                label = self.partition.label_of(observation.message.origin)
                self.knowledge.add(label, self.partition.home_center(label))
                self.heard_slots.add(label.slot)
        elif isinstance(observation, Silence) and stage[1:] in self.heard_slots:
            label = self.partition.locate(slot, self.position)
            if self.knowledge.add(label, self.partition.home_center(label)):
                logger.debug("Node %d found %s by silence", self.node, label)


@dataclass
class DiscoveryResult:
    """Knowledge of every node after a discovery procedure, and its trace."""

    knowledge: list[KnowledgeSet]
    result: SimResult


def _run_stages(
    net: Network,
    partition: Partition,
    stages: Sequence[Stage],
    knowledge: Sequence[KnowledgeSet] | None = None,
) -> DiscoveryResult:
    programs = [
        DiscoveryProgram(
            u,
            net.position(u),
            partition,
            stages,
            None if knowledge is None else knowledge[u].copy(),
        )
        for u in range(net.n)
    ]
    rounds = len(stages) * partition.slots
    result = run(net, programs, rounds)
    return DiscoveryResult([p.knowledge for p in programs], result)


def run_procedure_D(net: Network, partition: Partition) -> DiscoveryResult:  # noqa: N802
    """Procedure D: mu * nu rounds of hello slots."""
    logger.info("Procedure D: %d rounds on %d nodes", partition.slots, net.n)
    return _run_stages(net, partition, d_stages())


def run_procedure_D_bh(  # noqa: N802
    net: Network,
    partition: Partition,
    b: int,
    h: int,
    knowledge: Sequence[KnowledgeSet],
) -> DiscoveryResult:
    """Procedure D_(b,h) on top of existing knowledge (left untouched)."""
    logger.debug("Procedure D_(%d,%d)", b, h)
    return _run_stages(net, partition, [("D_bh", b, h)], knowledge)


def run_procedure_D_star(net: Network, partition: Partition) -> DiscoveryResult:  # noqa: N802
    """Procedure D*: D followed by D_(b,h) for all slots, mu*nu*(1 + mu*nu) rounds."""
    stages = d_star_stages(partition)
    logger.info(
        "Procedure D*: %d rounds on %d nodes", len(stages) * partition.slots, net.n
    )
    return _run_stages(net, partition, stages)


def d_star_rounds(partition: Partition) -> int:
    """Length of Procedure D*."""
    return partition.slots * (1 + partition.slots)

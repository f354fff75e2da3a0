"""Tests for the round engine and the reception rule."""

from collections.abc import Mapping

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swampcast.engine import (
    LISTEN,
    Action,
    GrantError,
    Heard,
    Message,
    MessageKind,
    NodeProgram,
    Observation,
    ProgramFaultError,
    Silence,
    Simulator,
    Transmit,
    deliveries_for_round,
    grant_block_knowledge,
    run,
)
from swampcast.geometry import Network, RadioParams
from swampcast.lattice import line_network
from swampcast.oracle import oracle_deliveries, oracle_round
from swampcast.partition import LinePartition, PlanePartition


def _sending(net: Network, *nodes: int) -> dict[int, Message]:
    return {u: Message.data(net.position(u)) for u in nodes}


class TestReceptionRule:
    """Exactly one transmitter in range and none within s."""

    def test_single_transmitter(self) -> None:
        net = line_network(10, 3, 1)
        outcome = deliveries_for_round(net, _sending(net, 0))
        assert set(outcome.deliveries) == {2, 3}
        assert outcome.swamp_blocked == frozenset({1})
        assert outcome.collision_blocked == frozenset()

    def test_collision_and_swamping(self) -> None:
        net = line_network(10, 3, 1)
        outcome = deliveries_for_round(net, _sending(net, 0, 6))
        assert {v: sender for v, (sender, _) in outcome.deliveries.items()} == {
            2: 0,
            4: 6,
            8: 6,
            9: 6,
        }
        assert outcome.collision_blocked == frozenset({3})
        assert outcome.swamp_blocked == frozenset({1, 5, 7})

    def test_transmitters_hear_nothing(self) -> None:
        net = line_network(4, 1, 0)
        outcome = deliveries_for_round(net, _sending(net, 0, 1))
        assert 0 not in outcome.deliveries
        assert 1 not in outcome.deliveries

    def test_invalid_transmitter(self) -> None:
        net = line_network(4, 1, 0)
        with pytest.raises(ValueError, match="Invalid transmitter"):
            deliveries_for_round(net, {7: Message.hello((7.0,))})

    @settings(max_examples=50)
    @given(
        st.lists(
            st.floats(min_value=0, max_value=3, allow_nan=False, allow_subnormal=False),
            min_size=1,
            max_size=10,
            unique=True,
        ),
        st.data(),
    )
    def test_matches_pairwise_oracle(self, xs: list[float], data: st.DataObject) -> None:
        net = Network.from_points(xs, RadioParams(r=1, s=0.25, gamma=0.01))
        chosen = data.draw(st.sets(st.integers(0, net.n - 1)))
        outcome = deliveries_for_round(net, _sending(net, *chosen))
        engine = {v: sender for v, (sender, _) in outcome.deliveries.items()}
        assert engine == oracle_deliveries(net, chosen)
        expected = oracle_round(net, chosen)
        assert outcome.collision_blocked == expected.collision_blocked
        assert outcome.swamp_blocked == expected.swamp_blocked


class _Beacon(NodeProgram):
    """Node 0 sends data in round 0; everyone records what they observe."""

    def __init__(self, node: int, position: tuple[float, ...]) -> None:
        super().__init__(node, position)
        self.seen: list[Observation] = []
        self._informed = node == 0

    def act(self, round_index: int) -> Action:
        if self.node == 0 and round_index == 0:
            return Transmit(Message.data(self.position))
        return LISTEN

    def observe(self, round_index: int, observation: Observation) -> None:  # noqa: ARG002
        self.seen.append(observation)
        if isinstance(observation, Heard):
            self._informed = True

    @property
    def informed(self) -> bool:
        return self._informed


class _Faulty(NodeProgram):
    def act(self, round_index: int) -> Action:
        if round_index == 2:
            msg = "boom"
            raise RuntimeError(msg)
        return LISTEN


class _Informed(NodeProgram):
    def act(self, round_index: int) -> Action:  # noqa: ARG002
        return LISTEN

    @property
    def informed(self) -> bool:
        return True


class TestSimulator:
    """Driving programs through rounds."""

    def test_observations_and_completion(self) -> None:
        net = line_network(3, 2, 0)
        programs = [_Beacon(u, net.position(u)) for u in range(3)]
        result = run(net, programs, 3)
        assert result.rounds_run == 3
        assert result.completion_round == 0
        assert result.rounds_used == 1
        assert isinstance(programs[1].seen[0], Heard)
        assert programs[1].seen[0].message.kind == MessageKind.DATA
        assert isinstance(programs[1].seen[1], Silence)
        assert programs[0].seen == [Silence(), Silence()]
        assert result.transmissions() == [(0, 0)]

    def test_all_informed_before_start(self) -> None:
        net = line_network(2, 1, 0)
        result = run(net, [_Informed(u, net.position(u)) for u in range(2)], 1)
        assert result.completion_round == -1
        assert result.rounds_used == 0

    def test_program_fault_names_node_and_round(self) -> None:
        net = line_network(2, 1, 0)
        programs = [_Informed(0, net.position(0)), _Faulty(1, net.position(1))]
        with pytest.raises(ProgramFaultError, match="node 1 faulted in round 2") as info:
            run(net, programs, 5)
        assert (info.value.node, info.value.round_index) == (1, 2)

    def test_program_count_must_match(self) -> None:
        net = line_network(3, 1, 0)
        with pytest.raises(ValueError, match="Expected 3 programs"):
            Simulator(net, [_Informed(0, net.position(0))])

    def test_markers(self) -> None:
        net = line_network(2, 1, 0)
        sim = Simulator(net, [_Informed(u, net.position(u)) for u in range(2)])
        sim.run(4)
        sim.mark("late")
        assert sim.result().markers == {"late": 4}

    def test_max_rounds_must_be_positive(self) -> None:
        net = line_network(2, 1, 0)
        with pytest.raises(ValueError, match="positive"):
            run(net, [_Informed(u, net.position(u)) for u in range(2)], 0)


class _Receiver(NodeProgram):
    """Listens; records the grants it is handed."""

    def __init__(
        self,
        node: int,
        position: tuple[float, ...],
        known: set[tuple[int, int]],
        *,
        informed: bool = False,
    ) -> None:
        super().__init__(node, position)
        self.known = known
        self.grants: list[dict[int, bool]] = []
        self._informed = informed

    def act(self, round_index: int) -> Action:  # noqa: ARG002
        return LISTEN

    @property
    def informed(self) -> bool:
        return self._informed

    def known_slots(self) -> set[tuple[int, int]]:
        return self.known

    def receive_grant(self, grant: Mapping[int, bool]) -> None:
        self.grants.append(dict(grant))


PLANE = RadioParams(r=1, s=0.2, gamma=0.2)
# homes 1 and 4 of block 1 in region (0, 0), home 1 of block 1 in region (0, 1),
# and a node in another block
PLANE_POINTS = [(0.01, 0.01), (0.18, 0.18), (3.01, 0.01), (0.6, 0.05)]


class TestGrantBlockKnowledge:
    """Informed flags of co-block homes, region by region."""

    def test_grants_per_region(self) -> None:
        net = Network.from_points(PLANE_POINTS, PLANE)
        programs = [
            _Receiver(0, net.position(0), {(1, 4)}, informed=True),
            _Receiver(1, net.position(1), {(1, 1)}),
            _Receiver(2, net.position(2), set()),
            _Receiver(3, net.position(3), set()),
        ]
        events = grant_block_knowledge(net, PlanePartition(0.2, 0.2), programs, 1, 7)
        assert [(e.round, e.region, e.block) for e in events] == [(7, (0, 0), 1), (7, (0, 1), 1)]
        assert events[0].homes == ((1, True), (4, False))
        assert events[0].nodes == (0, 1)
        assert programs[0].grants == programs[1].grants == [{1: True, 4: False}]
        assert programs[2].grants == [{1: False}]
        assert programs[3].grants == []

    def test_undiscovered_co_block_node(self) -> None:
        net = Network.from_points(PLANE_POINTS[:2], PLANE)
        programs = [
            _Receiver(0, net.position(0), set()),
            _Receiver(1, net.position(1), {(1, 1)}),
        ]
        with pytest.raises(GrantError, match="Node 0 has not discovered"):
            grant_block_knowledge(net, PlanePartition(0.2, 0.2), programs, 1)

    def test_program_without_grants(self) -> None:
        net = Network.from_points(PLANE_POINTS[:1], PLANE)
        programs = [_Informed(0, net.position(0))]
        with pytest.raises(GrantError, match="cannot receive"):
            grant_block_knowledge(net, PlanePartition(0.2, 0.2), programs, 1)

    def test_line_model(self) -> None:
        net = line_network(3, 1, 0)
        programs = [_Informed(u, net.position(u)) for u in range(3)]
        with pytest.raises(GrantError, match="only in the plane"):
            grant_block_knowledge(net, LinePartition(0.0, 1.0), programs, 1)

    def test_simulator_keeps_the_events(self) -> None:
        net = Network.from_points(PLANE_POINTS[:2], PLANE)
        programs = [
            _Receiver(0, net.position(0), {(1, 4)}),
            _Receiver(1, net.position(1), {(1, 1)}),
        ]
        sim = Simulator(net, programs)
        sim.run(2)
        sim.grant_block_knowledge(PlanePartition(0.2, 0.2), 1)
        assert [e.round for e in sim.result().grants] == [2]

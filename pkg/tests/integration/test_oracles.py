"""Oracles agree with the engine on generated networks."""

import numpy as np
import pytest

from swampcast.discovery import run_procedure_D_star
from swampcast.engine import LISTEN, Action, Message, NodeProgram, Transmit, run
from swampcast.geometry import Network, PlacementSpec, RadioParams, generate_placement
from swampcast.lattice import execute_plan, line_network, plan_algorithm_a
from swampcast.oracle import (
    check_closer_farther_samples,
    check_collision_free,
    check_discovery_complete,
    check_discovery_exact,
    check_lemmas,
    check_link_set,
    check_no_cross_region_collision,
    check_range_overlap,
    check_reception_rule,
    check_relay_scaling,
    check_single_home,
    check_transmitter_spacing,
    flooding_baseline,
    oracle_knowledge,
    oracle_neighbors,
)
from swampcast.partition import PlanePartition, make_partition


@pytest.fixture
def six_nodes() -> Network:
    """Nodes 0.3 apart with s = 0.35: direct neighbours swamp each other."""
    return Network.from_points(
        [0.0, 0.3, 0.6, 0.9, 1.2, 1.5], RadioParams(r=1, s=0.35, gamma=0.3)
    )


@pytest.fixture
def random_line() -> Network:
    spec = PlacementSpec(kind="random-line", length=6, count=14)
    return generate_placement(spec, RadioParams(r=1, s=0.2, gamma=0.3), seed=21)


class TestOracleNeighbors:
    """Linear-scan neighbourhoods."""

    def test_swamped_neighbours_are_excluded(self, six_nodes: Network) -> None:
        assert oracle_neighbors(six_nodes, 0) == {2, 3}
        assert oracle_neighbors(six_nodes, 2) == {0, 4, 5}

    def test_agrees_with_the_link_matrix(self, random_line: Network) -> None:
        for u in range(random_line.n):
            assert oracle_neighbors(random_line, u) == random_line.neighbors(u)


class TestFloodingBaseline:
    """BFS over the oracle link graph."""

    def test_hops_skip_swamped_neighbours(self, six_nodes: Network) -> None:
        baseline = flooding_baseline(six_nodes, 0)
        assert baseline.hops == {0: 0, 2: 1, 3: 1, 1: 2, 4: 2, 5: 2}
        assert baseline.eccentricity == 2
        assert baseline.connected

    def test_disconnected_layers(self) -> None:
        net = Network.from_points([0.0, 0.5, 3.0, 3.5], RadioParams(r=1, s=0.1, gamma=0.5))
        baseline = flooding_baseline(net, 2)
        assert not baseline.connected
        assert baseline.hops == {2: 0, 3: 1}
        assert [sorted(layer) for layer in baseline.layers] == [[2, 3], [0, 1]]

    def test_bad_source(self, six_nodes: Network) -> None:
        with pytest.raises(ValueError, match="not a node"):
            flooding_baseline(six_nodes, 6)


class TestStructuralChecks:
    """Link sets, reception, homes and region spacing."""

    def test_random_line(self, random_line: Network) -> None:
        rng = np.random.default_rng(0)
        partition = make_partition(random_line.params, 1)
        for check in (
            check_link_set(random_line),
            check_reception_rule(random_line, rng),
            check_single_home(random_line, partition),
            check_no_cross_region_collision(partition, rng),
            check_range_overlap(random_line),
        ):
            assert check.passed, str(check)

    def test_plane_partition_spacing(self) -> None:
        partition = make_partition(RadioParams(r=1, s=0.2, gamma=0.5), 2)
        check = check_no_cross_region_collision(partition, np.random.default_rng(1))
        assert check.passed, str(check)


class _Chatter(NodeProgram):
    """Every node but 1 transmits in every round."""

    def act(self, round_index: int) -> Action:  # noqa: ARG002
        if self.node == 1:
            return LISTEN
        return Transmit(Message.data(self.position))

    @property
    def informed(self) -> bool:
        return True


class TestScheduleChecks:
    """Spacing of same-round transmitters and collision-free traces."""

    def test_algorithm_a_trace(self) -> None:
        net = line_network(100, 3, 1)
        result = execute_plan(net, plan_algorithm_a(100, 3, 1))
        assert check_transmitter_spacing(result, net, 6).passed
        assert check_collision_free(result.rounds, "scheme-collisions").passed

    def test_spacing_witness(self) -> None:
        net = line_network(100, 3, 1)
        result = execute_plan(net, plan_algorithm_a(100, 3, 1))
        check = check_transmitter_spacing(result, net, 100)
        assert not check.passed
        assert check.witness is not None
        assert check.witness["distance"] <= 100

    def test_collision_witness(self) -> None:
        net = line_network(3, 1, 0)
        result = run(net, [_Chatter(u, net.position(u)) for u in range(3)], 2)
        check = check_collision_free(result.rounds, "relay-collisions")
        assert check.name == "relay-collisions"
        assert not check.passed
        assert check.witness == {"round": 0, "listeners": [1], "transmitters": [0, 2]}


class TestDiscoveryChecks:
    """D finds exactly the neighbours, D* everyone within distance 1."""

    def test_discovery_exact(self, random_line: Network) -> None:
        partition = make_partition(random_line.params, 1)
        check = check_discovery_exact(random_line, partition)
        assert check.passed, str(check)

    def test_d_star_matches_the_oracle(self, six_nodes: Network) -> None:
        partition = make_partition(six_nodes.params, 1)
        outcome = run_procedure_D_star(six_nodes, partition)
        check = check_discovery_complete(six_nodes, partition, outcome.knowledge)
        assert check.passed, str(check)
        expected = oracle_knowledge(six_nodes, partition)
        assert [ks.slots() for ks in outcome.knowledge] == [ks.slots() for ks in expected]

    def test_incomplete_knowledge_is_reported(self, six_nodes: Network) -> None:
        partition = make_partition(six_nodes.params, 1)
        knowledge = oracle_knowledge(six_nodes, partition)
        knowledge[3].known.clear()
        check = check_discovery_complete(six_nodes, partition, knowledge)
        assert not check.passed
        assert check.witness is not None
        assert check.witness["node"] == 3


class TestLemmaBattery:
    """The battery the `check-lemmas` command runs."""

    def test_lattice_family(self) -> None:
        report = check_lemmas("lattice")
        assert report.passed, [str(c) for c in report.failures()]
        assert {c.name for c in report.checks} == {
            "impossibility",
            "annulus-coverage",
            "local-scheme",
        }

    @pytest.mark.slow
    def test_line_family(self) -> None:
        report = check_lemmas("line", count=2, seed=4)
        assert report.passed, [str(c) for c in report.failures()]

    def test_unknown_family(self) -> None:
        with pytest.raises(ValueError, match="Unknown lemma family"):
            check_lemmas("torus")  # type: ignore[arg-type]


def _random(kind: str, s: float, gamma: float, seed: int) -> Network:
    params = RadioParams(r=1, s=s, gamma=gamma)
    if kind == "random-line":
        spec = PlacementSpec(kind=kind, length=6.0, connected=False)
    else:
        spec = PlacementSpec(kind=kind, width=4.0, height=4.0, count=20, connected=False)
    return generate_placement(spec, params, seed)


@pytest.mark.slow
class TestOracleSweeps:
    """The oracles against the engine on many seeded networks."""

    @pytest.mark.parametrize(
        ("kind", "s", "gamma"),
        [
            ("random-line", 0.2, 0.1),
            ("random-line", 0.5, 0.1),
            ("random-line", 0.2, 0.5),
            ("random-plane", 0.2, 0.5),
            ("random-plane", 0.2, 0.2),
        ],
    )
    def test_reception_rule(self, kind: str, s: float, gamma: float) -> None:
        rng = np.random.default_rng(11)
        for seed in range(25):
            net = _random(kind, s, gamma, seed)
            check = check_reception_rule(net, rng)
            assert check.passed, (seed, check.witness)

    @pytest.mark.parametrize(("s", "gamma"), [(0.2, 0.1), (0.5, 0.1), (0.8, 0.1), (0.5, 0.2), (0.2, 0.5)])
    def test_discovery_exact_on_lines(self, s: float, gamma: float) -> None:
        for seed in range(10):
            net = _random("random-line", s, gamma, seed)
            check = check_discovery_exact(net, make_partition(net.params, 1))
            assert check.passed, (seed, check.witness)

    @pytest.mark.parametrize("gamma", [0.2, 0.5])
    def test_discovery_exact_on_planes(self, gamma: float) -> None:
        for seed in range(25):
            net = _random("random-plane", 0.2, gamma, seed)
            check = check_discovery_exact(net, make_partition(net.params, 2))
            assert check.passed, (seed, check.witness)

    def test_closer_farther(self) -> None:
        partition = make_partition(RadioParams(r=1, s=0.2, gamma=0.5), 2)
        assert isinstance(partition, PlanePartition)
        check = check_closer_farther_samples(partition, np.random.default_rng(5), 10_000)
        assert check.passed, check.witness

    def test_relay_rounds_grow_linearly(self) -> None:
        check = check_relay_scaling()
        assert check.passed, check.detail

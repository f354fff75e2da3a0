"""Broadcasts run end to end through the round engine."""

import pytest

from swampcast.engine import Message, deliveries_for_round, run
from swampcast.geometry import Network, PlacementSpec, RadioParams, generate_placement
from swampcast.lattice import (
    ImpossibleBroadcastError,
    LocalScheme,
    execute_plan,
    grid_network,
    line_lower_bound,
    line_network,
    line_schedule_bound,
    local_scheme_programs,
    plan_algorithm_a,
    plan_algorithm_a2,
    run_algorithm_A,
    run_algorithm_A2,
)
from swampcast.oracle import (
    check_discovery_complete,
    check_spokesman_coverage,
    flooding_baseline,
    oracle_knowledge,
)
from swampcast.partition import make_partition
from swampcast.unknown import run_algorithm_B, run_algorithm_B2, run_procedure_T


class TestAlgorithmA:
    """Known topology on the lattice line."""

    @pytest.mark.parametrize(
        ("n", "r", "s", "source"),
        [
            (100, 3, 1, 0),
            (60, 4, 2, 27),
            (50, 2, 0, 0),
            (120, 5, 1, 60),
            (7, 3, 0, 3),
            (13, 6, 3, 12),
            (2, 1, 0, 1),
        ],
    )
    def test_informs_everyone_within_the_plan(self, n: int, r: int, s: int, source: int) -> None:
        net = line_network(n, r, s)
        plan = plan_algorithm_a(n, r, s, source)
        result = execute_plan(net, plan)
        assert result.informed_final == frozenset(range(n))
        assert result.rounds_used <= plan.bound
        assert result.rounds_used >= flooding_baseline(net, source).eccentricity
        assert result.rounds_used >= line_lower_bound(n, r)

    @pytest.mark.parametrize(("n", "r", "s"), [(100, 3, 1), (200, 4, 0), (90, 6, 2)])
    def test_left_end_source_meets_the_line_schedule(self, n: int, r: int, s: int) -> None:
        plan = plan_algorithm_a(n, r, s)
        assert plan.kind == "schemes"
        assert plan.bound <= line_schedule_bound(n, r, s)

    def test_phase_markers(self) -> None:
        result = run_algorithm_A(100, 3, 1)
        assert result.markers["sparse"] == 0
        assert result.markers["tiles-0"] == 33

    def test_single_node(self) -> None:
        plan = plan_algorithm_a(1, 3, 1)
        assert len(plan) == 0
        assert plan.bound == 0

    @pytest.mark.slow
    @pytest.mark.parametrize(("r", "s"), [(r, s) for r in range(2, 9) for s in range(r - 1)])
    def test_collision_free_within_the_line_schedule(self, r: int, s: int) -> None:
        for n in range(8, 201):
            net = line_network(n, r, s)
            if not net.is_connected():
                continue
            plan = plan_algorithm_a(n, r, s)
            informed = {0}
            for index, group in enumerate(plan.rounds):
                sending = {u: Message.data(net.position(u)) for u in group if u in informed}
                outcome = deliveries_for_round(net, sending)
                assert not outcome.collision_blocked, (n, index)
                informed |= set(outcome.deliveries)
            assert informed == set(range(n)), n
            assert len(plan) <= plan.bound
            if plan.kind == "schemes":
                assert plan.bound <= line_schedule_bound(n, r, s), n


class TestLocalSchemePrograms:
    """A single Local_k* scheme run as node programs."""

    @pytest.mark.parametrize(("k", "mirrored", "n"), [(0, False, 10), (10, True, 11)])
    def test_targets_are_informed(self, k: int, *, mirrored: bool, n: int) -> None:
        scheme = LocalScheme(k, 3, 1, mirrored=mirrored)
        programs = local_scheme_programs(scheme, n)
        result = run(line_network(n, 3, 1), programs, len(scheme.schedule(n)))
        assert set(scheme.targets()) <= result.informed_final
        assert programs[k].informed


class TestAlgorithmA2:
    """Known topology on the 2-D lattice."""

    @pytest.mark.parametrize(
        ("n", "r", "s", "source"),
        [(100, 3, 1, 0), (64, 2, 0, 27), (49, 4, 2, 24), (144, 5, 0, 143)],
    )
    def test_informs_everyone_within_the_plan(self, n: int, r: int, s: int, source: int) -> None:
        net = grid_network(n, r, s)
        plan = plan_algorithm_a2(n, r, s, source)
        result = execute_plan(net, plan)
        assert result.informed_final == frozenset(range(n))
        assert result.rounds_used <= plan.bound
        assert result.rounds_used >= flooding_baseline(net, source).eccentricity

    def test_runner_matches_the_plan(self) -> None:
        result = run_algorithm_A2(100, 3, 1)
        assert result.informed_final == frozenset(range(100))
        assert result.rounds_used <= plan_algorithm_a2(100, 3, 1).bound

    def test_disconnected_row_falls_back_to_relay(self) -> None:
        assert not line_network(4, 4, 2).is_connected()
        plan = plan_algorithm_a2(16, 4, 2)
        assert plan.kind == "relay"
        result = execute_plan(grid_network(16, 4, 2), plan)
        assert result.informed_final == frozenset(range(16))
        assert result.rounds_used <= plan.bound

    def test_disconnected_lattice(self) -> None:
        with pytest.raises(ImpossibleBroadcastError, match="disconnected"):
            plan_algorithm_a2(4, 4, 2)


@pytest.fixture
def chain() -> Network:
    """25 nodes 0.5 apart: links at 0.5 and 1.0."""
    spec = PlacementSpec(kind="chain-line", n=25, spacing=0.5)
    return generate_placement(spec, RadioParams(r=1, s=0.2, gamma=0.5))


class TestAlgorithmB:
    """Unknown topology on the line."""

    @pytest.mark.parametrize("source", [0, 12, 24])
    def test_chain(self, chain: Network, source: int) -> None:
        relay = run_algorithm_B(chain, source)
        result = relay.result
        assert result.informed_final == frozenset(range(chain.n))
        assert result.completion_round is not None
        assert result.rounds_used <= relay.bound
        assert result.markers == {"D*": 0, "T": relay.discovery_rounds}

    def test_random_line(self) -> None:
        spec = PlacementSpec(kind="random-line", length=6, count=12)
        net = generate_placement(spec, RadioParams(r=1, s=0.2, gamma=0.3), seed=7)
        relay = run_algorithm_B(net, 0)
        assert relay.result.informed_final == frozenset(range(net.n))
        assert relay.result.rounds_used <= relay.bound

    @pytest.mark.parametrize("seed", [2, 7])
    def test_swamping_wider_than_homes(self, seed: int) -> None:
        params = RadioParams(r=1, s=0.5, gamma=0.1)
        net = generate_placement(PlacementSpec(kind="random-line", length=8), params, seed)
        relay = run_algorithm_B(net, 0)
        assert relay.result.informed_final == frozenset(range(net.n))
        assert relay.result.rounds_used <= relay.bound
        assert check_discovery_complete(net, make_partition(params, 1), relay.knowledge).passed

    def test_procedure_t_from_oracle_knowledge(self, chain: Network) -> None:
        partition = make_partition(chain.params, 1)
        relay = run_procedure_T(chain, partition, oracle_knowledge(chain, partition), 12)
        assert relay.result.informed_final == frozenset(range(chain.n))
        assert relay.result.rounds_used <= relay.bound
        assert relay.audits

    def test_plane_network_is_rejected(self) -> None:
        net = Network.from_points([[0, 0], [0.5, 0]], RadioParams(r=1, s=0.2, gamma=0.5))
        with pytest.raises(ValueError, match="Expected a 1-D network"):
            run_algorithm_B(net, 0)

    def test_round_cap(self, chain: Network) -> None:
        relay = run_algorithm_B(chain, 0, max_rounds=10)
        assert relay.result.rounds_run == 10
        assert relay.result.completion_round is None


@pytest.mark.slow
class TestAlgorithmB2:
    """Unknown topology in the plane."""

    def test_small_plane(self) -> None:
        spec = PlacementSpec(kind="random-plane", width=4, height=4, count=28)
        net = generate_placement(spec, RadioParams(r=1, s=0.2, gamma=0.5), seed=3)
        relay = run_algorithm_B2(net, 0)
        assert relay.result.informed_final == frozenset(range(net.n))
        assert relay.result.rounds_used <= relay.bound
        assert relay.result.grants

    @pytest.mark.parametrize("seed", range(20))
    def test_seeded_planes(self, seed: int) -> None:
        spec = PlacementSpec(kind="random-plane", width=4, height=4, count=28)
        net = generate_placement(spec, RadioParams(r=1, s=0.2, gamma=0.5), seed)
        relay = run_algorithm_B2(net, 0)
        assert relay.result.informed_final == frozenset(range(net.n))
        assert relay.result.rounds_used <= relay.bound
        assert check_spokesman_coverage(net, relay).passed

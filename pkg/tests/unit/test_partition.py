"""Tests for the region/block/home partitions."""

import math

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from swampcast.geometry import PlacementError, RadioParams
from swampcast.partition import (
    REGION_SIZE,
    LinePartition,
    PartitionLabel,
    PlanePartition,
    make_partition,
)

TOLERANCE = 1e-8

xs = st.floats(min_value=0, max_value=12, allow_nan=False, allow_subnormal=False)


class TestLinePartitionSizes:
    """Block length l, blocks per region mu and homes per block nu."""

    @pytest.mark.parametrize(
        ("s", "gamma", "l", "mu", "nu"),
        [
            (0.2, 0.3, 0.8, 4, 3),
            (0.0, 1.0, 1.0, 3, 1),
            (0.8, 0.5, 0.5, 6, 1),
        ],
    )
    def test_sizes(self, s: float, gamma: float, l: float, mu: int, nu: int) -> None:  # noqa: E741
        partition = LinePartition(s, gamma)
        assert partition.l == pytest.approx(l)
        assert (partition.mu, partition.nu) == (mu, nu)
        assert partition.slots == mu * nu

    def test_labels(self) -> None:
        partition = LinePartition(0.2, 0.3)
        assert partition.label_of((0.0,)) == PartitionLabel((0,), 1, 1)
        assert partition.label_of((0.85,)) == PartitionLabel((0,), 2, 1)
        assert partition.label_of((1.5,)) == PartitionLabel((0,), 2, 3)
        assert partition.label_of((3.1,)) == PartitionLabel((1,), 1, 1)

    def test_last_block_of_region_is_short(self) -> None:
        partition = LinePartition(0.2, 0.3)
        (lo,), (hi,) = partition.block_box((0,), 4)
        assert (lo, hi) == pytest.approx((2.4, 3.0))

    def test_outside_domain(self) -> None:
        with pytest.raises(PlacementError, match="outside"):
            LinePartition(0.2, 0.3).label_of((-0.5,))

    @given(xs)
    def test_point_lies_in_its_home(self, x: float) -> None:
        partition = LinePartition(0.2, 0.3)
        label = partition.label_of((x,))
        (lo,), (hi,) = partition.home_box(label)
        assert lo - TOLERANCE <= x < hi + TOLERANCE
        assert 1 <= label.block <= partition.mu
        assert 1 <= label.home <= partition.nu

    @given(xs, xs)
    def test_points_gamma_apart_never_share_a_label(self, x: float, y: float) -> None:
        partition = LinePartition(0.2, 0.3)
        assume(abs(x - y) >= 0.3 * (1 + 1e-6))
        assert partition.label_of((x,)) != partition.label_of((y,))


class TestPlanePartitionSizes:
    """Block side, block grid and home grid in the plane."""

    def test_gamma_dominated(self) -> None:
        partition = PlanePartition(0.2, 0.5)
        assert partition.l == pytest.approx(0.5 / math.sqrt(2))
        assert partition.blocks_per_side == 9
        assert partition.homes_per_side == 1
        assert (partition.mu, partition.nu) == (81, 1)

    def test_swamping_dominated(self) -> None:
        partition = PlanePartition(0.2, 0.2)
        assert partition.l == pytest.approx(0.8 / (3 * math.sqrt(2)))
        assert partition.blocks_per_side == 16
        assert partition.homes_per_side == 2
        assert partition.slots == 256 * 4

    def test_homes_numbered_row_by_row(self) -> None:
        partition = PlanePartition(0.2, 0.2)
        side = partition.home_side
        label = partition.label_of((1.2 * side, 0.5 * side))
        assert (label.block, label.home) == (1, 2)
        label = partition.label_of((0.5 * side, 1.2 * side))
        assert (label.block, label.home) == (1, 3)
        assert partition.home_cell(3) == (1, 0)

    def test_regions_are_row_col(self) -> None:
        partition = PlanePartition(0.2, 0.5)
        assert partition.label_of((REGION_SIZE + 0.1, 2 * REGION_SIZE + 0.1)).region == (2, 1)

    @given(xs, xs)
    def test_point_lies_in_its_home(self, x: float, y: float) -> None:
        partition = PlanePartition(0.2, 0.2)
        label = partition.label_of((x, y))
        (x0, y0), (x1, y1) = partition.home_box(label)
        assert x0 - TOLERANCE <= x < x1 + TOLERANCE
        assert y0 - TOLERANCE <= y < y1 + TOLERANCE

    @given(xs, xs, xs, xs)
    def test_points_gamma_apart_never_share_a_label(
        self, x: float, y: float, u: float, v: float
    ) -> None:
        partition = PlanePartition(0.2, 0.2)
        assume(math.dist((x, y), (u, v)) >= 0.2 * (1 + 1e-6))
        assert partition.label_of((x, y)) != partition.label_of((u, v))


class TestSlots:
    """Schedule order over (block, home) pairs."""

    def test_schedule_index_round_trips(self) -> None:
        partition = LinePartition(0.2, 0.3)
        slots = list(partition.iter_slots())
        assert len(slots) == partition.slots
        assert slots[:4] == [(1, 1), (1, 2), (1, 3), (2, 1)]
        for index, (block, home) in enumerate(slots):
            assert partition.schedule_index(PartitionLabel((0,), block, home)) == index

    def test_locate_picks_the_nearest_region(self) -> None:
        partition = LinePartition(0.2, 0.3)
        assert partition.locate((4, 2), (3.2,)) == PartitionLabel((0,), 4, 2)
        assert partition.locate((1, 1), (3.2,)) == PartitionLabel((1,), 1, 1)

    def test_make_partition(self) -> None:
        params = RadioParams(r=1, s=0.2, gamma=0.3)
        assert isinstance(make_partition(params, 1), LinePartition)
        assert isinstance(make_partition(params, 2), PlanePartition)

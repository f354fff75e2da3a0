"""Region/block/home partitions of the line and the plane.

The line is cut into regions of length 3, each region into `mu` blocks of
length `l = max(1 - s, gamma)` and each block into `nu` homes of length gamma.
The plane uses 3x3 regions, l x l blocks with `l = max((1-s)/(3*sqrt 2),
gamma/sqrt 2)` and square homes of side gamma/sqrt 2, numbered row by row
from the North-West corner (y grows southwards).

Every segment includes its lower end and excludes its upper end, so each
point gets exactly one label. Regions are indexed from the domain origin:
`(k,)` on the line and `(row, col)` in the plane.
"""

import logging
import math
from abc import ABC, abstractmethod
from collections.abc import Iterator
from dataclasses import dataclass
from functools import cached_property

from swampcast.geometry import PlacementError, Point, RadioParams

logger = logging.getLogger(__name__)

REGION_SIZE = 3.0

_CEIL_GUARD = 1e-12
_FLOOR_GUARD = 1e-9


def ceil_guarded(x: float) -> int:
    """Ceiling that ignores float noise just above an integer."""
    return math.ceil(x - _CEIL_GUARD)


def _floor_index(offset: float, width: float, count: int) -> int:
    """Index of the sub-segment of `width` containing `offset`, clamped."""
    idx = math.floor(offset / width + _FLOOR_GUARD)
    return min(max(idx, 0), count - 1)


@dataclass(frozen=True, order=True)
class PartitionLabel:
    """Where a point sits: region index, block (1..mu) and home (1..nu)."""

    region: tuple[int, ...]
    block: int
    home: int

    @property
    def slot(self) -> tuple[int, int]:
        """The (block, home) pair, the label's identity inside a region."""
        return (self.block, self.home)


class Partition(ABC):
    """Common label arithmetic for the line and plane partitions."""

    dim: int
    l: float  # noqa: E741
    mu: int
    nu: int

    @property
    def slots(self) -> int:
        """Number of (block, home) slots in a region, mu * nu."""
        return self.mu * self.nu

    def schedule_index(self, label: PartitionLabel) -> int:
        """0-based slot of `label` in a block-major sweep over (block, home)."""
        return (label.block - 1) * self.nu + (label.home - 1)

    def slot_of(self, index: int) -> tuple[int, int]:
        """Inverse of `schedule_index` on the (block, home) pair."""
        block, home = divmod(index, self.nu)
        return block + 1, home + 1

    def iter_slots(self) -> Iterator[tuple[int, int]]:
        """All (block, home) pairs in schedule order."""
        for index in range(self.slots):
            yield self.slot_of(index)

    @abstractmethod
    def label_of(self, p: Point) -> PartitionLabel:
        """Label of point `p`."""

    @abstractmethod
    def home_box(self, label: PartitionLabel) -> tuple[Point, Point]:
        """Lower (inclusive) and upper (exclusive) corners of a home."""

    @abstractmethod
    def block_box(self, region: tuple[int, ...], block: int) -> tuple[Point, Point]:
        """Lower (inclusive) and upper (exclusive) corners of a block."""

    @abstractmethod
    def nearby_regions(self, region: tuple[int, ...]) -> list[tuple[int, ...]]:
        """The region itself and the in-domain regions touching it."""

    @property
    @abstractmethod
    def block_diameter(self) -> float:
        """Largest distance between two points of one block."""

    def home_center(self, label: PartitionLabel) -> Point:
        """Centre of the home, clipped to the block."""
        lo, hi = self.home_box(label)
        return tuple((a + b) / 2 for a, b in zip(lo, hi, strict=True))

    def locate(self, slot: tuple[int, int], near: Point) -> PartitionLabel:
        """Label with the given (block, home) whose home centre is nearest `near`."""
        here = self.label_of(near)
        block, home = slot
        candidates = [
            PartitionLabel(region, block, home)
            for region in self.nearby_regions(here.region)
        ]
        return min(candidates, key=lambda lab: math.dist(self.home_center(lab), near))

    def _check_domain(self, p: Point) -> None:
        if len(p) != self.dim or any(c < 0 or not math.isfinite(c) for c in p):
            msg = f"Point {p} is outside the {self.dim}-D partition domain"
            raise PlacementError(msg)


class LinePartition(Partition):
    """Partition P of the half-line x >= 0."""

    dim = 1

    def __init__(self, s: float, gamma: float) -> None:
        """Derive block length and counts from the swamping radius and gamma."""
        self.s = s
        self.gamma = gamma
        self.l = max(1 - s, gamma)
        self.mu = ceil_guarded(REGION_SIZE / self.l)
        self.nu = ceil_guarded(self.l / gamma)
        logger.debug("Line partition l=%.6g mu=%d nu=%d", self.l, self.mu, self.nu)

    def __repr__(self) -> str:
        """Short form with the derived sizes."""
        return f"LinePartition(l={self.l:.6g}, mu={self.mu}, nu={self.nu})"

    def label_of(self, p: Point) -> PartitionLabel:
        """Label of point `p` on the line."""
        self._check_domain(p)
        (x,) = p
        region = math.floor(x / REGION_SIZE + _FLOOR_GUARD)
        region = max(region, 0)
        offset = x - region * REGION_SIZE
        b = _floor_index(offset, self.l, self.mu)
        h = _floor_index(offset - b * self.l, self.gamma, self.nu)
        return PartitionLabel((region,), b + 1, h + 1)

    def block_box(self, region: tuple[int, ...], block: int) -> tuple[Point, Point]:
        """Interval [lo, hi) of a block; the last block of a region may be short."""
        start = region[0] * REGION_SIZE
        lo = start + (block - 1) * self.l
        hi = min(lo + self.l, start + REGION_SIZE)
        return (lo,), (hi,)

    def home_box(self, label: PartitionLabel) -> tuple[Point, Point]:
        """Interval [lo, hi) of a home, clipped to its block."""
        (blo,), (bhi,) = self.block_box(label.region, label.block)
        lo = min(blo + (label.home - 1) * self.gamma, bhi)
        hi = min(lo + self.gamma, bhi)
        return (lo,), (hi,)

    def nearby_regions(self, region: tuple[int, ...]) -> list[tuple[int, ...]]:
        """Left neighbour (if any), the region, right neighbour."""
        k = region[0]
        return [(j,) for j in (k - 1, k, k + 1) if j >= 0]

    @cached_property
    def block_diameter(self) -> float:
        """Block length."""
        return min(self.l, REGION_SIZE)


class PlanePartition(Partition):
    """Partition P2 of the quadrant x >= 0, y >= 0, y pointing South."""

    dim = 2

    def __init__(self, s: float, gamma: float) -> None:
        """Derive block side and counts from the swamping radius and gamma."""
        self.s = s
        self.gamma = gamma
        self.l = max((1 - s) / (3 * math.sqrt(2)), gamma / math.sqrt(2))
        self.blocks_per_side = ceil_guarded(REGION_SIZE / self.l)
        self.home_side = gamma / math.sqrt(2)
        self.homes_per_side = ceil_guarded(math.sqrt(2) * self.l / gamma)
        self.mu = self.blocks_per_side**2
        self.nu = self.homes_per_side**2
        logger.debug(
            "Plane partition l=%.6g mu=%d nu=%d", self.l, self.mu, self.nu
        )

    def __repr__(self) -> str:
        """Short form with the derived sizes."""
        return f"PlanePartition(l={self.l:.6g}, mu={self.mu}, nu={self.nu})"

    def label_of(self, p: Point) -> PartitionLabel:
        """Label of point `p` = (x, y) in the plane."""
        self._check_domain(p)
        x, y = p
        row = max(math.floor(y / REGION_SIZE + _FLOOR_GUARD), 0)
        col = max(math.floor(x / REGION_SIZE + _FLOOR_GUARD), 0)
        oy = y - row * REGION_SIZE
        ox = x - col * REGION_SIZE
        m = self.blocks_per_side
        br = _floor_index(oy, self.l, m)
        bc = _floor_index(ox, self.l, m)
        k = self.homes_per_side
        hr = _floor_index(oy - br * self.l, self.home_side, k)
        hc = _floor_index(ox - bc * self.l, self.home_side, k)
        return PartitionLabel((row, col), br * m + bc + 1, hr * k + hc + 1)

    def block_cell(self, block: int) -> tuple[int, int]:
        """(row, col) of a block inside its region."""
        return divmod(block - 1, self.blocks_per_side)

    def home_cell(self, home: int) -> tuple[int, int]:
        """(row, col) of a home inside its block."""
        return divmod(home - 1, self.homes_per_side)

    def block_box(self, region: tuple[int, ...], block: int) -> tuple[Point, Point]:
        """Corners of a block; blocks on a region's East/South edge may be short."""
        row, col = region
        br, bc = self.block_cell(block)
        x0 = col * REGION_SIZE + bc * self.l
        y0 = row * REGION_SIZE + br * self.l
        x1 = min(x0 + self.l, (col + 1) * REGION_SIZE)
        y1 = min(y0 + self.l, (row + 1) * REGION_SIZE)
        return (x0, y0), (x1, y1)

    def home_box(self, label: PartitionLabel) -> tuple[Point, Point]:
        """Corners of a home, clipped to its block."""
        (bx0, by0), (bx1, by1) = self.block_box(label.region, label.block)
        hr, hc = self.home_cell(label.home)
        x0 = min(bx0 + hc * self.home_side, bx1)
        y0 = min(by0 + hr * self.home_side, by1)
        return (x0, y0), (min(x0 + self.home_side, bx1), min(y0 + self.home_side, by1))

    def nearby_regions(self, region: tuple[int, ...]) -> list[tuple[int, ...]]:
        """The 3x3 neighbourhood of a region, restricted to the quadrant."""
        row, col = region
        return [
            (r, c)
            for r in (row - 1, row, row + 1)
            for c in (col - 1, col, col + 1)
            if r >= 0 and c >= 0
        ]

    @cached_property
    def block_diameter(self) -> float:
        """Diagonal of a full block."""
        return math.sqrt(2) * self.l


def make_partition(params: RadioParams, dim: int) -> Partition:
    """Partition P (dim 1) or P2 (dim 2) for the given radio parameters."""
    if dim == 1:
        return LinePartition(params.s, params.gamma)
    if dim == 2:  # noqa: PLR2004
        return PlanePartition(params.s, params.gamma)
    msg = f"No partition for dimension {dim}"
    raise ValueError(msg)

"""Spokesman election inside a block.

Only a handful of informed nodes per block (the spokesmen) relay the message,
each in its own slot of the block's calendar, so no two nodes of a region
ever transmit in the same round. Elections are pure functions of what a node
knows; the relay programs call them and the oracle audits them.

On the line a block member knows every block-mate (after D*) and the origins
of the data messages it has heard. The ranges of those senders that touch
the block come in two nested families: ranges holding the block's left end
and ranges reaching in from the right. Everyone covered by a family heard its
widest member, so all block-mates elect the same nodes:

* left family: LB (leftmost fully covered home), RR (rightmost fully covered
  home) and RP (the partly covered home at the family's right end);
* right family: RB, LR and LP, mirrored.

In the plane a block-knowledge grant tells every member which homes of its
block are informed. The k x k homes of a block give k rows, k columns and
2k - 1 diagonals in each direction; the extreme informed home of every line
speaks for it, 12k - 4 roles in all.
"""

import logging
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from enum import StrEnum
from typing import NamedTuple

from swampcast.geometry import Point

logger = logging.getLogger(__name__)

Interval = tuple[float, float]


class LineRole(StrEnum):
    """Spokesman roles in a line block."""

    LEFT_BOUNDARY = "LB"
    RIGHT_BOUNDARY = "RB"
    LEFT_RANGE = "LR"
    RIGHT_RANGE = "RR"
    LEFT_POTENTIAL = "LP"
    RIGHT_POTENTIAL = "RP"


LINE_SLOT_ORDER: tuple[LineRole, ...] = (
    LineRole.LEFT_BOUNDARY,
    LineRole.RIGHT_BOUNDARY,
    LineRole.LEFT_RANGE,
    LineRole.RIGHT_RANGE,
    LineRole.LEFT_POTENTIAL,
    LineRole.RIGHT_POTENTIAL,
)


@dataclass(frozen=True)
class RangeSide:
    """One side of a sender's range on the line.

    The right side of a sender at `o` is (o + s, o + r], the left side is
    [o - r, o - s).
    """

    origin: float
    lo: float
    hi: float
    right: bool

    def contains(self, x: float) -> bool:
        """Whether point `x` is in range."""
        if self.right:
            return self.lo < x <= self.hi
        return self.lo <= x < self.hi

    def covers(self, interval: Interval) -> bool:
        """Whether all of [a, b) is in range."""
        a, b = interval
        if self.right:
            return self.lo < a and b <= self.hi
        return self.lo <= a and b <= self.hi

    def meets(self, interval: Interval) -> bool:
        """Whether some point of [a, b) is in range."""
        a, b = interval
        if self.right:
            return self.lo < b and a <= self.hi
        return self.lo < b and a < self.hi


def range_sides(origin: float, s: float, r: float = 1.0) -> tuple[RangeSide, RangeSide]:
    """Left and right side of the range of a sender at `origin`."""
    return (
        RangeSide(origin, origin - r, origin - s, right=False),
        RangeSide(origin, origin + s, origin + r, right=True),
    )


def line_families(
    origins: Iterable[float], block: Interval, s: float, r: float = 1.0
) -> tuple[RangeSide | None, RangeSide | None]:
    """Widest left-anchored and widest right-anchored range touching `block`.

    A range is left-anchored when it holds the block's left end, and
    right-anchored when it touches the block otherwise.
    """
    left: RangeSide | None = None
    right: RangeSide | None = None
    start = block[0]
    for origin in sorted(set(origins)):
        for side in range_sides(origin, s, r):
            if side.contains(start):
                if left is None or (side.hi, side.right) > (left.hi, left.right):
                    left = side
            elif side.meets(block) and (
                right is None or (side.lo, side.right) < (right.lo, right.right)
            ):
                right = side
    return left, right


def elect_line_spokesmen(
    homes: Mapping[int, Interval],
    left: RangeSide | None,
    right: RangeSide | None,
    informed_homes: Iterable[int] = (),
) -> dict[LineRole, int]:
    """Home of every elected line spokesman.

    Args:
        homes: Interval of every occupied home of the block.
        left: Widest left-anchored range, if any.
        right: Widest right-anchored range, if any.
        informed_homes: Occupied homes known to be informed; only these can
            take a potential role.

    """
    informed = set(informed_homes)
    roles: dict[LineRole, int] = {}
    if left is not None:
        full = sorted(h for h, box in homes.items() if left.covers(box))
        if full:
            roles[LineRole.LEFT_BOUNDARY] = full[0]
            roles[LineRole.RIGHT_RANGE] = full[-1]
        partial = [
            h
            for h, box in homes.items()
            if h in informed and left.meets(box) and not left.covers(box)
        ]
        if partial:
            roles[LineRole.RIGHT_POTENTIAL] = max(partial)
    if right is not None:
        full = sorted(h for h, box in homes.items() if right.covers(box))
        if full:
            roles[LineRole.RIGHT_BOUNDARY] = full[-1]
            roles[LineRole.LEFT_RANGE] = full[0]
        partial = [
            h
            for h, box in homes.items()
            if h in informed and right.meets(box) and not right.covers(box)
        ]
        if partial:
            roles[LineRole.LEFT_POTENTIAL] = min(partial)
    return roles


class PlaneRole(NamedTuple):
    """A plane spokesman role: a direction and the row, column or diagonal index."""

    direction: str
    index: int

    def __str__(self) -> str:
        """E.g. `NW_3`."""
        return f"{self.direction}_{self.index}"


def plane_slot_calendar(k: int) -> list[PlaneRole]:
    """Slot order of the 12k - 4 plane roles of a block with k x k homes."""
    calendar: list[PlaneRole] = []
    for i in range(k):
        calendar += [PlaneRole("E", i), PlaneRole("W", i)]
    for i in range(k):
        calendar += [PlaneRole("N", i), PlaneRole("S", i)]
    for i in range(2 * k - 1):
        calendar += [
            PlaneRole("NE", i),
            PlaneRole("SE", i),
            PlaneRole("NW", i),
            PlaneRole("SW", i),
        ]
    return calendar


def elect_plane_spokesmen(informed_homes: Iterable[int], k: int) -> dict[PlaneRole, int]:
    """Home of every elected plane spokesman.

    Homes are numbered 1..k*k row by row from the North-West corner. The
    West/East spokesmen of a row are its extreme informed homes, North/South
    likewise for a column. Diagonal i running North-West to South-East holds
    the homes with col - row + k - 1 == i, the anti-diagonal i those with
    row + col == i; their northern and southern extremes speak for them.
    """
    roles: dict[PlaneRole, int] = {}

    def extremes(lo: str, hi: str, index: int, members: list[tuple[int, int]]) -> None:
        members.sort()
        roles[PlaneRole(lo, index)] = members[0][1]
        roles[PlaneRole(hi, index)] = members[-1][1]

    rows: dict[int, list[tuple[int, int]]] = {}
    cols: dict[int, list[tuple[int, int]]] = {}
    diagonals: dict[int, list[tuple[int, int]]] = {}
    anti: dict[int, list[tuple[int, int]]] = {}
    for home in sorted(set(informed_homes)):
        if not 1 <= home <= k * k:
            msg = f"Home {home} is outside a block of {k}x{k} homes"
            raise ValueError(msg)
        hr, hc = divmod(home - 1, k)
        rows.setdefault(hr, []).append((hc, home))
        cols.setdefault(hc, []).append((hr, home))
        diagonals.setdefault(hc - hr + k - 1, []).append((hr, home))
        anti.setdefault(hr + hc, []).append((hr, home))

    for i, members in rows.items():
        extremes("W", "E", i, members)
    for i, members in cols.items():
        extremes("N", "S", i, members)
    for i, members in diagonals.items():
        extremes("NW", "SE", i, members)
    for i, members in anti.items():
        extremes("NE", "SW", i, members)
    return roles


def check_closer_farther(
    spokesmen: Sequence[tuple[int, Point]], u: Point, p: Point
) -> tuple[int | None, int | None]:
    """A spokesman at most as far from `p` as `u`, and one at least as far.

    Returns:
        The ids of the two witnesses, None where none exists.

    """
    reference = math.dist(u, p)
    closer = [w for w, q in spokesmen if math.dist(q, p) <= reference]
    farther = [w for w, q in spokesmen if math.dist(q, p) >= reference]
    return (closer[0] if closer else None, farther[0] if farther else None)

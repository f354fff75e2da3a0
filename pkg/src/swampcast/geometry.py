"""Node placements and the swamping link relation.

A `Network` is an immutable set of points on the line or in the plane together
with the `RadioParams` that govern which pairs can talk. Two nodes are linked
when their distance is greater than the swamping radius `s` and at most the
communication radius `r`. Transmitters within distance `s` of a listener do
not link to it; they swamp it instead.

Placements are produced by `generate_placement` from a `PlacementSpec`.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Literal, Self

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator, model_validator

logger = logging.getLogger(__name__)

# Generated placements keep every pairwise distance this far from s and r.
BOUNDARY_GUARD = 1e-9

DEFAULT_RETRIES = 200
MAX_SITE_ATTEMPTS = 2_000

Point = tuple[float, ...]

PlacementKind = Literal[
    "lattice-line",
    "lattice-2d",
    "random-line",
    "random-plane",
    "chain-line",
    "explicit",
]


class PlacementError(ValueError):
    """A placement cannot be built, or a node id does not exist."""


class RadioParams(BaseModel):
    """Radio parameters shared by every node.

    Attributes:
        r: Communication radius.
        s: Swamping radius; no link exists at distance <= s.
        gamma: Minimum distance between any two nodes.

    """

    model_config = ConfigDict(frozen=True)

    r: float = Field(default=1.0, ge=0)
    s: float = Field(default=0.0, ge=0)
    gamma: float = Field(default=1.0, gt=0)

    @model_validator(mode="after")
    def check_radii(self) -> Self:
        """Reject a swamping radius that swallows the whole range."""
        if self.s >= self.r:
            msg = f"Swamping radius s={self.s} must be smaller than r={self.r}"
            raise ValueError(msg)
        return self

    @property
    def g(self) -> float:
        """Granularity, the inverse of the minimum separation."""
        return 1 / self.gamma


def pairwise_distances(positions: np.ndarray) -> np.ndarray:
    """Return the (n, n) Euclidean distance matrix of `positions`."""
    diff = positions[:, np.newaxis, :] - positions[np.newaxis, :, :]
    return np.sqrt(np.sum(diff**2, axis=-1))


@dataclass(frozen=True, eq=False)
class Network:
    """Indexed node positions plus the derived link relation.

    Node ids are the row indices of `positions`. Derived matrices are computed
    once on first use.
    """

    params: RadioParams
    positions: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        """Normalise positions to a read-only float array of shape (n, dim)."""
        pos = np.array(self.positions, dtype=float)
        if pos.ndim == 1:
            pos = pos.reshape(-1, 1)
        if pos.ndim != 2 or pos.shape[1] not in (1, 2):  # noqa: PLR2004
            msg = f"Positions must be 1-D or 2-D points, got shape {pos.shape}"
            raise PlacementError(msg)
        if not np.all(np.isfinite(pos)):
            msg = "Positions must be finite"
            raise PlacementError(msg)
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    @classmethod
    def from_points(cls, points: list[Point] | list[float], params: RadioParams) -> Self:
        """Build a network from a list of coordinates."""
        return cls(params=params, positions=np.asarray(points, dtype=float))

    @property
    def n(self) -> int:
        """Number of nodes."""
        return int(self.positions.shape[0])

    @property
    def dim(self) -> int:
        """Dimension of the placement, 1 or 2."""
        return int(self.positions.shape[1])

    def position(self, u: int) -> Point:
        """Coordinates of node `u` as a tuple."""
        self._check_id(u)
        return tuple(float(c) for c in self.positions[u])

    @cached_property
    def distances(self) -> np.ndarray:
        """Pairwise distance matrix."""
        return pairwise_distances(self.positions)

    @cached_property
    def link_matrix(self) -> np.ndarray:
        """Boolean matrix, true where s < dist <= r."""
        d = self.distances
        return (d > self.params.s) & (d <= self.params.r)

    @cached_property
    def swamp_matrix(self) -> np.ndarray:
        """Boolean matrix, true where 0 < dist <= s (a transmitter swamps)."""
        d = self.distances
        return (d > 0) & (d <= self.params.s)

    def _check_id(self, u: int) -> None:
        if not 0 <= u < self.n:
            msg = f"Invalid node id {u} for a network of {self.n} nodes"
            raise PlacementError(msg)

    def distance(self, u: int, v: int) -> float:
        """Distance between nodes `u` and `v`."""
        self._check_id(u)
        self._check_id(v)
        return float(self.distances[u, v])

    def link(self, u: int, v: int) -> bool:
        """Return true iff s < dist(u, v) <= r."""
        self._check_id(u)
        self._check_id(v)
        if u == v:
            msg = f"A node cannot link to itself (node {u})"
            raise PlacementError(msg)
        return bool(self.link_matrix[u, v])

    def neighbors(self, u: int) -> set[int]:
        """Neighbourhood of `u` under the swamping link relation."""
        self._check_id(u)
        return {int(v) for v in np.flatnonzero(self.link_matrix[u])}

    def within(self, u: int, radius: float) -> set[int]:
        """Nodes other than `u` at distance at most `radius`."""
        self._check_id(u)
        d = self.distances[u]
        return {int(v) for v in np.flatnonzero((d <= radius) & (d > 0))}

    @cached_property
    def graph(self) -> nx.Graph:
        """Undirected link graph."""
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        rows, cols = np.nonzero(np.triu(self.link_matrix, k=1))
        g.add_edges_from(zip(rows.tolist(), cols.tolist(), strict=True))
        return g

    def connected_components(self) -> list[frozenset[int]]:
        """Components of the link graph, ordered by their smallest node id."""
        comps = [frozenset(c) for c in nx.connected_components(self.graph)]
        return sorted(comps, key=min)

    def is_connected(self) -> bool:
        """True when the link graph has a single component."""
        return self.n <= 1 or nx.is_connected(self.graph)

    def min_separation(self) -> float:
        """Smallest pairwise distance, infinite for fewer than two nodes."""
        if self.n < 2:  # noqa: PLR2004
            return math.inf
        d = self.distances[np.triu_indices(self.n, k=1)]
        return float(d.min())

    def check_separation(self) -> None:
        """Raise unless every pair is at least gamma apart."""
        sep = self.min_separation()
        if sep < self.params.gamma:
            i, j = np.argwhere(
                (self.distances < self.params.gamma) & ~np.eye(self.n, dtype=bool)
            )[0]
            msg = (
                f"Nodes {i} and {j} are {sep:.6g} apart,"
                f" closer than gamma={self.params.gamma}"
            )
            raise PlacementError(msg)

    def near_boundary(self, guard: float = BOUNDARY_GUARD) -> bool:
        """True if some pairwise distance lies within `guard` of s or r."""
        d = self.distances[np.triu_indices(self.n, k=1)]
        near_s = np.abs(d - self.params.s) < guard
        near_r = np.abs(d - self.params.r) < guard
        return bool(np.any(near_s | near_r))


class PlacementSpec(BaseModel):
    """Description of a placement, as found in the `placement` config section.

    Only the fields relevant to `kind` are read:

    - lattice-line: `n` nodes at 0, 1, ..., n-1.
    - lattice-2d: `n` nodes on a sqrt(n) x sqrt(n) integer grid.
    - random-line: `count` nodes on [0, length].
    - random-plane: `count` nodes on [0, width] x [0, height].
    - chain-line: `n` nodes spaced `spacing` apart (gamma when unset).
    - explicit: `points` given inline, or read from the placement file `path`.
    """

    model_config = ConfigDict(extra="ignore", arbitrary_types_allowed=True)

    kind: PlacementKind
    n: int | None = Field(default=None, ge=1)
    length: float | None = Field(default=None, gt=0)
    width: float | None = Field(default=None, gt=0)
    height: float | None = Field(default=None, gt=0)
    count: int | None = Field(default=None, ge=1)
    spacing: float | None = Field(default=None, gt=0)
    points: list[list[float]] | list[float] | None = None
    path: Path | None = None
    connected: bool = True
    retries: int = Field(default=DEFAULT_RETRIES, ge=1)

    @model_validator(mode="before")
    @classmethod
    def normalize_field_names(cls, data: dict[str, object]) -> dict[str, object]:
        """Accept the common alternative spellings of fields."""
        field_aliases = {
            "type": "kind",
            "nodes": "n",
            "size": "n",
            "L": "length",
            "W": "width",
            "H": "height",
            "require-connected": "connected",
            "require_connected": "connected",
            "coords": "points",
            "file": "path",
        }
        if not isinstance(data, dict):
            return data
        return {field_aliases.get(k, k): v for k, v in data.items()}

    @field_validator("path", mode="after")
    @classmethod
    def resolve_relative_path(cls, v: Path | None, info: ValidationInfo) -> Path | None:
        """Resolve a relative placement file against the config directory."""
        config_dir = info.context.get("config_dir") if info.context else None
        if v is None or v.is_absolute() or not config_dir:
            return v
        return Path(config_dir) / v

    @model_validator(mode="after")
    def check_kind_fields(self) -> Self:
        """Make sure the fields required by `kind` are present."""
        required = {
            "lattice-line": ("n",),
            "lattice-2d": ("n",),
            "random-line": ("length",),
            "random-plane": ("width", "height"),
            "chain-line": ("n",),
            "explicit": ("points",),
        }[self.kind]
        missing = [f for f in required if getattr(self, f) is None]
        if self.kind == "explicit" and self.path is not None:
            missing = []
        if missing:
            msg = f"Placement kind '{self.kind}' needs: {', '.join(missing)}"
            raise ValueError(msg)
        if self.kind == "lattice-2d" and math.isqrt(self.n) ** 2 != self.n:
            msg = f"lattice-2d needs a square node count, got n={self.n}"
            raise ValueError(msg)
        return self


def lattice_line(n: int) -> np.ndarray:
    """Points 0, 1, ..., n-1."""
    return np.arange(n, dtype=float).reshape(-1, 1)


def lattice_2d(n: int) -> np.ndarray:
    """Integer grid; node id y*side + x sits at (x, y)."""
    side = math.isqrt(n)
    ys, xs = np.divmod(np.arange(side * side), side)
    return np.column_stack([xs, ys]).astype(float)


def _default_count(spec: PlacementSpec, gamma: float) -> int:
    """Node count for random placements when the scenario leaves it open."""
    if spec.kind == "random-line":
        return max(1, math.floor(0.6 * spec.length / gamma) + 1)
    cells = (spec.width / gamma) * (spec.height / gamma)
    return max(1, math.floor(0.3 * cells))


def _sequential_sites(
    rng: np.random.Generator,
    count: int,
    bounds: np.ndarray,
    gamma: float,
) -> np.ndarray | None:
    """Draw `count` uniform sites one at a time, rejecting any closer than gamma."""
    dim = bounds.shape[0]
    sites = np.empty((0, dim))
    for _ in range(count):
        for _ in range(MAX_SITE_ATTEMPTS):
            candidate = rng.uniform(0.0, bounds)
            if sites.shape[0] == 0:
                break
            gaps = np.sqrt(np.sum((sites - candidate) ** 2, axis=1))
            if gaps.min() >= gamma:
                break
        else:
            return None
        sites = np.vstack([sites, candidate])
    return sites


def _random_positions(
    spec: PlacementSpec, params: RadioParams, rng: np.random.Generator
) -> np.ndarray | None:
    count = spec.count or _default_count(spec, params.gamma)
    if spec.kind == "random-line":
        bounds = np.array([spec.length])
    else:
        bounds = np.array([spec.width, spec.height])
    sites = _sequential_sites(rng, count, bounds, params.gamma)
    if sites is None:
        return None
    # Sort along the first axis so node ids read left to right.
    order = np.lexsort(sites.T[::-1])
    return sites[order]


def _acceptable(net: Network, *, require_connected: bool) -> bool:
    if net.min_separation() < net.params.gamma or net.near_boundary():
        return False
    return not require_connected or net.is_connected()


def generate_placement(
    spec: PlacementSpec, params: RadioParams, seed: int = 0
) -> Network:
    """Build a network from a placement spec.

    Deterministic placements are returned as is. Random ones are sampled with
    per-site rejection, post-checked for separation and boundary distances,
    and redrawn until connected (if required) or the retry budget runs out.

    Raises:
        PlacementError: the placement is infeasible or violates separation.

    """
    if spec.kind in ("random-line", "random-plane"):
        rng = np.random.default_rng(seed)
        for attempt in range(spec.retries):
            positions = _random_positions(spec, params, rng)
            if positions is None:
                logger.debug("Attempt %d: could not fit all sites", attempt)
                continue
            net = Network(params=params, positions=positions)
            if _acceptable(net, require_connected=spec.connected):
                logger.debug("Placement accepted after %d attempt(s)", attempt + 1)
                return net
            logger.debug("Attempt %d rejected by the post-check", attempt)
        msg = (
            f"No acceptable {spec.kind} placement after {spec.retries} attempts"
            f" (gamma={params.gamma}, connected={spec.connected})"
        )
        raise PlacementError(msg)

    if spec.kind == "lattice-line":
        positions = lattice_line(spec.n)
    elif spec.kind == "lattice-2d":
        positions = lattice_2d(spec.n)
    elif spec.kind == "chain-line":
        spacing = spec.spacing or params.gamma
        positions = (np.arange(spec.n) * spacing).reshape(-1, 1)
    elif spec.points is None:
        msg = f"Explicit placement file {spec.path} has not been read"
        raise PlacementError(msg)
    else:
        positions = np.asarray(spec.points, dtype=float)

    net = Network(params=params, positions=positions)
    net.check_separation()
    return net

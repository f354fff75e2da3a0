"""Scenario data model for swampcast.

`ScenarioSpec` is a pure Pydantic data model of one run: a placement, the
radio parameters, an algorithm and run options. The public `Scenario` class
in `swampcast.api` extends it with operational methods (`network()`,
`run()`, `verify()`). `SweepSpec` expands a base scenario over a grid.

Config files are YAML with the sections `placement`, `radio`, `algorithm`
and `run`. Syntax and validation errors are reported with the line number
of the offending entry.
"""

import copy
import itertools
import logging
import os
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import Any, Literal, Self, TypeVar

import yaml
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    ValidationInfo,
    field_validator,
    model_validator,
)

from swampcast.geometry import PlacementSpec, RadioParams
from swampcast.inout import read_placement
from swampcast.lattice import check_lattice_params

logger = logging.getLogger(__name__)

SEED_ENV_VAR = "SWAMPCAST_SEED"
DEFAULT_HORIZON_MULT = 16

AlgorithmName = Literal["A", "A2", "B", "B2", "D", "Dstar", "flood"]

LINE_KINDS = frozenset({"lattice-line", "random-line", "chain-line"})
PLANE_KINDS = frozenset({"lattice-2d", "random-plane"})


class ScenarioError(ValueError):
    """A scenario or sweep file is unreadable or invalid."""


class AlgorithmSpec(BaseModel):
    """Which algorithm to run, and from which source node."""

    model_config = ConfigDict(extra="ignore")

    name: AlgorithmName
    source: int = Field(default=0, ge=0)

    @model_validator(mode="before")
    @classmethod
    def normalize_field_names(cls, data: object) -> object:
        """Accept a bare algorithm name and alternative spellings."""
        if isinstance(data, str):
            return {"name": data}
        if not isinstance(data, dict):
            return data
        field_aliases = {"id": "name", "algorithm": "name", "source-node": "source"}
        normalized = {field_aliases.get(k, k): v for k, v in data.items()}
        if normalized.get("name") in ("D*", "dstar", "D_star"):
            normalized["name"] = "Dstar"
        return normalized


class RunSpec(BaseModel):
    """Run options: seed, horizon and trace output."""

    model_config = ConfigDict(extra="ignore", arbitrary_types_allowed=True)

    seed: int = 0
    horizon_mult: int = Field(default=DEFAULT_HORIZON_MULT, ge=1)
    max_rounds: int | None = Field(default=None, ge=1)
    trace: Path | None = None

    @model_validator(mode="before")
    @classmethod
    def normalize_field_names(cls, data: object) -> object:
        """Accept hyphenated spellings."""
        if not isinstance(data, dict):
            return data
        field_aliases = {
            "horizon-mult": "horizon_mult",
            "horizon": "horizon_mult",
            "max-rounds": "max_rounds",
            "trace-file": "trace",
        }
        return {field_aliases.get(k, k): v for k, v in data.items()}

    @field_validator("trace", mode="after")
    @classmethod
    def resolve_relative_path(cls, v: Path | None, info: ValidationInfo) -> Path | None:
        """Resolve a relative trace path against the config directory."""
        config_dir = info.context.get("config_dir") if info.context else None
        if v is None or v.is_absolute() or not config_dir:
            return v
        return Path(config_dir) / v


class ScenarioSpec(BaseModel):
    """One simulation run, fully determined by its fields.

    Attributes:
        name: Scenario id, used in traces and CSV rows.
        placement: Where the nodes are.
        radio: r, s and gamma.
        algorithm: Algorithm name and source node.
        run_options: The `run` section of the config file.
        path_self: Config file this scenario came from, if any.

    """

    model_config = ConfigDict(extra="ignore", arbitrary_types_allowed=True)

    name: str = "scenario"
    placement: PlacementSpec
    radio: RadioParams = Field(default_factory=RadioParams)
    algorithm: AlgorithmSpec
    run_options: RunSpec = Field(default_factory=RunSpec)
    path_self: Path | None = None

    @model_validator(mode="before")
    @classmethod
    def normalize_field_names(cls, data: object) -> object:
        """Map config section names onto fields."""
        if not isinstance(data, dict):
            return data
        field_aliases = {
            "run": "run_options",
            "params": "radio",
            "radio-params": "radio",
            "radio_params": "radio",
            "algo": "algorithm",
            "id": "name",
        }
        return {field_aliases.get(k, k): v for k, v in data.items()}

    @field_validator("placement", mode="after")
    @classmethod
    def load_placement_file(cls, v: PlacementSpec) -> PlacementSpec:
        """Read the points of an explicit placement given by file."""
        if v.kind == "explicit" and v.points is None and v.path is not None:
            try:
                points = read_placement(v.path)
            except OSError as exc:
                msg = f"Cannot read placement file {v.path}: {exc.strerror}"
                raise ValueError(msg) from exc
            return v.model_copy(update={"points": points})
        return v

    @property
    def dim(self) -> int:
        """Dimension of the placement."""
        if self.placement.kind in LINE_KINDS:
            return 1
        if self.placement.kind in PLANE_KINDS:
            return 2
        points = self.placement.points or []
        if points and isinstance(points[0], list):
            return len(points[0])
        return 1

    @model_validator(mode="after")
    def check_algorithm_fits(self) -> Self:
        """Reject algorithm, placement and radius combinations that cannot run."""
        name = self.algorithm.name
        r, s = self.radio.r, self.radio.s
        if name in ("A", "A2"):
            if not (float(r).is_integer() and float(s).is_integer()):
                msg = f"Algorithm {name} needs integer r and s, got r={r}, s={s}"
                raise ValueError(msg)
            kind = "lattice-line" if name == "A" else "lattice-2d"
            if self.placement.kind != kind:
                msg = f"Algorithm {name} runs on a {kind} placement, got {self.placement.kind}"
                raise ValueError(msg)
            if self.placement.n is not None and self.algorithm.source >= self.placement.n:
                msg = f"Source {self.algorithm.source} is not one of {self.placement.n} nodes"
                raise ValueError(msg)
            check_lattice_params(int(r), int(s))
            if name == "A2" and r < 2:  # noqa: PLR2004
                msg = f"Algorithm A2 needs r >= 2 on the 2-D lattice, got r={r}"
                raise ValueError(msg)
        if name in ("B", "B2", "D", "Dstar"):
            if r != 1:
                msg = f"Algorithm {name} needs r = 1, got r={r}"
                raise ValueError(msg)
            if self.radio.gamma > 1:
                msg = f"Algorithm {name} needs gamma <= 1, got gamma={self.radio.gamma}"
                raise ValueError(msg)
        expected_dim = {"B": 1, "B2": 2}.get(name)
        if expected_dim is not None and self.dim != expected_dim:
            msg = f"Algorithm {name} needs a {expected_dim}-D placement, got {self.dim}-D"
            raise ValueError(msg)
        return self

    @classmethod
    def from_yaml(cls, config_path: Path | str) -> Self:
        """Load a scenario from a YAML file.

        Relative paths are resolved against the file's directory, the name
        defaults to the file stem, and `SWAMPCAST_SEED` overrides the seed.

        Raises:
            ScenarioError: unreadable file, bad YAML or failed validation.

        """
        _config_path = Path(config_path).resolve()
        text, root = _load_yaml(_config_path)
        cfg = yaml.safe_load(text)
        if not isinstance(cfg, dict):
            msg = f"{_config_path}: expected a mapping of config sections"
            raise ScenarioError(msg)

        cfg["path_self"] = _config_path
        cfg.setdefault("name", _config_path.stem)
        seed = os.environ.get(SEED_ENV_VAR)
        if seed is not None:
            try:
                seed_value = int(seed)
            except ValueError as exc:
                msg = f"{SEED_ENV_VAR} must be an integer, got {seed!r}"
                raise ScenarioError(msg) from exc
            section = "run" if "run" in cfg or "run_options" not in cfg else "run_options"
            cfg[section] = {**(cfg.get(section) or {}), "seed": seed_value}
            logger.info("Seed overridden from %s: %d", SEED_ENV_VAR, seed_value)

        try:
            return cls.model_validate(cfg, context={"config_dir": _config_path.parent})
        except ValidationError as exc:
            raise ScenarioError(_describe(exc, root, _config_path)) from exc

    def to_config(self) -> dict[str, Any]:
        """The scenario as a config mapping, with the file's section names."""
        return {
            "name": self.name,
            "placement": self.placement.model_dump(mode="json", exclude_none=True),
            "radio": self.radio.model_dump(mode="json"),
            "algorithm": self.algorithm.model_dump(mode="json"),
            "run": self.run_options.model_dump(mode="json", exclude_none=True),
        }

    def to_yaml_str(self) -> str:
        """Serialise to YAML."""
        return yaml.safe_dump(self.to_config(), sort_keys=False)

    def to_yaml(self, output_path: Path) -> None:
        """Write the scenario to a YAML file."""
        with output_path.open("w") as f:
            f.write(self.to_yaml_str())


S = TypeVar("S", bound=ScenarioSpec)


class SweepSpec(BaseModel):
    """A base scenario swept over a grid of field values.

    Attributes:
        name: Prefix of the generated scenario ids.
        base: Scenario mapping every grid point starts from.
        grid: Dotted field path -> values; the cartesian product is taken in
            declaration order.
        seeds: Optional seeds, an innermost grid axis over `run.seed`.

    """

    model_config = ConfigDict(extra="ignore", arbitrary_types_allowed=True)

    name: str = "sweep"
    base: dict[str, Any]
    grid: dict[str, list[Any]] = Field(default_factory=dict)
    seeds: list[int] | None = None
    path_self: Path | None = None

    @classmethod
    def from_yaml(cls, config_path: Path | str) -> Self:
        """Load a sweep file.

        Raises:
            ScenarioError: unreadable file, bad YAML or failed validation.

        """
        _config_path = Path(config_path).resolve()
        text, root = _load_yaml(_config_path)
        cfg = yaml.safe_load(text)
        if not isinstance(cfg, dict):
            msg = f"{_config_path}: expected a mapping with `base` and `grid`"
            raise ScenarioError(msg)
        cfg["path_self"] = _config_path
        cfg.setdefault("name", _config_path.stem)
        try:
            return cls.model_validate(cfg)
        except ValidationError as exc:
            raise ScenarioError(_describe(exc, root, _config_path)) from exc

    def points(self) -> list[tuple[str, dict[str, Any]]]:
        """(scenario id, config mapping) of every grid point, invalid ones included."""
        axes = list(self.grid.items())
        if self.seeds:
            axes.append(("run.seed", list(self.seeds)))
        names = [path for path, _ in axes]
        combos = itertools.product(*(values for _, values in axes))
        result = []
        for index, combo in enumerate(combos):
            cfg = copy.deepcopy(self.base)
            for path, value in zip(names, combo, strict=True):
                _set_dotted(cfg, path, value)
            scenario_id = f"{self.name}-{index}"
            cfg["name"] = scenario_id
            result.append((scenario_id, cfg))
        return result

    def expand(self, scenario_cls: type[ScenarioSpec] = ScenarioSpec) -> list[ScenarioSpec]:
        """Valid scenarios of the grid, in grid order; invalid points are skipped."""
        context = {"config_dir": self.path_self.parent} if self.path_self else None
        scenarios = []
        for scenario_id, cfg in self.points():
            try:
                scenarios.append(scenario_cls.model_validate(cfg, context=context))
            except ValidationError as exc:
                first = exc.errors()[0]
                logger.warning(
                    "Skipping %s: %s", scenario_id, first.get("msg", "invalid scenario")
                )
        return scenarios


def _set_dotted(cfg: dict[str, Any], path: str, value: object) -> None:
    keys = path.split(".")
    node = cfg
    for key in keys[:-1]:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            msg = f"Grid path {path!r} runs through a non-mapping at {key!r}"
            raise ScenarioError(msg)
    node[keys[-1]] = value


def _load_yaml(path: Path) -> tuple[str, yaml.Node | None]:
    """Read a YAML file and compose its node tree (for line numbers)."""
    try:
        text = path.read_text()
    except OSError as exc:
        msg = f"Cannot read config file {path}: {exc.strerror}"
        raise ScenarioError(msg) from exc
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        line = f":{mark.line + 1}" if mark is not None else ""
        msg = f"{path}{line}: invalid YAML: {exc.problem}"
        raise ScenarioError(msg) from exc
    except yaml.YAMLError as exc:
        msg = f"{path}: invalid YAML: {exc}"
        raise ScenarioError(msg) from exc
    return text, root


_SECTION_KEYS = {"run_options": ("run", "run_options"), "radio": ("radio", "params")}


def _line_of(root: yaml.Node | None, loc: Sequence[object]) -> int | None:
    """1-based line of the deepest YAML node along a validation error location."""
    node = root
    line = None
    for part in loc:
        if isinstance(node, yaml.MappingNode):
            keys = _SECTION_KEYS.get(str(part), (str(part),))
            match = next(
                ((k, v) for k, v in node.value if getattr(k, "value", None) in keys), None
            )
            if match is None:
                break
            key_node, node = match
            line = key_node.start_mark.line + 1
        elif isinstance(node, yaml.SequenceNode) and isinstance(part, int):
            if part >= len(node.value):
                break
            node = node.value[part]
            line = node.start_mark.line + 1
        else:
            break
    return line


def _describe(exc: ValidationError, root: yaml.Node | None, path: Path) -> str:
    lines = [f"{path}: invalid configuration"]
    for error in exc.errors():
        loc = [p for p in error["loc"] if not (isinstance(p, str) and "[" in p)]
        line = _line_of(root, loc) if root is not None else None
        where = f"line {line}" if line is not None else "top level"
        dotted = ".".join(str(p) for p in loc) or "(scenario)"
        lines.append(f"  {where}: {dotted}: {error['msg']}")
    return "\n".join(lines)


def scenario_from_mapping(
    cfg: Mapping[str, Any],
    config_dir: Path | None = None,
    *,
    model: type[S] = ScenarioSpec,
) -> S:
    """Validate a scenario mapping as `model`, raising `ScenarioError` on failure."""
    context = {"config_dir": config_dir} if config_dir else None
    try:
        return model.model_validate(dict(cfg), context=context)
    except ValidationError as exc:
        msg = "\n".join(
            f"{'.'.join(str(p) for p in e['loc']) or '(scenario)'}: {e['msg']}"
            for e in exc.errors()
        )
        raise ScenarioError(msg) from exc

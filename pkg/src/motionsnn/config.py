"""Run configuration: a flat, JSON-friendly description of one experiment.

A config names the field, the moving-object trajectory, the encoding mode,
and the network sizing knobs. Builders turn it into concrete objects.
"""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .core import ConfigError
from .stimulus import (
    CircleTrajectory,
    EightTrajectory,
    EmitMode,
    EventStream,
    LinearTrajectory,
    Trajectory,
    WaypointTrajectory,
    generate_events,
)
from .topology import (
    CellLayout,
    NetworkGraph,
    NetworkParams,
    assemble_network,
    tessellate,
)

SCHEMA_VERSION = 1

_TRAJECTORY_KINDS = {
    "circle": ("cx", "cy", "radius", "freq_hz"),
    "eight": ("cx", "cy", "ax", "ay", "freq_hz"),
    "linear": ("x0", "y0", "vx", "vy"),
    "waypoints": ("points",),
}

_NETWORK_KEYS = tuple(f.name for f in dataclasses.fields(NetworkParams))


@dataclass(frozen=True)
class RunConfig:
    schema_version: int = SCHEMA_VERSION
    field_width: int = 10
    field_height: int = 11
    trajectory: dict = field(default_factory=lambda: {"kind": "circle", "freq_hz": 0.15})
    t_end_s: float | None = None  # None: auto for periodic kinds
    encoding: str = "onset"
    samples_per_pixel: float = 8.0
    n_per_dir: int = 1
    output_taus_s: tuple[float, ...] = (0.5,)
    grid_dt_s: float = 1e-3
    lateral_inhibition: bool = True
    network: dict = field(default_factory=dict)  # NetworkParams overrides

    def __post_init__(self) -> None:
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {self.schema_version}")
        if self.field_width < 1 or self.field_height < 1:
            raise ConfigError("field dimensions must be positive")
        kind = self.trajectory.get("kind")
        if kind not in _TRAJECTORY_KINDS:
            raise ConfigError(f"unknown trajectory kind {kind!r}")
        extra = set(self.trajectory) - {"kind", *_TRAJECTORY_KINDS[kind]}
        if extra:
            raise ConfigError(f"unknown trajectory keys: {sorted(extra)}")
        if self.encoding not in ("onset", "footprint"):
            raise ConfigError(f"unknown encoding {self.encoding!r}")
        if self.n_per_dir < 1:
            raise ConfigError("n_per_dir must be >= 1")
        if len(self.output_taus_s) != self.n_per_dir:
            raise ConfigError("output_taus_s must have one entry per output rank")
        if not (self.grid_dt_s > 0.0 and math.isfinite(self.grid_dt_s)):
            raise ConfigError("grid_dt_s must be positive")
        bad = set(self.network) - set(_NETWORK_KEYS)
        if bad:
            raise ConfigError(f"unknown network keys: {sorted(bad)}")
        if self.t_end_s is not None and not (self.t_end_s > 0.0 and math.isfinite(self.t_end_s)):
            raise ConfigError("t_end_s must be positive when given")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(data)
        if "output_taus_s" in kwargs:
            kwargs["output_taus_s"] = tuple(float(v) for v in kwargs["output_taus_s"])
        if "trajectory" in kwargs:
            kwargs["trajectory"] = dict(kwargs["trajectory"])
        if "network" in kwargs:
            kwargs["network"] = {k: float(v) for k, v in kwargs["network"].items()}
        return cls(**kwargs)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["output_taus_s"] = list(self.output_taus_s)
        return out

    @classmethod
    def from_json_file(cls, path: str) -> "RunConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config root must be a JSON object")
        return cls.from_dict(data)


def _transient_s(self_taus: tuple[float, ...], period_s: float | None) -> float:
    tau1 = float(np.mean(np.asarray(self_taus)))
    return max(4.0 * tau1, period_s or 0.0)  # 2 * tau2 with tau2 = 2 * tau1


def resolve_t_end(cfg: RunConfig) -> float:
    """Explicit t_end_s wins; periodic kinds default to a settling stretch
    plus three full periods; other kinds require it."""
    kind = cfg.trajectory["kind"]
    if kind == "waypoints":
        points = cfg.trajectory.get("points") or ()
        if not points:
            raise ConfigError("waypoints trajectory needs points")
        return float(points[-1][0])
    if cfg.t_end_s is not None:
        return float(cfg.t_end_s)
    if kind in ("circle", "eight"):
        freq = float(cfg.trajectory.get("freq_hz", 1.0))
        if not (freq > 0.0 and math.isfinite(freq)):
            raise ConfigError("freq_hz must be positive")
        period = 1.0 / freq
        return _transient_s(cfg.output_taus_s, period) + 3.0 * period
    raise ConfigError(f"t_end_s is required for trajectory kind {kind!r}")


def build_trajectory(cfg: RunConfig) -> Trajectory:
    kind = cfg.trajectory["kind"]
    params = {k: v for k, v in cfg.trajectory.items() if k != "kind"}
    t_end = resolve_t_end(cfg)
    common = dict(field_width=cfg.field_width, field_height=cfg.field_height, t_end=t_end)
    if kind == "circle":
        return CircleTrajectory(**common, **{k: float(v) for k, v in params.items()})
    if kind == "eight":
        return EightTrajectory(**common, **{k: float(v) for k, v in params.items()})
    if kind == "linear":
        return LinearTrajectory(**common, **{k: float(v) for k, v in params.items()})
    points = tuple(tuple(float(v) for v in p) for p in params["points"])
    for p in points:
        if len(p) != 3:
            raise ConfigError("each waypoint must be [t, x, y]")
    return WaypointTrajectory(**common, points=points)


def build_layout(cfg: RunConfig) -> CellLayout:
    return tessellate(cfg.field_width, cfg.field_height)


def build_network_params(cfg: RunConfig) -> NetworkParams:
    return dataclasses.replace(NetworkParams(), **cfg.network)


def build_network(cfg: RunConfig, layout: CellLayout | None = None) -> NetworkGraph:
    return assemble_network(
        layout if layout is not None else build_layout(cfg),
        n_per_dir=cfg.n_per_dir,
        output_taus_s=cfg.output_taus_s,
        params=build_network_params(cfg),
        lateral_inhibition=cfg.lateral_inhibition,
    )


def build_stimulus(cfg: RunConfig, traj: Trajectory | None = None) -> EventStream:
    return generate_events(
        traj if traj is not None else build_trajectory(cfg),
        mode=EmitMode(cfg.encoding),
        samples_per_pixel=cfg.samples_per_pixel,
    )


def _parse_scalar(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(data: dict, assignments: list[str]) -> dict:
    """Apply `--set dotted.key=value` pairs onto a config dict. Values parse
    as JSON when possible, otherwise stay strings."""
    out = json.loads(json.dumps(data))  # deep copy, JSON types only
    for item in assignments:
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"bad override {item!r}, expected key=value")
        node = out
        parts = key.split(".")
        for part in parts[:-1]:
            nxt = node.get(part)
            if nxt is None:
                nxt = node[part] = {}
            elif not isinstance(nxt, dict):
                raise ConfigError(f"override {key!r} descends into a non-object")
            node = nxt
        node[parts[-1]] = _parse_scalar(raw)
    return out

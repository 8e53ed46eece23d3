"""Moving-object stimulus: parametric trajectories and their event encoding.

The object is a 3x3 pixel block centered on the rounded (half-up) continuous
position. A vision-sensor-style encoder emits one event per pixel that becomes
covered when the rounded position changes ("onset" mode) or re-emits the whole
footprint at every change ("footprint" mode). The y axis points upward.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .core import ConfigError, Direction, DomainError, Event, EventStream

# Change instants are located to TIME_TOL and stamped on a 1 ns grid, which
# makes the emitted stream independent of the scan density.
TIME_TOL = 1e-10
TIME_QUANTUM = 1e-9


def round_half_up(v: np.ndarray | float) -> np.ndarray | float:
    return np.floor(v + 0.5)


def snap_time(t: float) -> float:
    return round(t / TIME_QUANTUM) * TIME_QUANTUM


class EmitMode(Enum):
    ONSET = "onset"
    FOOTPRINT = "footprint"


@dataclass(frozen=True)
class Trajectory:
    """Continuous object path on a bounded field, defined for t in [0, t_end]."""

    field_width: int
    field_height: int
    t_end: float

    def __post_init__(self) -> None:
        if self.t_end < 0.0 or not math.isfinite(self.t_end):
            raise ConfigError("t_end must be finite and >= 0")
        x_lo, x_hi, y_lo, y_hi = self.extent()
        # The 3x3 footprint around the rounded center must stay in-field.
        if not (x_lo >= 0.5 and x_hi < self.field_width - 1.5):
            raise DomainError(
                f"x range [{x_lo}, {x_hi}] leaves the {self.field_width}x"
                f"{self.field_height} field"
            )
        if not (y_lo >= 0.5 and y_hi < self.field_height - 1.5):
            raise DomainError(
                f"y range [{y_lo}, {y_hi}] leaves the {self.field_width}x"
                f"{self.field_height} field"
            )

    # Subclasses implement vectorized kinematics; scalar queries reuse them so
    # every caller sees bit-identical values.
    def positions(self, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def velocities(self, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def extent(self) -> tuple[float, float, float, float]:
        """(x_min, x_max, y_min, y_max) over the whole run."""
        raise NotImplementedError

    def speed_bound(self) -> tuple[float, float]:
        """Upper bounds on |dx/dt| and |dy/dt| (px/s)."""
        raise NotImplementedError

    @property
    def period_s(self) -> float | None:
        return None

    def position(self, t: float) -> tuple[float, float]:
        xs, ys = self.positions(np.asarray([t], dtype=np.float64))
        return float(xs[0]), float(ys[0])

    def velocity_xy(self, t: float) -> tuple[float, float]:
        vxs, vys = self.velocities(np.asarray([t], dtype=np.float64))
        return float(vxs[0]), float(vys[0])


@dataclass(frozen=True)
class CircleTrajectory(Trajectory):
    """Counterclockwise circle starting at the leftmost point moving upward:
    x = cx - r cos(2 pi f t), y = cy + r sin(2 pi f t)."""

    cx: float = 4.5
    cy: float = 5.0
    radius: float = 3.0
    freq_hz: float = 1.0

    def __post_init__(self) -> None:
        if not (self.freq_hz > 0.0 and math.isfinite(self.freq_hz)):
            raise ConfigError("freq_hz must be positive")
        if not (self.radius > 0.0):
            raise ConfigError("radius must be positive")
        super().__post_init__()

    def positions(self, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        w = 2.0 * math.pi * self.freq_hz
        return self.cx - self.radius * np.cos(w * ts), self.cy + self.radius * np.sin(w * ts)

    def velocities(self, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        w = 2.0 * math.pi * self.freq_hz
        return self.radius * w * np.sin(w * ts), self.radius * w * np.cos(w * ts)

    def extent(self) -> tuple[float, float, float, float]:
        return (
            self.cx - self.radius,
            self.cx + self.radius,
            self.cy - self.radius,
            self.cy + self.radius,
        )

    def speed_bound(self) -> tuple[float, float]:
        v = 2.0 * math.pi * self.freq_hz * self.radius
        return v, v

    @property
    def period_s(self) -> float:
        return 1.0 / self.freq_hz


@dataclass(frozen=True)
class EightTrajectory(Trajectory):
    """Figure-eight: two horizontal oscillations per vertical one.
    x = cx + ax sin(4 pi f t), y = cy + ay sin(2 pi f t)."""

    cx: float = 4.5
    cy: float = 5.0
    ax: float = 3.0
    ay: float = 4.0
    freq_hz: float = 1.0

    def __post_init__(self) -> None:
        if not (self.freq_hz > 0.0 and math.isfinite(self.freq_hz)):
            raise ConfigError("freq_hz must be positive")
        if not (self.ax > 0.0 and self.ay > 0.0):
            raise ConfigError("amplitudes must be positive")
        super().__post_init__()

    def positions(self, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        w = 2.0 * math.pi * self.freq_hz
        return self.cx + self.ax * np.sin(2.0 * w * ts), self.cy + self.ay * np.sin(w * ts)

    def velocities(self, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        w = 2.0 * math.pi * self.freq_hz
        return 2.0 * w * self.ax * np.cos(2.0 * w * ts), w * self.ay * np.cos(w * ts)

    def extent(self) -> tuple[float, float, float, float]:
        return self.cx - self.ax, self.cx + self.ax, self.cy - self.ay, self.cy + self.ay

    def speed_bound(self) -> tuple[float, float]:
        w = 2.0 * math.pi * self.freq_hz
        return 2.0 * w * self.ax, w * self.ay

    @property
    def period_s(self) -> float:
        return 1.0 / self.freq_hz


@dataclass(frozen=True)
class LinearTrajectory(Trajectory):
    """Constant-velocity segment from (x0, y0)."""

    x0: float = 1.5
    y0: float = 5.0
    vx: float = 10.0
    vy: float = 0.0

    def positions(self, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return self.x0 + self.vx * ts, self.y0 + self.vy * ts

    def velocities(self, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        ones = np.ones_like(ts)
        return self.vx * ones, self.vy * ones

    def extent(self) -> tuple[float, float, float, float]:
        x1, y1 = self.x0 + self.vx * self.t_end, self.y0 + self.vy * self.t_end
        return min(self.x0, x1), max(self.x0, x1), min(self.y0, y1), max(self.y0, y1)

    def speed_bound(self) -> tuple[float, float]:
        return abs(self.vx), abs(self.vy)


@dataclass(frozen=True)
class WaypointTrajectory(Trajectory):
    """Piecewise-linear path through timed waypoints (t, x, y), t ascending from 0."""

    points: tuple[tuple[float, float, float], ...] = ()

    def __post_init__(self) -> None:
        if len(self.points) < 1:
            raise ConfigError("waypoints must contain at least one point")
        if self.points[0][0] != 0.0:
            raise ConfigError("first waypoint must be at t = 0")
        for (ta, _, _), (tb, _, _) in zip(self.points, self.points[1:]):
            if tb <= ta:
                raise ConfigError("waypoint times must be strictly increasing")
        object.__setattr__(self, "t_end", self.points[-1][0])
        super().__post_init__()

    def positions(self, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        knots = np.asarray([p[0] for p in self.points])
        xs = np.asarray([p[1] for p in self.points])
        ys = np.asarray([p[2] for p in self.points])
        return np.interp(ts, knots, xs), np.interp(ts, knots, ys)

    def velocities(self, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        # Right-sided derivative; constant within each segment.
        knots = np.asarray([p[0] for p in self.points])
        seg = np.clip(np.searchsorted(knots, ts, side="right") - 1, 0, max(len(knots) - 2, 0))
        vx = np.zeros_like(ts)
        vy = np.zeros_like(ts)
        if len(self.points) > 1:
            dt = np.diff(knots)
            dx = np.diff(np.asarray([p[1] for p in self.points])) / dt
            dy = np.diff(np.asarray([p[2] for p in self.points])) / dt
            vx, vy = dx[seg], dy[seg]
        return vx, vy

    def extent(self) -> tuple[float, float, float, float]:
        xs = [p[1] for p in self.points]
        ys = [p[2] for p in self.points]
        return min(xs), max(xs), min(ys), max(ys)

    def speed_bound(self) -> tuple[float, float]:
        if len(self.points) < 2:
            return 0.0, 0.0
        vx = vy = 0.0
        for (ta, xa, ya), (tb, xb, yb) in zip(self.points, self.points[1:]):
            vx = max(vx, abs((xb - xa) / (tb - ta)))
            vy = max(vy, abs((yb - ya) / (tb - ta)))
        return vx, vy


@dataclass(frozen=True)
class ChannelVelocity:
    """Signed velocity seen by one direction channel, with its run maximum."""

    channel: Direction
    p_dot: float
    p_dot_max: float


def channel_velocity(traj: Trajectory, channel: Direction, t: float) -> ChannelVelocity:
    """Project the object velocity onto a channel: UP reads +dy/dt, DOWN -dy/dt,
    RIGHT +dx/dt, LEFT -dx/dt."""
    vx, vy = traj.velocity_xy(t)
    vx_max, vy_max = traj.speed_bound()
    if channel is Direction.UP:
        return ChannelVelocity(channel, vy, vy_max)
    if channel is Direction.DOWN:
        return ChannelVelocity(channel, -vy, vy_max)
    if channel is Direction.RIGHT:
        return ChannelVelocity(channel, vx, vx_max)
    return ChannelVelocity(channel, -vx, vx_max)


def channel_velocities(
    traj: Trajectory, channel: Direction, ts: np.ndarray
) -> tuple[np.ndarray, float]:
    vxs, vys = traj.velocities(ts)
    vx_max, vy_max = traj.speed_bound()
    if channel is Direction.UP:
        return vys, vy_max
    if channel is Direction.DOWN:
        return -vys, vy_max
    if channel is Direction.RIGHT:
        return vxs, vx_max
    return -vxs, vx_max


def footprint(px: int, py: int) -> tuple[tuple[int, int], ...]:
    """The 9 pixels of the 3x3 block centered on (px, py)."""
    return tuple((px + dx, py + dy) for dy in (-1, 0, 1) for dx in (-1, 0, 1))


def _rounded_position(traj: Trajectory, t: float) -> tuple[int, int]:
    x, y = traj.position(t)
    return int(round_half_up(x)), int(round_half_up(y))


def _pin_to_grid(
    traj: Trajectory, t0: float, t1: float, p0: tuple[int, int]
) -> float:
    # First nanosecond tick at or after the change bracketed by (t0, t1]:
    # a function of the trajectory alone, so scan density cannot move it.
    lo = int(math.floor(t0 / TIME_QUANTUM))
    hi = int(math.ceil(t1 / TIME_QUANTUM))
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _rounded_position(traj, mid * TIME_QUANTUM) == p0:
            lo = mid
        else:
            hi = mid
    return hi * TIME_QUANTUM


def _locate_changes(
    traj: Trajectory,
    t0: float,
    t1: float,
    p0: tuple[int, int],
    p1: tuple[int, int],
    out: list[tuple[float, float, tuple[int, int], tuple[int, int]]],
) -> None:
    # Bisect until each change instant is isolated to TIME_TOL, keeping the
    # position on either side of the bracket.
    if t1 - t0 <= TIME_TOL:
        out.append((t0, t1, p0, p1))
        return
    tm = 0.5 * (t0 + t1)
    pm = _rounded_position(traj, tm)
    if pm != p0:
        _locate_changes(traj, t0, tm, p0, pm, out)
    if p1 != pm:
        _locate_changes(traj, tm, t1, pm, p1, out)


def generate_events(
    traj: Trajectory,
    mode: EmitMode | str = EmitMode.ONSET,
    samples_per_pixel: float = 8.0,
    oversample: int = 1,
) -> EventStream:
    """Encode a trajectory as stimulus events.

    The path is scanned densely enough that the rounded center moves well
    under one pixel per sample; every position change is then located by
    bisection and stamped on a nanosecond grid, so oversampling (any integer
    factor) leaves the stream unchanged. At t = 0 and, in footprint mode, at
    every change, all 9 covered pixels emit; in onset mode only pixels that
    just became covered emit.
    """
    mode = EmitMode(mode)
    if oversample < 1:
        raise ConfigError("oversample must be >= 1")
    if samples_per_pixel <= 0.0:
        raise ConfigError("samples_per_pixel must be positive")

    vx_max, vy_max = traj.speed_bound()
    vmax = max(vx_max, vy_max)
    n = max(16, int(math.ceil(traj.t_end * vmax * samples_per_pixel)))
    n += n % 2  # even count keeps shared midpoints across scan densities
    n *= oversample

    ts = (np.arange(n + 1, dtype=np.float64) * traj.t_end) / n if traj.t_end > 0 else np.zeros(1)
    xs, ys = traj.positions(ts)
    pxs = round_half_up(xs).astype(np.int64)
    pys = round_half_up(ys).astype(np.int64)

    changes: list[tuple[float, float, tuple[int, int], tuple[int, int]]] = []
    moved = np.nonzero((pxs[1:] != pxs[:-1]) | (pys[1:] != pys[:-1]))[0]
    for i in moved:
        _locate_changes(
            traj,
            float(ts[i]),
            float(ts[i + 1]),
            (int(pxs[i]), int(pys[i])),
            (int(pxs[i + 1]), int(pys[i + 1])),
            changes,
        )

    events: list[Event] = []
    current = (int(pxs[0]), int(pys[0]))
    covered = set(footprint(*current))
    for x, y in sorted(covered, key=lambda p: (p[1], p[0])):
        events.append(Event(x, y, 0.0))
    for t_lo, t_hi, before, pos in changes:
        t_snap = _pin_to_grid(traj, t_lo, t_hi, before)
        new_cover = set(footprint(*pos))
        fresh = new_cover if mode is EmitMode.FOOTPRINT else new_cover - covered
        for x, y in sorted(fresh, key=lambda p: (p[1], p[0])):
            events.append(Event(x, y, t_snap))
        covered = new_cover
        current = pos

    return EventStream.from_events(events, traj.field_width, traj.field_height)

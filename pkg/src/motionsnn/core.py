"""Shared domain types: stimulus events, spike trains, neuron and synapse parameters.

Times are seconds, positions are integer pixel coordinates with y increasing
upward, membrane potentials are dimensionless (rest = 0).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np


class MotionSnnError(Exception):
    """Base for every error this package raises on purpose."""


class ConfigError(MotionSnnError, ValueError):
    """Invalid configuration or parameter value (CLI exit code 2)."""


class DomainError(MotionSnnError, ValueError):
    """Request outside the model's domain, e.g. out-of-field trajectory (exit code 3)."""


class NumericFault(MotionSnnError, ArithmeticError):
    """Non-finite state or impossible numeric request (exit code 4)."""


class Direction(Enum):
    UP = "up"
    DOWN = "down"
    LEFT = "left"
    RIGHT = "right"

    @property
    def opposite(self) -> "Direction":
        return _OPPOSITE[self]


_OPPOSITE = {
    Direction.UP: Direction.DOWN,
    Direction.DOWN: Direction.UP,
    Direction.LEFT: Direction.RIGHT,
    Direction.RIGHT: Direction.LEFT,
}

# Fixed ordering used for neuron ids, CSV columns and JSON exports.
DIRECTION_ORDER: tuple[Direction, ...] = (
    Direction.UP,
    Direction.DOWN,
    Direction.LEFT,
    Direction.RIGHT,
)


class Role(Enum):
    """Position of a pixel inside its plus-shaped unit cell."""

    CENTER = "center"
    UP = "up"
    DOWN = "down"
    LEFT = "left"
    RIGHT = "right"

    @property
    def direction(self) -> Direction:
        if self is Role.CENTER:
            raise ValueError("center pixel has no direction")
        return Direction(self.value)


ROLE_ORDER: tuple[Role, ...] = (Role.CENTER, Role.UP, Role.DOWN, Role.LEFT, Role.RIGHT)


def role_of(direction: Direction) -> Role:
    return Role(direction.value)


@dataclass(frozen=True)
class Event:
    """One stimulus spike: pixel (x, y) active at time t (seconds)."""

    x: int
    y: int
    t: float


@dataclass(frozen=True)
class EventStream:
    """Sorted stimulus events on a bounded pixel field.

    Events are ordered by (t, y, x); duplicates are preserved.
    """

    field_width: int
    field_height: int
    events: tuple[Event, ...]

    def __post_init__(self) -> None:
        if self.field_width < 1 or self.field_height < 1:
            raise ConfigError("field dimensions must be positive")
        prev = None
        for ev in self.events:
            if not (0 <= ev.x < self.field_width and 0 <= ev.y < self.field_height):
                raise ConfigError(f"event pixel ({ev.x}, {ev.y}) outside field")
            if ev.t < 0.0 or not math.isfinite(ev.t):
                raise ConfigError(f"event time {ev.t!r} must be finite and >= 0")
            key = (ev.t, ev.y, ev.x)
            if prev is not None and key < prev:
                raise ConfigError("events not sorted by (t, y, x)")
            prev = key

    @classmethod
    def from_events(cls, events: Iterable[Event], field_width: int, field_height: int) -> "EventStream":
        ordered = tuple(sorted(events, key=lambda e: (e.t, e.y, e.x)))
        return cls(field_width, field_height, ordered)

    def __len__(self) -> int:
        return len(self.events)


@dataclass(frozen=True)
class LifParams:
    """Leaky integrate-and-fire constants.

    tau_m: membrane time constant (s); v_th: firing threshold; v_reset:
    post-spike potential; v_floor: lower clamp on the potential; t_pw:
    output pulse width (s); t_ref: refractory period (s), >= t_pw;
    d_out: delay from threshold crossing to the emitted spike (s).
    """

    tau_m: float
    v_th: float
    v_reset: float = 0.0
    v_floor: float | None = None
    t_pw: float = 1e-4
    t_ref: float = 2e-4
    d_out: float = 1e-4

    def __post_init__(self) -> None:
        if self.v_floor is None:
            object.__setattr__(self, "v_floor", -2.0 * self.v_th)
        if not (self.tau_m > 0.0 and math.isfinite(self.tau_m)):
            raise ConfigError("tau_m must be positive and finite")
        if not (self.t_pw > 0.0):
            raise ConfigError("t_pw must be positive")
        if self.t_ref < self.t_pw:
            raise ConfigError("t_ref must be >= t_pw")
        if self.d_out < 0.0:
            raise ConfigError("d_out must be >= 0")
        if not (self.v_th > self.v_reset >= self.v_floor):
            raise ConfigError("require v_th > v_reset >= v_floor")


class Sign(Enum):
    EXCITATORY = "exc"
    INHIBITORY = "inh"


@dataclass(frozen=True)
class Synapse:
    """Directed connection pre -> post with a non-negative weight and a sign."""

    pre: int
    post: int
    weight: float
    sign: Sign

    def __post_init__(self) -> None:
        if self.weight < 0.0 or not math.isfinite(self.weight):
            raise ConfigError("synapse weight must be finite and >= 0")

    @property
    def signed_weight(self) -> float:
        return self.weight if self.sign is Sign.EXCITATORY else -self.weight


class DeviceState(Enum):
    ON = "on"
    OFF = "off"


@dataclass(frozen=True)
class SynapseDevice:
    """Behavioral two-state resistive device: only the ON/OFF conductance ratio
    survives into the network; no switching dynamics are modeled."""

    g_on: float = 180e-9
    g_off: float = 100e-12
    state: DeviceState = DeviceState.ON

    def __post_init__(self) -> None:
        if not (self.g_on > 0.0 and self.g_off > 0.0):
            raise ConfigError("device conductances must be positive")
        if self.g_off >= self.g_on:
            raise ConfigError("require g_off < g_on")


def weight_from_device(device: SynapseDevice, w_on: float) -> float:
    """Map a device state to a synaptic weight: w_on when ON, scaled by the
    conductance ratio g_off/g_on when OFF."""
    if not (w_on > 0.0 and math.isfinite(w_on)):
        raise ConfigError("w_on must be positive and finite")
    if device.state is DeviceState.ON:
        return w_on
    return w_on * (device.g_off / device.g_on)


@dataclass(frozen=True)
class SpikeRecord:
    """Per-neuron spike times (s), each strictly increasing."""

    spike_times: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        for n, train in enumerate(self.spike_times):
            for a, b in zip(train, train[1:]):
                if b <= a:
                    raise ConfigError(f"neuron {n}: spike times not strictly increasing")

    @property
    def n_neurons(self) -> int:
        return len(self.spike_times)

    def counts(self) -> tuple[int, ...]:
        return tuple(len(t) for t in self.spike_times)

    def total(self) -> int:
        return sum(len(t) for t in self.spike_times)


@dataclass(frozen=True)
class RateSeries:
    """Uniformly sampled rate signal: value k is at time t0 + k*dt."""

    t0: float
    dt: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise ConfigError("dt must be positive and finite")
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1:
            raise ConfigError("values must be one-dimensional")
        object.__setattr__(self, "values", vals)

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self.values))

    def __len__(self) -> int:
        return len(self.values)

    def same_grid(self, other: "RateSeries") -> bool:
        return (
            self.t0 == other.t0
            and self.dt == other.dt
            and len(self.values) == len(other.values)
        )


def fmt_float(v: float) -> str:
    """Canonical float formatting for exports: 9 significant digits."""
    if v == 0.0:
        v = 0.0  # normalize -0.0
    return format(v, ".9g")


def write_events_csv(stream: EventStream, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "t_s"])
        for ev in stream.events:
            writer.writerow([ev.x, ev.y, fmt_float(ev.t)])


def read_events_csv(path: str, field_width: int, field_height: int) -> EventStream:
    events = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["x", "y", "t_s"]:
            raise ConfigError(f"unexpected events header: {header}")
        for row in reader:
            if not row:
                continue
            if len(row) != 3:
                raise ConfigError(f"malformed events row: {row}")
            events.append(Event(int(row[0]), int(row[1]), float(row[2])))
    return EventStream.from_events(events, field_width, field_height)


def write_spikes_csv(record: SpikeRecord, path: str) -> None:
    rows = sorted(
        ((t, n) for n, train in enumerate(record.spike_times) for t in train)
    )
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["neuron_id", "t_s"])
        for t, n in rows:
            writer.writerow([n, fmt_float(t)])


def read_spikes_csv(path: str, n_neurons: int) -> SpikeRecord:
    trains: list[list[float]] = [[] for _ in range(n_neurons)]
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["neuron_id", "t_s"]:
            raise ConfigError(f"unexpected spikes header: {header}")
        for row in reader:
            if not row:
                continue
            n = int(row[0])
            if not (0 <= n < n_neurons):
                raise ConfigError(f"neuron id {n} out of range")
            trains[n].append(float(row[1]))
    for train in trains:
        train.sort()
    return SpikeRecord(tuple(tuple(t) for t in trains))


def merge_trains(trains: Iterable[Sequence[float]]) -> tuple[float, ...]:
    """Pool spike trains into one sorted train; duplicate times are kept."""
    merged: list[float] = []
    for train in trains:
        merged.extend(train)
    merged.sort()
    return tuple(merged)

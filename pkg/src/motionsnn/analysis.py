"""Rate estimation and scoring of simulated runs.

Spike trains are turned into smooth rates with a causal difference-of-
exponentials kernel of unit area; measured rates are compared against the
velocity-derived ideal response channel by channel.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.signal import lfilter

from .core import (
    ConfigError,
    DIRECTION_ORDER,
    Direction,
    DomainError,
    RateSeries,
    SpikeRecord,
    merge_trains,
)
from .stimulus import Trajectory, channel_velocities


@dataclass(frozen=True)
class FilterParams:
    """Kernel h(t) = lam * (exp(-t/tau1) - exp(-t/tau2)) for t >= 0.

    tau2 is pinned at twice tau1; lam = 1/(tau1 - tau2) is negative, which
    flips the (negative) bracket so h stays non-negative with unit area.
    """

    tau1: float
    tau2: float

    def __post_init__(self) -> None:
        if not (self.tau1 > 0.0 and math.isfinite(self.tau1)):
            raise ConfigError("tau1 must be positive and finite")
        if self.tau2 != 2.0 * self.tau1:
            raise ConfigError("tau2 must equal 2 * tau1")

    @classmethod
    def from_output_taus(cls, taus: Sequence[float]) -> "FilterParams":
        if not taus:
            raise ConfigError("need at least one output time constant")
        tau1 = float(np.mean(np.asarray(taus, dtype=np.float64)))
        return cls(tau1, 2.0 * tau1)

    @property
    def lam(self) -> float:
        return 1.0 / (self.tau1 - self.tau2)

    @property
    def peak_time_s(self) -> float:
        # argmax of h: tau1*tau2/(tau2-tau1) * ln(tau2/tau1) = 2*tau1*ln 2
        return self.tau1 * self.tau2 / (self.tau2 - self.tau1) * math.log(self.tau2 / self.tau1)

    def kernel(self, t: np.ndarray | float) -> np.ndarray | float:
        t = np.asarray(t, dtype=np.float64)
        h = self.lam * (np.exp(-t / self.tau1) - np.exp(-t / self.tau2))
        return np.where(t >= 0.0, h, 0.0)


@dataclass(frozen=True)
class RateGrid:
    t0: float
    dt: float
    n: int

    def __post_init__(self) -> None:
        if not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise ConfigError("grid dt must be positive")
        if self.n < 1:
            raise ConfigError("grid needs at least one sample")

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n)


def pool_group(record: SpikeRecord, direction: Direction, n_per_dir: int) -> tuple[float, ...]:
    """Merge the spike trains of one direction's output group.

    Relies on the id convention: outputs are the last 4 * n_per_dir neurons,
    grouped by direction in DIRECTION_ORDER, ranks contiguous.
    """
    if n_per_dir < 1 or record.n_neurons < 4 * n_per_dir:
        raise ConfigError("record too small for the requested output group")
    base = record.n_neurons - 4 * n_per_dir
    start = base + DIRECTION_ORDER.index(direction) * n_per_dir
    return merge_trains(record.spike_times[start + k] for k in range(n_per_dir))


def firing_rate(train: Sequence[float], fp: FilterParams, grid: RateGrid) -> RateSeries:
    """Causal rate estimate: the kernel summed over all past spikes, evaluated
    in closed form at every grid point."""
    times = grid.times()
    spikes = np.asarray(sorted(train), dtype=np.float64)
    spikes = spikes[spikes <= times[-1]]
    if len(spikes) == 0:
        return RateSeries(grid.t0, grid.dt, np.zeros(grid.n))
    bins = np.searchsorted(times, spikes, side="left")
    # Per-step recursion A_k = A_{k-1} * exp(-dt/tau) + (new spikes decayed to t_k)
    values = np.zeros(grid.n)
    for tau, sign in ((fp.tau1, 1.0), (fp.tau2, -1.0)):
        c = np.zeros(grid.n)
        np.add.at(c, bins, np.exp(-(times[bins] - spikes) / tau))
        acc = lfilter([1.0], [1.0, -math.exp(-grid.dt / tau)], c)
        values += sign * acc
    values *= fp.lam
    np.maximum(values, 0.0, out=values)  # clip float dust below zero
    return RateSeries(grid.t0, grid.dt, values)


def ideal_rates(
    traj: Trajectory, f_max_hz: float, grid: RateGrid
) -> dict[Direction, RateSeries]:
    """Velocity-proportional target rate per channel:
    f = (f_max / 2) * |p_dot / p_dot_max + 1|; motionless axes hold f_max / 2."""
    if not (f_max_hz > 0.0 and math.isfinite(f_max_hz)):
        raise ConfigError("f_max_hz must be positive")
    times = grid.times()
    out: dict[Direction, RateSeries] = {}
    for d in DIRECTION_ORDER:
        p_dot, p_dot_max = channel_velocities(traj, d, times)
        if p_dot_max == 0.0:
            values = np.full(grid.n, f_max_hz / 2.0)
        else:
            values = (f_max_hz / 2.0) * np.abs(p_dot / p_dot_max + 1.0)
        out[d] = RateSeries(grid.t0, grid.dt, values)
    return out


def calibrate_f_max(measured: Mapping[Direction, RateSeries]) -> float:
    """Peak measured rate across all channels; the ideal curves are scaled to it."""
    peak = max(float(np.max(series.values)) for series in measured.values())
    if peak <= 0.0:
        raise DomainError("cannot calibrate f_max: no measured activity")
    return peak


@dataclass(frozen=True)
class AccuracyScore:
    raw: float
    clamped: float
    per_channel: dict[Direction, float]


def accuracy(
    ideal: Mapping[Direction, RateSeries], measured: Mapping[Direction, RateSeries]
) -> AccuracyScore:
    """Mean over channels of 1 - |ideal - measured|^2 / |ideal|^2 (discrete
    sums over the supplied samples)."""
    per: dict[Direction, float] = {}
    for d in DIRECTION_ORDER:
        ideal_d, meas_d = ideal[d], measured[d]
        if not ideal_d.same_grid(meas_d):
            raise ConfigError(f"grids differ on channel {d.value}")
        denom = float(np.sum(ideal_d.values**2))
        if denom <= 0.0:
            raise DomainError(f"accuracy undefined: zero ideal signal on {d.value}")
        err = float(np.sum((ideal_d.values - meas_d.values) ** 2))
        per[d] = 1.0 - err / denom
    raw = sum(per.values()) / 4.0
    return AccuracyScore(raw=raw, clamped=max(raw, 0.0), per_channel=per)


def slice_series(series: RateSeries, t_start: float, t_stop: float | None = None) -> RateSeries:
    """Sub-series with t >= t_start (and t <= t_stop when given), grid preserved."""
    times = series.times()
    k0 = int(np.searchsorted(times, t_start, side="left"))
    k1 = len(times) if t_stop is None else int(np.searchsorted(times, t_stop, side="right"))
    if k0 >= k1:
        raise DomainError("empty analysis window")
    return RateSeries(float(times[k0]), series.dt, series.values[k0:k1].copy())


def transient_s(fp: FilterParams, period_s: float | None) -> float:
    """Length of the start-up stretch excluded from scoring."""
    return max(2.0 * fp.tau2, period_s or 0.0)


def dominant_frequency(series: RateSeries) -> float:
    """Frequency (Hz) of the largest non-DC magnitude in the spectrum."""
    x = series.values - np.mean(series.values)
    if not np.any(x != 0.0):
        raise DomainError("dominant frequency undefined for a constant series")
    mags = np.abs(np.fft.rfft(x))
    if len(mags) < 2:
        raise DomainError("series too short for spectral analysis")
    k = int(np.argmax(mags[1:])) + 1
    if mags[k] <= 0.0:
        raise DomainError("flat spectrum")
    return k / (len(x) * series.dt)


def spectral_bin_hz(series: RateSeries) -> float:
    return 1.0 / (len(series.values) * series.dt)


def phase_lag_deg(a: RateSeries, b: RateSeries, freq_hz: float) -> float:
    """Phase of b minus phase of a at freq_hz, in (-180, 180] degrees.

    A signal delayed relative to `a` comes out negative.
    """
    if not a.same_grid(b):
        raise ConfigError("phase comparison needs a shared grid")
    if not (freq_hz > 0.0 and math.isfinite(freq_hz)):
        raise ConfigError("freq_hz must be positive")
    times = a.times()
    basis = np.exp(-2j * math.pi * freq_hz * times)
    za = np.sum((a.values - np.mean(a.values)) * basis)
    zb = np.sum((b.values - np.mean(b.values)) * basis)
    if abs(za) == 0.0 or abs(zb) == 0.0:
        raise DomainError(f"no component at {freq_hz} Hz")
    lag = math.degrees(np.angle(zb) - np.angle(za))
    wrapped = (lag + 180.0) % 360.0 - 180.0
    return 180.0 if wrapped == -180.0 else wrapped

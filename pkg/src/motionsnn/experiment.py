"""End-to-end experiment orchestration.

Glues the builders, the simulator and the rate analysis into one call, and
provides the frequency sweep used to map the responsive band.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .analysis import (
    AccuracyScore,
    FilterParams,
    RateGrid,
    accuracy,
    calibrate_f_max,
    dominant_frequency,
    firing_rate,
    ideal_rates,
    phase_lag_deg,
    pool_group,
    slice_series,
    spectral_bin_hz,
    transient_s,
)
from .config import RunConfig, build_layout, build_network, build_stimulus, build_trajectory
from .core import (
    DIRECTION_ORDER,
    Direction,
    DomainError,
    MotionSnnError,
    RateSeries,
    merge_trains,
)
from .engine import SimulationOutput, simulate
from .stimulus import EventStream, Trajectory
from .topology import NetworkGraph


@dataclass(frozen=True)
class ExperimentResult:
    config: RunConfig
    network: NetworkGraph
    trajectory: Trajectory
    stream: EventStream
    sim: SimulationOutput


def run_experiment(cfg: RunConfig) -> ExperimentResult:
    layout = build_layout(cfg)
    net = build_network(cfg, layout)
    traj = build_trajectory(cfg)
    stream = build_stimulus(cfg, traj)
    sim = simulate(net, stream, traj.t_end)
    return ExperimentResult(cfg, net, traj, stream, sim)


@dataclass(frozen=True)
class RunEvaluation:
    """Full-grid rate curves plus the score taken over the settled window."""

    fp: FilterParams
    grid: RateGrid
    window_start_s: float
    f_max_hz: float
    measured: dict[Direction, RateSeries]
    ideal: dict[Direction, RateSeries]
    score: AccuracyScore
    pooled_counts: dict[Direction, int]


def evaluate(result: ExperimentResult) -> RunEvaluation:
    cfg, net, traj = result.config, result.network, result.trajectory
    fp = FilterParams.from_output_taus(net.output_taus_s)
    n = int(math.floor(traj.t_end / cfg.grid_dt_s)) + 1
    grid = RateGrid(0.0, cfg.grid_dt_s, n)

    trains = {d: pool_group(result.sim.record, d, net.n_per_dir) for d in DIRECTION_ORDER}
    measured = {d: firing_rate(trains[d], fp, grid) for d in DIRECTION_ORDER}

    t_w = transient_s(fp, traj.period_s)
    if t_w >= traj.t_end:
        raise DomainError(
            f"run too short to score: needs > {t_w:.3f}s, has {traj.t_end:.3f}s"
        )
    measured_w = {d: slice_series(measured[d], t_w) for d in DIRECTION_ORDER}
    f_max = calibrate_f_max(measured_w)
    ideal_full = ideal_rates(traj, f_max, grid)
    ideal_w = {d: slice_series(ideal_full[d], t_w) for d in DIRECTION_ORDER}
    score = accuracy(ideal_w, measured_w)
    counts = {d: len(trains[d]) for d in DIRECTION_ORDER}
    return RunEvaluation(
        fp=fp,
        grid=grid,
        window_start_s=float(measured_w[Direction.UP].t0),
        f_max_hz=f_max,
        measured=measured,
        ideal=ideal_full,
        score=score,
        pooled_counts=counts,
    )


def _maybe(fn, *args):
    try:
        return float(fn(*args))
    except MotionSnnError:
        return None


def spectral_summary(result: ExperimentResult, ev: RunEvaluation) -> dict:
    """Dominant frequencies per channel and pooled-pair, plus the phase lags
    around the direction sequence, all over the settled window."""
    record, net = result.sim.record, result.network
    t_w = ev.window_start_s
    window = {d: slice_series(ev.measured[d], t_w) for d in DIRECTION_ORDER}

    dom = {d.value: _maybe(dominant_frequency, window[d]) for d in DIRECTION_ORDER}

    pooled: dict[str, RateSeries] = {}
    for label, pair in (("lr", (Direction.LEFT, Direction.RIGHT)),
                        ("ud", (Direction.UP, Direction.DOWN))):
        train = merge_trains(pool_group(record, d, net.n_per_dir) for d in pair)
        pooled[label] = slice_series(firing_rate(train, ev.fp, ev.grid), t_w)
    lr_hz = _maybe(dominant_frequency, pooled["lr"])
    ud_hz = _maybe(dominant_frequency, pooled["ud"])
    ratio = lr_hz / ud_hz if lr_hz and ud_hz else None

    lags = None
    period = result.trajectory.period_s
    if period:
        f0 = 1.0 / period
        seq = (Direction.RIGHT, Direction.DOWN, Direction.LEFT, Direction.UP)
        lags = {
            f"{a.value}_to_{b.value}": _maybe(phase_lag_deg, window[a], window[b], f0)
            for a, b in zip(seq, seq[1:])
        }
    return {
        "bin_hz": spectral_bin_hz(pooled["lr"]),
        "dominant_hz": dom,
        "pooled": {"lr_hz": lr_hz, "ud_hz": ud_hz, "lr_over_ud": ratio},
        "phase_lags_deg": lags,
    }


@dataclass(frozen=True)
class SweepVariant:
    label: str
    n_per_dir: int
    output_taus_s: tuple[float, ...]


def default_sweep_variants() -> tuple[SweepVariant, ...]:
    spread = tuple(float(t) for t in np.logspace(math.log10(0.005), math.log10(0.5), 5))
    return (
        SweepVariant("n1", 1, (0.5,)),
        SweepVariant("n5", 5, spread),
    )


@dataclass(frozen=True)
class SweepRow:
    freq_hz: float
    variant: str
    s_acc: float | None
    status: str  # "ok" or "error: ..."


def sweep_config(base: RunConfig, freq_hz: float, variant: SweepVariant) -> RunConfig:
    traj = dict(base.trajectory)
    if traj.get("kind") not in ("circle", "eight"):
        raise DomainError("frequency sweep needs a periodic trajectory")
    traj["freq_hz"] = freq_hz
    return replace(
        base,
        trajectory=traj,
        t_end_s=None,
        n_per_dir=variant.n_per_dir,
        output_taus_s=variant.output_taus_s,
    )


def _sweep_worker(args: tuple[RunConfig, float, str]) -> SweepRow:
    cfg, freq, label = args
    try:
        ev = evaluate(run_experiment(cfg))
        return SweepRow(freq, label, ev.score.clamped, "ok")
    except MotionSnnError as exc:
        return SweepRow(freq, label, None, f"error: {exc}")


def frequency_sweep(
    base: RunConfig,
    freqs: tuple[float, ...],
    variants: tuple[SweepVariant, ...] | None = None,
    jobs: int = 1,
    precomputed: dict[tuple[float, str], SweepRow] | None = None,
) -> list[SweepRow]:
    """One scored run per (frequency, variant); rows already present in
    `precomputed` are reused. Rows come back sorted by (variant, freq)."""
    variants = variants if variants is not None else default_sweep_variants()
    by_label = {v.label: v for v in variants}
    done = dict(precomputed or {})
    tasks = [
        (sweep_config(base, f, v), f, v.label)
        for v in variants
        for f in freqs
        if (f, v.label) not in done
    ]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_worker, tasks))
    else:
        rows = [_sweep_worker(t) for t in tasks]
    for row in rows:
        done[(row.freq_hz, row.variant)] = row
    order = {v.label: i for i, v in enumerate(variants)}
    keep = [r for r in done.values() if r.variant in by_label]
    keep.sort(key=lambda r: (order[r.variant], r.freq_hz))
    return keep


def normalize_rows(rows: list[SweepRow]) -> dict[tuple[float, str], float]:
    """Per-variant s_acc / max(s_acc); empty when a variant never scored > 0."""
    best: dict[str, float] = {}
    for r in rows:
        if r.s_acc is not None:
            best[r.variant] = max(best.get(r.variant, 0.0), r.s_acc)
    out: dict[tuple[float, str], float] = {}
    for r in rows:
        if r.s_acc is not None and best.get(r.variant, 0.0) > 0.0:
            out[(r.freq_hz, r.variant)] = r.s_acc / best[r.variant]
    return out

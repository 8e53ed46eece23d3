"""Reference implementations the test suite checks the package against.

Everything in here is written the slow, obvious way on purpose: a fixed-step
integrator for the network, direct kernel superposition for the rate filter,
forward Euler for membrane decay. The package has to agree with these, not
the other way around.
"""

from __future__ import annotations

import math

import numpy as np

from motionsnn import (
    Event,
    EventStream,
    NetworkGraph,
    NetworkParams,
    SpikeRecord,
    assemble_network,
    layout_from_centers,
)

STEP_S = 1e-6


def euler_decay(v0: float, dt: float, tau: float, n: int = 500_000) -> float:
    """Forward-Euler membrane decay with n sub-steps."""
    h = dt / n
    return v0 * (1.0 - h / tau) ** n


def fixed_step_spikes(
    net: NetworkGraph, stream: EventStream, t_end: float, step_s: float = STEP_S
) -> list[tuple[int, ...]]:
    """March the whole network on a fixed 1 us grid.

    Returns integer spike steps per neuron. Decay is applied one step at a
    time, so the only thing shared with the event-driven engine is the
    network description itself.
    """
    n = len(net.neurons)
    v_th = np.array([info.params.v_th for info in net.neurons])
    v_reset = np.array([info.params.v_reset for info in net.neurons])
    v_floor = np.array([info.params.v_floor for info in net.neurons])
    factor = np.exp(-step_s / np.array([info.params.tau_m for info in net.neurons]))
    d_out = [int(round(info.params.d_out / step_s)) for info in net.neurons]
    t_ref = [int(round(info.params.t_ref / step_s)) for info in net.neurons]

    outgoing: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for syn in net.synapses:
        outgoing[syn.pre].append((syn.post, syn.signed_weight))

    # Input layer: pass-through sources, gated only by their refractory time.
    pending: dict[int, dict[int, float]] = {}
    trains: list[list[int]] = [[] for _ in range(n)]
    prev_input: dict[int, int] = {}
    for ev in stream.events:
        if ev.t > t_end:
            break
        nid = net.input_id_by_pixel.get((ev.x, ev.y))
        if nid is None:
            continue
        s = int(round(ev.t / step_s))
        prev = prev_input.get(nid)
        if prev is not None and s - prev < t_ref[nid]:
            continue
        prev_input[nid] = s
        trains[nid].append(s)
        bucket = pending.setdefault(s, {})
        for post, w in outgoing[nid]:
            bucket[post] = bucket.get(post, 0.0) + w

    v = np.zeros(n)
    ref_until = [0] * n
    last_step = int(math.floor(t_end / step_s))
    for s in range(last_step + 1):
        if s > 0:
            v *= factor
        bucket = pending.pop(s, None)
        if bucket is None:
            continue
        for post in sorted(bucket):
            v[post] = max(v[post] + bucket[post], v_floor[post])
            if v[post] >= v_th[post] and s >= ref_until[post]:
                spike = s + d_out[post]
                trains[post].append(spike)
                v[post] = v_reset[post]
                ref_until[post] = s + t_ref[post]
                if spike * step_s <= t_end:
                    late = pending.setdefault(spike, {})
                    for q, w in outgoing[post]:
                        late[q] = late.get(q, 0.0) + w
    return [tuple(t) for t in trains]


def engine_spike_steps(
    record: SpikeRecord, step_s: float = STEP_S
) -> list[tuple[int, ...]]:
    return [tuple(int(round(t / step_s)) for t in train) for train in record.spike_times]


# Pixels of the single cell centered at (2, 2) on a 5 x 5 field.
_CELL_PIXELS = ((2, 2), (2, 3), (2, 1), (1, 2), (3, 2))


def random_single_cell(seed: int) -> tuple[NetworkGraph, EventStream, float]:
    """One randomized single-cell network plus a stimulus stream.

    Event times are drawn on the microsecond grid with pairwise distinct
    residues modulo 100 us (the spike output delay), so no causal chain from
    one stimulus event can land on the same instant as another event's chain.
    That keeps simultaneity, refractory and end-of-run comparisons free of
    floating-point tie-breaking, in both integrators.
    """
    rng = np.random.default_rng(seed)
    params = NetworkParams(
        hidden_v_th=float(rng.uniform(0.3, 0.8)),
        tau_center_s=float(rng.uniform(0.001, 0.004)),
        tau_directional_s=float(rng.uniform(0.005, 0.05)),
        output_v_th=float(rng.uniform(1.2, 2.2)),
        w_input_hidden=float(rng.uniform(0.6, 1.4)),
        w_hidden_output=float(rng.uniform(0.6, 1.4)),
        w_hidden_output_inh=float(rng.uniform(0.6, 1.6)),
        w_lateral=float(rng.uniform(0.5, 2.0)),
        input_tau_s=float(rng.uniform(0.005, 0.05)),
    )
    n_per = int(rng.integers(1, 3))
    taus = tuple(
        float(t) for t in np.exp(rng.uniform(math.log(0.003), math.log(0.6), n_per))
    )
    layout = layout_from_centers(5, 5, [(2, 2)])
    net = assemble_network(layout, n_per_dir=n_per, output_taus_s=taus, params=params)

    n_ev = int(rng.integers(18, 40))
    residues = rng.choice(np.arange(1, 100), size=n_ev, replace=False)
    span = int(rng.integers(60, 400))  # smaller spans stress the refractory gate
    times_us = np.sort(residues + 100 * rng.integers(0, span, size=n_ev))
    events = []
    for us in times_us:
        k = 2 if rng.random() < 0.3 else 1
        for i in rng.choice(len(_CELL_PIXELS), size=k, replace=False):
            x, y = _CELL_PIXELS[i]
            events.append(Event(x=x, y=y, t=float(us) * 1e-6))
    stream = EventStream.from_events(events, 5, 5)
    t_end = (float(times_us.max()) + 357.0) * 1e-6 + 5e-7
    return net, stream, t_end


def brute_force_rate(train, fp, grid) -> np.ndarray:
    """Direct superposition of the biphasic kernel, O(spikes * samples)."""
    times = grid.times()
    out = np.zeros(grid.n)
    for t_s in train:
        dt = times - t_s
        mask = dt >= 0.0
        out[mask] += fp.lam * (np.exp(-dt[mask] / fp.tau1) - np.exp(-dt[mask] / fp.tau2))
    return out


def rel_err(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(b))), 1e-300)
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)))) / scale

"""Event-driven simulation of the spiking network.

Potentials decay lazily; synapses are instantaneous deltas. Deliveries that
share an exact timestamp are summed per target before a single threshold
check, so simultaneous excitation acts as a coincidence. A neuron whose
potential crosses threshold at time t emits its spike at t + d_out, which is
also when downstream targets receive it.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .core import (
    DomainError,
    EventStream,
    NumericFault,
    SpikeRecord,
)
from .topology import Layer, NetworkGraph


def decay(v: float, dt: float, tau_m: float, v_floor: float = -math.inf) -> float:
    """Exponential relaxation of the potential toward rest over dt seconds."""
    if dt < 0.0:
        raise NumericFault("negative time step")
    if tau_m <= 0.0:
        raise NumericFault("tau_m must be positive")
    out = v * math.exp(-dt / tau_m)
    return out if out >= v_floor else v_floor


@dataclass(frozen=True)
class SimulationOutput:
    record: SpikeRecord
    dropped_events: int
    refractory_dropped: int
    spike_totals: dict[str, int]


def simulate(net: NetworkGraph, stim: EventStream, t_end: float) -> SimulationOutput:
    """Run the network against a stimulus for t_end seconds.

    Stimulus events map to input neurons by pixel; events on uncovered pixels
    are dropped and counted. Input neurons are pass-through sources limited
    only by their refractory period.
    """
    if t_end < 0.0 or not math.isfinite(t_end):
        raise DomainError("t_end must be finite and >= 0")
    if (
        stim.field_width != net.layout.field_width
        or stim.field_height != net.layout.field_height
    ):
        raise DomainError("stimulus field does not match the network layout")

    n = len(net.neurons)
    out_syn: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for s in net.synapses:
        out_syn[s.pre].append((s.post, s.signed_weight))

    tau = [p.params.tau_m for p in net.neurons]
    v_th = [p.params.v_th for p in net.neurons]
    v_reset = [p.params.v_reset for p in net.neurons]
    v_floor = [p.params.v_floor for p in net.neurons]
    t_ref = [p.params.t_ref for p in net.neurons]
    d_out = [p.params.d_out for p in net.neurons]

    v = [0.0] * n
    t_last = [0.0] * n
    ref_until = [-math.inf] * n
    spikes: list[list[float]] = [[] for _ in range(n)]

    # Heap entries: (delivery time, presynaptic id, sequence, target, signed weight).
    heap: list[tuple[float, int, int, int, float]] = []
    seq = 0

    dropped = 0
    refractory_dropped = 0
    last_input_spike: dict[int, float] = {}
    for ev in stim.events:
        if ev.t > t_end:
            break
        owner = net.input_id_by_pixel.get((ev.x, ev.y))
        if owner is None:
            dropped += 1
            continue
        prev = last_input_spike.get(owner)
        if prev is not None and ev.t - prev < t_ref[owner]:
            refractory_dropped += 1
            continue
        last_input_spike[owner] = ev.t
        spikes[owner].append(ev.t)
        for post, w in out_syn[owner]:
            heap.append((ev.t, owner, seq, post, w))
            seq += 1
    heapq.heapify(heap)

    while heap:
        t_now = heap[0][0]
        # One wave: everything already queued for this exact instant. Spikes
        # triggered now deliver at t_now + d_out (a later wave when d_out = 0).
        sums: dict[int, float] = {}
        while heap and heap[0][0] == t_now:
            _, _, _, post, w = heapq.heappop(heap)
            sums[post] = sums.get(post, 0.0) + w
        for post in sorted(sums):
            dt = t_now - t_last[post]
            v_new = v[post] * math.exp(-dt / tau[post]) + sums[post]
            if v_new < v_floor[post]:
                v_new = v_floor[post]
            if not math.isfinite(v_new):
                raise NumericFault(f"non-finite potential on neuron {post}")
            v[post] = v_new
            t_last[post] = t_now
            if v_new >= v_th[post] and t_now >= ref_until[post]:
                t_spike = t_now + d_out[post]
                spikes[post].append(t_spike)
                v[post] = v_reset[post]
                ref_until[post] = t_now + t_ref[post]
                if t_spike <= t_end:
                    for nxt, w in out_syn[post]:
                        heapq.heappush(heap, (t_spike, post, seq, nxt, w))
                        seq += 1

    record = SpikeRecord(tuple(tuple(train) for train in spikes))
    totals = {layer.value: 0 for layer in Layer}
    for info, train in zip(net.neurons, record.spike_times):
        totals[info.layer.value] += len(train)
    return SimulationOutput(
        record=record,
        dropped_events=dropped,
        refractory_dropped=refractory_dropped,
        spike_totals=totals,
    )

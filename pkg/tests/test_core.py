"""Value types, device mapping and CSV helpers."""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from motionsnn import (
    ConfigError,
    Direction,
    DIRECTION_ORDER,
    Event,
    EventStream,
    LifParams,
    RateSeries,
    Role,
    Sign,
    SpikeRecord,
    Synapse,
    SynapseDevice,
)
from motionsnn.core import (
    DeviceState,
    fmt_float,
    merge_trains,
    read_events_csv,
    read_spikes_csv,
    role_of,
    weight_from_device,
    write_events_csv,
    write_spikes_csv,
)


def test_direction_opposite_is_involution():
    for d in Direction:
        assert d.opposite.opposite is d
    assert Direction.UP.opposite is Direction.DOWN
    assert Direction.LEFT.opposite is Direction.RIGHT
    assert DIRECTION_ORDER == (
        Direction.UP,
        Direction.DOWN,
        Direction.LEFT,
        Direction.RIGHT,
    )


def test_role_of_maps_onto_matching_role():
    for d in Direction:
        assert role_of(d).value == d.value
    assert Role.CENTER.value not in {d.value for d in Direction}


def test_device_conductance_ratio():
    dev = SynapseDevice()
    assert dev.g_on / dev.g_off == pytest.approx(1800.0)


def test_weight_follows_device_state():
    on = SynapseDevice()
    off = SynapseDevice(state=DeviceState.OFF)
    assert weight_from_device(on, 1.0) == 1.0
    assert weight_from_device(off, 1.0) == pytest.approx(1.0 / 1800.0)
    assert weight_from_device(off, 0.5) == pytest.approx(0.5 / 1800.0)


def test_device_validation():
    with pytest.raises(ConfigError):
        SynapseDevice(g_on=1e-10, g_off=1e-9)
    with pytest.raises(ConfigError):
        weight_from_device(SynapseDevice(), 0.0)


def test_event_stream_sorts_by_time_then_row_then_column():
    evs = [Event(2, 1, 0.0), Event(1, 2, 0.0), Event(1, 1, 0.0), Event(0, 0, 1e-4)]
    s = EventStream.from_events(evs, 4, 4)
    assert [(e.x, e.y, e.t) for e in s.events] == [
        (1, 1, 0.0),
        (2, 1, 0.0),
        (1, 2, 0.0),
        (0, 0, 1e-4),
    ]
    assert len(s) == 4


def test_event_stream_rejects_bad_input():
    with pytest.raises(ConfigError):
        EventStream(3, 3, (Event(1, 1, 0.002), Event(1, 1, 0.001)))
    with pytest.raises(ConfigError):
        EventStream(3, 3, (Event(3, 1, 0.0),))
    with pytest.raises(ConfigError):
        EventStream(3, 3, (Event(1, 1, -1e-9),))
    with pytest.raises(ConfigError):
        EventStream(3, 3, (Event(1, 1, math.nan),))
    with pytest.raises(ConfigError):
        EventStream(0, 3, ())


def test_lif_defaults():
    p = LifParams(tau_m=0.02, v_th=1.5)
    assert p.v_floor == -3.0
    assert p.v_reset == 0.0
    assert p.t_ref == 2e-4 and p.t_pw == 1e-4 and p.d_out == 1e-4


@pytest.mark.parametrize(
    "kw",
    [
        dict(tau_m=0.0, v_th=1.0),
        dict(tau_m=-0.1, v_th=1.0),
        dict(tau_m=0.02, v_th=0.0),  # threshold not above reset
        dict(tau_m=0.02, v_th=1.0, t_pw=0.0),
        dict(tau_m=0.02, v_th=1.0, t_ref=1e-5),  # shorter than the pulse
        dict(tau_m=0.02, v_th=1.0, d_out=-1e-5),
        dict(tau_m=0.02, v_th=1.0, v_floor=0.5),  # floor above reset
    ],
)
def test_lif_validation(kw):
    with pytest.raises(ConfigError):
        LifParams(**kw)


def test_synapse_signed_weight():
    assert Synapse(0, 1, 0.9, Sign.EXCITATORY).signed_weight == 0.9
    assert Synapse(0, 1, 1.1, Sign.INHIBITORY).signed_weight == -1.1
    with pytest.raises(ConfigError):
        Synapse(0, 1, -0.5, Sign.EXCITATORY)
    with pytest.raises(ConfigError):
        Synapse(0, 1, math.inf, Sign.EXCITATORY)


def test_spike_record_counts():
    r = SpikeRecord(((0.1, 0.2), (), (0.05,)))
    assert r.n_neurons == 3
    assert r.counts() == (2, 0, 1)
    assert r.total() == 3


def test_spike_record_requires_strictly_increasing_trains():
    with pytest.raises(ConfigError):
        SpikeRecord(((0.2, 0.2),))
    with pytest.raises(ConfigError):
        SpikeRecord(((0.2, 0.1),))


def test_rate_series_grid():
    s = RateSeries(1.0, 0.5, [0.0, 1.0, 2.0])
    assert list(s.times()) == [1.0, 1.5, 2.0]
    assert s.same_grid(RateSeries(1.0, 0.5, [9.0, 9.0, 9.0]))
    assert not s.same_grid(RateSeries(0.0, 0.5, [9.0, 9.0, 9.0]))
    assert not s.same_grid(RateSeries(1.0, 0.5, [9.0, 9.0]))
    with pytest.raises(ConfigError):
        RateSeries(0.0, 0.0, [1.0])
    with pytest.raises(ConfigError):
        RateSeries(0.0, 0.5, [[1.0, 2.0]])


def test_fmt_float():
    assert fmt_float(-0.0) == "0"
    assert fmt_float(2.0) == "2"
    assert fmt_float(0.15) == "0.15"
    assert fmt_float(1.0 / 3.0) == "0.333333333"


def test_events_csv_round_trip(tmp_path):
    evs = [Event(1, 2, 0.0), Event(2, 2, 0.000123457), Event(4, 0, 0.5)]
    stream = EventStream.from_events(evs, 5, 5)
    path = tmp_path / "ev.csv"
    write_events_csv(stream, str(path))
    text = path.read_text().splitlines()
    assert text[0] == "x,y,t_s"
    back = read_events_csv(str(path), 5, 5)
    assert back.events == stream.events


def test_spikes_csv_round_trip(tmp_path):
    rec = SpikeRecord(((1e-4, 0.25), (), (0.1,)))
    path = tmp_path / "spikes.csv"
    write_spikes_csv(rec, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == "neuron_id,t_s"
    # rows come out sorted by time, not by neuron
    assert [ln.split(",")[0] for ln in lines[1:]] == ["0", "2", "0"]
    back = read_spikes_csv(str(path), n_neurons=3)
    assert back.spike_times == rec.spike_times


def test_read_spikes_rejects_out_of_range_ids(tmp_path):
    path = tmp_path / "spikes.csv"
    path.write_text("neuron_id,t_s\n7,0.1\n")
    with pytest.raises(ConfigError):
        read_spikes_csv(str(path), n_neurons=3)


sorted_train = st.lists(
    st.floats(0.0, 10.0, allow_nan=False), max_size=8
).map(sorted)


@given(st.lists(sorted_train, max_size=5))
def test_merge_trains_is_sorted_multiset(trains):
    merged = merge_trains(tuple(t) for t in trains)
    assert list(merged) == sorted(x for t in trains for x in t)

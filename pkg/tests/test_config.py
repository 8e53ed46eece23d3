"""Run configuration parsing, overrides and derived run length."""

import json

import pytest

from motionsnn import (
    CircleTrajectory,
    ConfigError,
    EightTrajectory,
    LinearTrajectory,
    RunConfig,
    WaypointTrajectory,
)
from motionsnn.config import (
    apply_overrides,
    build_network,
    build_network_params,
    build_stimulus,
    build_trajectory,
    resolve_t_end,
)


def test_defaults_round_trip():
    cfg = RunConfig()
    assert cfg.field_width == 10 and cfg.field_height == 11
    assert cfg.trajectory == {"kind": "circle", "freq_hz": 0.15}
    assert cfg.n_per_dir == 1 and cfg.output_taus_s == (0.5,)
    again = RunConfig.from_dict(cfg.to_dict())
    assert again == cfg


def test_from_dict_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"schema_version": 1, "bogus": 1})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"schema_version": 2})


def test_trajectory_validation():
    with pytest.raises(ConfigError):
        RunConfig(trajectory={"kind": "spiral"})
    with pytest.raises(ConfigError):
        RunConfig(trajectory={"kind": "circle", "vx": 1.0})
    with pytest.raises(ConfigError):
        RunConfig(trajectory={"freq_hz": 0.2})


def test_parameter_validation():
    with pytest.raises(ConfigError):
        RunConfig(encoding="both")
    with pytest.raises(ConfigError):
        RunConfig(n_per_dir=0)
    with pytest.raises(ConfigError):
        RunConfig(n_per_dir=2, output_taus_s=(0.5,))
    with pytest.raises(ConfigError):
        RunConfig(grid_dt_s=0.0)
    with pytest.raises(ConfigError):
        RunConfig(t_end_s=-1.0)
    with pytest.raises(ConfigError):
        RunConfig(network={"not_a_param": 1.0})
    RunConfig(network={"output_v_th": 1.8})


def test_build_trajectory_dispatch():
    assert isinstance(build_trajectory(RunConfig(t_end_s=5.0)), CircleTrajectory)
    cfg8 = RunConfig(trajectory={"kind": "eight", "freq_hz": 0.2}, t_end_s=5.0)
    assert isinstance(build_trajectory(cfg8), EightTrajectory)
    lin = RunConfig(trajectory={"kind": "linear", "x0": 1.0, "y0": 5.0, "vx": 3.0},
                    t_end_s=2.0)
    assert isinstance(build_trajectory(lin), LinearTrajectory)
    way = RunConfig(trajectory={"kind": "waypoints",
                                "points": [[0.0, 2.0, 2.0], [1.5, 6.0, 2.0]]})
    traj = build_trajectory(way)
    assert isinstance(traj, WaypointTrajectory)
    assert traj.t_end == 1.5


def test_resolve_t_end_rules():
    # explicit value wins
    assert resolve_t_end(RunConfig(t_end_s=7.5)) == 7.5
    # periodic default: settle time plus three periods
    cfg = RunConfig(trajectory={"kind": "circle", "freq_hz": 0.15})
    period = 1.0 / 0.15
    assert resolve_t_end(cfg) == pytest.approx(max(4 * 0.5, period) + 3 * period)
    fast = RunConfig(trajectory={"kind": "circle", "freq_hz": 10.0})
    assert resolve_t_end(fast) == pytest.approx(2.0 + 0.3)
    # linear paths have no period to fall back on
    lin = RunConfig(trajectory={"kind": "linear", "x0": 1.0, "y0": 5.0, "vx": 3.0})
    with pytest.raises(ConfigError):
        resolve_t_end(lin)
    # waypoint runs always end at the last waypoint
    way = RunConfig(trajectory={"kind": "waypoints",
                                "points": [[0.0, 2.0, 2.0], [2.5, 6.0, 2.0]]},
                    t_end_s=9.0)
    assert resolve_t_end(way) == 2.5


def test_network_param_overrides_are_applied():
    cfg = RunConfig(network={"output_v_th": 1.8, "w_lateral": 0.7})
    params = build_network_params(cfg)
    assert params.output_v_th == 1.8 and params.w_lateral == 0.7
    net = build_network(cfg)
    for ids in net.output_ids.values():
        for nid in ids:
            assert net.neurons[nid].params.v_th == 1.8


def test_build_stimulus_respects_encoding(tmp_path):
    onset = RunConfig(t_end_s=5.0)
    footprint = RunConfig(t_end_s=5.0, encoding="footprint")
    assert len(build_stimulus(footprint)) > len(build_stimulus(onset))


def test_apply_overrides():
    data = RunConfig().to_dict()
    out = apply_overrides(data, [
        "trajectory.freq_hz=0.3",
        "n_per_dir=2",
        "output_taus_s=[0.1, 0.5]",
        "network.output_v_th=1.8",
        "encoding=footprint",
    ])
    cfg = RunConfig.from_dict(out)
    assert cfg.trajectory["freq_hz"] == 0.3
    assert cfg.n_per_dir == 2 and cfg.output_taus_s == (0.1, 0.5)
    assert cfg.network == {"output_v_th": 1.8}
    assert cfg.encoding == "footprint"
    # the input dict is left alone
    assert data == RunConfig().to_dict()


def test_apply_overrides_creates_nested_tables():
    out = apply_overrides({}, ["a.b.c=1"])
    assert out == {"a": {"b": {"c": 1}}}


def test_apply_overrides_errors():
    with pytest.raises(ConfigError):
        apply_overrides({}, ["no_equals_sign"])
    with pytest.raises(ConfigError):
        apply_overrides({"a": 3}, ["a.b=1"])


def test_from_json_file(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"trajectory": {"kind": "circle", "freq_hz": 0.2}}))
    cfg = RunConfig.from_json_file(str(path))
    assert cfg.trajectory["freq_hz"] == 0.2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        RunConfig.from_json_file(str(bad))
    arr = tmp_path / "arr.json"
    arr.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        RunConfig.from_json_file(str(arr))
    with pytest.raises(ConfigError):
        RunConfig.from_json_file(str(tmp_path / "missing.json"))


def test_output_taus_are_coerced_to_floats():
    cfg = RunConfig.from_dict({"n_per_dir": 2, "output_taus_s": [1, 2]})
    assert cfg.output_taus_s == (1.0, 2.0)
    assert all(isinstance(t, float) for t in cfg.output_taus_s)

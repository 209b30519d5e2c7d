import numpy as np
import pytest

from sherlab import (
    CheckpointError,
    InitialDataSpec,
    NormReport,
    Scenario2D,
    load_checkpoint,
    read_series,
    run_scenario2d,
    save_checkpoint,
    write_series,
)
from sherlab.io import load_profile_csv
from sherlab.plots import render_plots


def _report():
    t = np.linspace(0.0, 1.0, 6)
    return NormReport(
        t,
        {
            "h1_norm": 0.01 * np.exp(-t),
            "dissipation": 1e-5 * np.exp(-2 * t),
            "cum_dissipation": 1e-5 * t,
        },
    )


def test_series_round_trip_exact(tmp_path):
    rep = _report()
    path = tmp_path / "series.csv"
    write_series(rep, path)
    back = read_series(path)
    np.testing.assert_array_equal(back.times, rep.times)
    for name in rep.columns:
        np.testing.assert_array_equal(back.columns[name], rep.columns[name])


def test_series_17_digit_format(tmp_path):
    t = np.array([0.0, 0.1])
    rep = NormReport(t, {"h1_norm": np.array([1.0 / 3.0, np.pi])})
    path = tmp_path / "series.csv"
    write_series(rep, path)
    back = read_series(path)
    assert back.columns["h1_norm"][0] == 1.0 / 3.0
    assert back.columns["h1_norm"][1] == np.pi


def test_read_series_requires_time_column(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,y\n1,2\n")
    with pytest.raises(ValueError):
        read_series(path)


def _final_state():
    sc = Scenario2D(
        N_x=16,
        N_z=81,
        T_final=0.01,
        dt=1e-3,
        cadence=5,
        initial=InitialDataSpec(amplitude=0.01, modes=(1, 2), kind="random", seed=2),
    )
    return run_scenario2d(sc)[1]


def test_checkpoint_round_trip_bitwise(tmp_path):
    state = _final_state()
    path = str(tmp_path / "ck.json")
    save_checkpoint(state, path)
    back = load_checkpoint(path)
    assert back.t == state.t
    assert back.step_index == state.step_index
    np.testing.assert_array_equal(back.u.modes, state.u.modes)
    np.testing.assert_array_equal(back.u_prev, state.u_prev)
    np.testing.assert_array_equal(back.adv_prev, state.adv_prev)


def test_checkpoint_truncated_payload(tmp_path):
    state = _final_state()
    path = str(tmp_path / "ck.json")
    save_checkpoint(state, path)
    bin_path = tmp_path / "ck.bin"
    raw = bin_path.read_bytes()
    bin_path.write_bytes(raw[:-16])
    with pytest.raises(CheckpointError):
        load_checkpoint(path)


def test_checkpoint_overlong_payload(tmp_path):
    state = _final_state()
    path = str(tmp_path / "ck.json")
    save_checkpoint(state, path)
    bin_path = tmp_path / "ck.bin"
    bin_path.write_bytes(bin_path.read_bytes() + b"\x00" * 16)
    with pytest.raises(CheckpointError):
        load_checkpoint(path)


def test_checkpoint_version_mismatch(tmp_path):
    import json

    state = _final_state()
    path = str(tmp_path / "ck.json")
    save_checkpoint(state, path)
    header = json.loads(open(path).read())
    header["version"] = 99
    open(path, "w").write(json.dumps(header))
    with pytest.raises(CheckpointError):
        load_checkpoint(path)


def test_load_profile_csv(tmp_path):
    path = tmp_path / "prof.csv"
    path.write_text("z,value\n0.0,0.0\n1.0,0.5\n2.0,0.1\n")
    z, v = load_profile_csv(path)
    np.testing.assert_array_equal(z, [0.0, 1.0, 2.0])
    np.testing.assert_array_equal(v, [0.0, 0.5, 0.1])


def test_render_plots_energy_and_decay(tmp_path):
    rep = _report()
    paths = render_plots(rep, str(tmp_path), decay_column="h1_norm", budget=0.01)
    assert len(paths) == 2
    for p in paths:
        assert p.endswith(".svg")
        assert (tmp_path / p.split("/")[-1]).stat().st_size > 0


def test_render_plots_rejects_single_sample(tmp_path):
    rep = NormReport(np.array([0.0]), {"h1_norm": np.array([1.0])})
    with pytest.raises(ValueError):
        render_plots(rep, str(tmp_path))

import json

from sherlab.cli import main


def _write(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


def test_simulate2d_end_to_end(tmp_path):
    cfg = _write(
        tmp_path / "c.json",
        {
            "grid": {"N_x": 16, "N_z": 81},
            "numerics": {"T_final": 0.02, "dt": 1e-3, "cadence": 5},
        },
    )
    out = tmp_path / "out"
    rc = main(["simulate2d", "--config", cfg, "--out", str(out)])
    assert rc == 0
    assert (out / "series.csv").exists()
    assert (out / "checkpoint.json").exists()
    assert (out / "checkpoint.bin").exists()
    assert (out / "effective_config.json").exists()
    assert (out / "energy.svg").exists()
    header = (out / "series.csv").read_text().splitlines()[0]
    assert header.startswith("t,h1_norm,dissipation,cum_dissipation")


def test_simulate2d_resume(tmp_path):
    cfg_short = _write(
        tmp_path / "a.json",
        {"grid": {"N_x": 16, "N_z": 81}, "numerics": {"T_final": 0.02, "dt": 1e-3}},
    )
    cfg_long = _write(
        tmp_path / "b.json",
        {"grid": {"N_x": 16, "N_z": 81}, "numerics": {"T_final": 0.04, "dt": 1e-3}},
    )
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    assert main(["simulate2d", "--config", cfg_short, "--out", str(out1)]) == 0
    rc = main(
        [
            "simulate2d",
            "--config",
            cfg_long,
            "--out",
            str(out2),
            "--resume",
            str(out1 / "checkpoint.json"),
        ]
    )
    assert rc == 0


def test_seed_flag_overrides_config(tmp_path):
    doc = {
        "seed": 1,
        "grid": {"N_x": 16, "N_z": 81},
        "initial": {"kind": "random", "modes": [1, 2]},
        "numerics": {"T_final": 0.01, "dt": 1e-3, "cadence": 5},
    }
    cfg = _write(tmp_path / "c.json", doc)
    outs = []
    for name, seed in (("s1", "7"), ("s2", "7"), ("s3", "8")):
        out = tmp_path / name
        assert main(["simulate2d", "--config", cfg, "--out", str(out), "--seed", seed]) == 0
        outs.append((out / "series.csv").read_bytes())
    assert outs[0] == outs[1]
    assert outs[0] != outs[2]


def test_heat_decay_zero_moment(tmp_path):
    cfg = _write(
        tmp_path / "h.json",
        {
            "kind": "heat-decay",
            "grid": {"N_z": 401},
            "data": {"moment": "zero"},
            "numerics": {
                "dt": 1e-2,
                "T_final": 50.0,
                "dt_growth": 1.05,
                "dt_max": 1.0,
                "window_lo": 5.0,
                "window_hi": 50.0,
            },
        },
    )
    out = tmp_path / "out"
    rc = main(["heat-decay", "--config", cfg, "--out", str(out)])
    assert rc == 0
    assert (out / "series.csv").exists()
    assert (out / "decay_sup_triple.svg").exists()


def test_report_from_series(tmp_path):
    cfg = _write(
        tmp_path / "c.json",
        {"grid": {"N_x": 16, "N_z": 81}, "numerics": {"T_final": 0.02, "dt": 1e-3}},
    )
    out = tmp_path / "run"
    assert main(["simulate2d", "--config", cfg, "--out", str(out)]) == 0
    rep_cfg = _write(
        tmp_path / "r.json",
        {"series": str(out / "series.csv"), "decay_column": "h1_norm", "budget": 0.01},
    )
    rep_out = tmp_path / "rep"
    assert main(["report", "--config", rep_cfg, "--out", str(rep_out)]) == 0
    assert (rep_out / "energy.svg").exists()
    assert (rep_out / "decay_h1_norm.svg").exists()


def test_kind_mismatch_is_an_error(tmp_path):
    cfg = _write(tmp_path / "c.json", {"kind": "heat-decay"})
    assert main(["simulate2d", "--config", cfg, "--out", str(tmp_path / "o")]) == 1


def test_invalid_config_is_an_error(tmp_path):
    cfg = _write(tmp_path / "c.json", {"grid": {"N_x": 63}})
    assert main(["simulate2d", "--config", cfg, "--out", str(tmp_path / "o")]) == 1


def test_missing_config_file_is_an_error(tmp_path):
    rc = main(["simulate2d", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path)])
    assert rc == 1


def test_lemma_audit_command(tmp_path):
    cfg = _write(
        tmp_path / "c.json",
        {"kind": "lemma-audit", "grid": {"N_z": 401}, "audit": {"n_samples": 20}},
    )
    out = tmp_path / "out"
    rc = main(["lemma-audit", "--config", cfg, "--out", str(out)])
    assert rc == 0
    assert (out / "lemma_audit.csv").exists()

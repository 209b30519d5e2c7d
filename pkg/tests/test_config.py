import json

import pytest

from sherlab import ConfigError, parse_config


def test_defaults_filled():
    cfg = parse_config("{}")
    assert cfg.kind == "sim2d"
    assert cfg["grid.N_x"] == 64
    assert cfg["grid.N_z"] == 201
    assert cfg["numerics.dt"] == 1e-3
    assert cfg["physics.eps0"] == 0.01
    assert cfg.seed == 0


def test_partial_override():
    cfg = parse_config('{"kind": "sim2d", "grid": {"N_x": 32}, "seed": 5}')
    assert cfg["grid.N_x"] == 32
    assert cfg["grid.N_z"] == 201  # untouched default
    assert cfg.seed == 5


def test_unknown_kind_rejected():
    with pytest.raises(ConfigError):
        parse_config('{"kind": "bogus"}')


def test_unknown_section_rejected():
    with pytest.raises(ConfigError):
        parse_config('{"kind": "sim2d", "physicss": {}}')


def test_unknown_key_rejected():
    with pytest.raises(ConfigError):
        parse_config('{"kind": "sim2d", "grid": {"N_q": 3}}')


@pytest.mark.parametrize(
    "doc",
    [
        '{"grid": {"N_x": 63}}',  # odd mode count
        '{"grid": {"Z_max": -1.0}}',
        '{"numerics": {"dt": 0}}',
        '{"numerics": {"scheme": "rk4"}}',
        '{"seed": -1}',
        '{"kind": "heat-decay", "data": {"moment": "huge"}}',
        '{"kind": "lemma-audit", "audit": {"lemma": "7.1"}}',
    ],
)
def test_bad_values_rejected(doc):
    with pytest.raises(ConfigError):
        parse_config(doc)


def test_error_messages_are_path_qualified():
    with pytest.raises(ConfigError, match="grid.N_x"):
        parse_config('{"grid": {"N_x": 63}}')


def test_echo_round_trip():
    cfg = parse_config('{"kind": "heat-decay", "numerics": {"dt_growth": 1.1}}')
    again = parse_config(cfg.echo())
    assert again.kind == cfg.kind
    assert again.sections == cfg.sections
    assert again.seed == cfg.seed


def test_all_kinds_have_complete_defaults():
    for kind in (
        "sim2d",
        "sim3d-linear",
        "heat-decay",
        "verify-inequalities",
        "lemma-audit",
        "smoothing-ladder",
    ):
        cfg = parse_config(json.dumps({"kind": kind}))
        assert cfg.kind == kind
        # echo of pure defaults re-parses cleanly
        parse_config(cfg.echo())

"""Strict JSON scenario configuration.

Every experiment is described by a JSON document with a ``kind`` plus
nested sections.  Parsing is strict: unknown keys, type mismatches and
out-of-range values fail with a path-qualified message, and the effective
(default-filled) config echoes back to JSON so a run's exact parameters
are always recorded.  Re-parsing the echo reproduces the config.
"""

import json
import math
from dataclasses import dataclass

KINDS = (
    "sim2d",
    "sim3d-linear",
    "heat-decay",
    "verify-inequalities",
    "lemma-audit",
    "smoothing-ladder",
)

_TWO_PI = 2.0 * math.pi


def _positive(x):
    return x > 0


def _nonneg(x):
    return x >= 0


# schema entry: (default, type, predicate or None, description of constraint)
_GRID_2D = {
    "L_x": (_TWO_PI, float, _positive, "must be positive"),
    "N_x": (64, int, lambda n: n >= 4 and n % 2 == 0, "must be even and >= 4"),
    "Z_max": (20.0, float, _positive, "must be positive"),
    "N_z": (201, int, lambda n: n >= 9, "must be >= 9"),
    "stretch": (0.0, float, _nonneg, "must be non-negative"),
}

_SCHEMAS = {
    "sim2d": {
        "grid": _GRID_2D,
        "physics": {
            "eps0": (0.01, float, _positive, "must be positive"),
        },
        "initial": {
            "amplitude": (0.01, float, _nonneg, "must be non-negative"),
            "modes": ([1], list, None, None),
            "profile": ("zgauss", str, None, None),
            "kind": ("deterministic", str, lambda s: s in ("deterministic", "random"),
                     "must be 'deterministic' or 'random'"),
            "normalize": (True, bool, None, None),
        },
        "numerics": {
            "dt": (1e-3, float, _positive, "must be positive"),
            "T_final": (1.0, float, _nonneg, "must be non-negative"),
            "cadence": (10, int, _positive, "must be positive"),
            "snapshot_cadence": (0, int, _nonneg, "must be non-negative"),
            "scheme": ("sbdf2", str, lambda s: s in ("sbdf2", "be"),
                       "must be 'sbdf2' or 'be'"),
        },
    },
    "sim3d-linear": {
        "grid": {
            "L_x": (_TWO_PI, float, _positive, "must be positive"),
            "L_y": (_TWO_PI, float, _positive, "must be positive"),
            "N_x": (16, int, lambda n: n >= 4 and n % 2 == 0, "must be even and >= 4"),
            "N_y": (16, int, lambda n: n >= 4 and n % 2 == 0, "must be even and >= 4"),
            "Z_max": (20.0, float, _positive, "must be positive"),
            "N_z": (129, int, lambda n: n >= 9, "must be >= 9"),
        },
        "physics": {
            "eps1": (1e-3, float, _nonneg, "must be non-negative"),
            "rho0": (0.5, float, _positive, "must be positive"),
        },
        "initial": {
            "amplitude": (1e-2, float, _nonneg, "must be non-negative"),
            "band": (5, int, _positive, "must be positive"),
        },
        "numerics": {
            "dt": (2e-3, float, _positive, "must be positive"),
            "T_final": (20.0, float, _nonneg, "must be non-negative"),
            "cadence": (50, int, _positive, "must be positive"),
        },
    },
    "heat-decay": {
        "grid": {
            "Z_max": (44.0, float, _positive, "must be positive"),
            "N_z": (1321, int, lambda n: n >= 9, "must be >= 9"),
        },
        "data": {
            "moment": ("nonzero", str, lambda s: s in ("nonzero", "zero"),
                       "must be 'nonzero' or 'zero'"),
        },
        "numerics": {
            "dt": (1e-3, float, _positive, "must be positive"),
            "T_final": (1000.0, float, _nonneg, "must be non-negative"),
            "dt_growth": (1.02, float, lambda x: x >= 1.0, "must be >= 1"),
            "dt_max": (0.125, float, _positive, "must be positive"),
            "cadence": (10, int, _positive, "must be positive"),
            "window_lo": (10.0, float, _nonneg, "must be non-negative"),
            "window_hi": (1000.0, float, _positive, "must be positive"),
        },
    },
    "verify-inequalities": {
        "scan": {
            "r_values": ([0.1, 0.5, 0.9], list, None, None),
            "caps": ([15, 25], list, None, None),
        },
    },
    "lemma-audit": {
        "grid": {
            "Z_max": (40.0, float, _positive, "must be positive"),
            "N_z": (801, int, lambda n: n >= 9, "must be >= 9"),
        },
        "audit": {
            "lemma": ("3.1", str, lambda s: s in ("3.1", "3.2", "3.3"),
                      "must be one of '3.1', '3.2', '3.3'"),
            "lam": (1.0, float, lambda x: 0.0 <= x <= 1.0, "must lie in [0, 1]"),
            "lam_tilde": (1.0, float, lambda x: 0.0 < x <= 1.0, "must lie in (0, 1]"),
            "k": (0, int, lambda n: 0 <= n <= 2, "must be 0, 1, or 2"),
            "n_samples": (100, int, _positive, "must be positive"),
            "t": (0.0, float, _nonneg, "must be non-negative"),
        },
    },
    "smoothing-ladder": None,  # shares the sim2d schema, filled below
}

_SCHEMAS["smoothing-ladder"] = {
    **_SCHEMAS["sim2d"],
    "ladder": {
        "cap": (3, int, lambda n: 0 <= n <= 3, "must lie in 0..3"),
    },
}


class ConfigError(ValueError):
    """Invalid scenario configuration, with a path-qualified message."""


@dataclass
class ScenarioConfig:
    """Validated, default-filled experiment description."""

    kind: str
    sections: dict
    seed: int = 0

    def __getitem__(self, path: str):
        section, key = path.split(".")
        return self.sections[section][key]

    def echo(self) -> str:
        """Effective config as JSON; re-parsing it reproduces this config."""
        doc = {"kind": self.kind, "seed": self.seed}
        doc.update(self.sections)
        return json.dumps(doc, indent=2, sort_keys=True)


def _coerce(value, typ, path):
    if typ is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number, got {value!r}")
        return float(value)
    if typ is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return value
    if typ is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{path}: expected true/false, got {value!r}")
        return value
    if typ is str:
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string, got {value!r}")
        return value
    if typ is list:
        if not isinstance(value, list):
            raise ConfigError(f"{path}: expected a list, got {value!r}")
        return list(value)
    raise AssertionError(typ)


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a JSON scenario document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"malformed JSON: {e}") from e
    if not isinstance(doc, dict):
        raise ConfigError("top level must be a JSON object")

    kind = doc.pop("kind", "sim2d")
    if kind not in KINDS:
        raise ConfigError(f"kind: unknown experiment kind {kind!r}")
    seed = doc.pop("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"seed: expected a non-negative integer, got {seed!r}")

    schema = _SCHEMAS[kind]
    sections = {}
    for sec_name, sec_schema in schema.items():
        given = doc.pop(sec_name, {})
        if not isinstance(given, dict):
            raise ConfigError(f"{sec_name}: expected an object")
        out = {}
        for key, (default, typ, pred, why) in sec_schema.items():
            if key in given:
                val = _coerce(given.pop(key), typ, f"{sec_name}.{key}")
                if pred is not None and not pred(val):
                    raise ConfigError(f"{sec_name}.{key}: {why}, got {val!r}")
                out[key] = val
            else:
                out[key] = default
        if given:
            extra = sorted(given)[0]
            raise ConfigError(f"{sec_name}.{extra}: unknown key")
        sections[sec_name] = out
    if doc:
        extra = sorted(doc)[0]
        raise ConfigError(f"{extra}: unknown key")
    return ScenarioConfig(kind=kind, sections=sections, seed=seed)

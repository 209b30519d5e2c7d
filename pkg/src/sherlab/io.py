"""Series, checkpoint, and profile persistence.

CSV series are written with 17 significant decimal digits so that
parse(print(x)) is the identity for 64-bit floats.  Checkpoints pair a
JSON header (shapes, dtypes, time, endianness) with a raw binary payload;
load(save(state)) is bitwise exact, which is what makes restarted runs
reproduce the uninterrupted run's output.
"""

import json
import os

import numpy as np

from .fields import SpectralField
from .grid import make_grid
from .norms import NormReport
from .solver2d import State2D

_CHECKPOINT_VERSION = 1


class CheckpointError(RuntimeError):
    """Corrupt or incompatible checkpoint."""


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_series(report: NormReport, path: str) -> None:
    """Write a report as CSV: fixed header row, one row per sample."""
    with open(path, "w") as fh:
        fh.write(",".join(report.header) + "\n")
        cols = list(report.columns.values())
        for i in range(len(report)):
            row = [report.times[i]] + [c[i] for c in cols]
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_series(path: str) -> NormReport:
    """Read a CSV series back into a report."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    if header[0] != "t":
        raise ValueError(f"{path}: series must start with a 't' column")
    data = np.array([[float(v) for v in row] for row in rows]) if rows else np.zeros(
        (0, len(header))
    )
    return NormReport(
        data[:, 0], {name: data[:, j + 1] for j, name in enumerate(header[1:])}
    )


def save_checkpoint(state: State2D, path: str) -> None:
    """Write a 2D solver state as JSON header + raw float64 payload."""
    g = state.u.grid
    fields = {"u": state.u.modes}
    if state.u_prev is not None:
        fields["u_prev"] = state.u_prev
        fields["adv_prev"] = state.adv_prev
    header = {
        "version": _CHECKPOINT_VERSION,
        "kind": "state2d",
        "endianness": "<",
        "t": state.t,
        "dt": state.dt,
        "step_index": state.step_index,
        "grid": {
            "L_x": g.L_x,
            "N_x": g.N_x,
            "Z_max": g.Z_max,
            "N_z": g.N_z,
            "stretch": g.stretch,
        },
        "fields": [
            {"name": name, "shape": list(arr.shape), "dtype": str(arr.dtype)}
            for name, arr in fields.items()
        ],
    }
    with open(path, "w") as fh:
        json.dump(header, fh)
    with open(_payload_path(path), "wb") as fh:
        for arr in fields.values():
            fh.write(np.ascontiguousarray(arr).astype("<c16", copy=False).tobytes())


def _payload_path(path: str) -> str:
    return os.path.splitext(path)[0] + ".bin"


def load_checkpoint(path: str) -> State2D:
    """Load a 2D solver state; raises on any header/payload mismatch."""
    with open(path) as fh:
        header = json.load(fh)
    if header.get("version") != _CHECKPOINT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {header.get('version')}")
    if header.get("kind") != "state2d":
        raise CheckpointError(f"unsupported checkpoint kind {header.get('kind')}")
    gd = header["grid"]
    grid = make_grid(
        L_x=gd["L_x"], N_x=gd["N_x"], Z_max=gd["Z_max"], N_z=gd["N_z"],
        stretch=gd["stretch"],
    )
    with open(_payload_path(path), "rb") as fh:
        raw = fh.read()
    arrays = {}
    offset = 0
    for spec in header["fields"]:
        shape = tuple(spec["shape"])
        n_bytes = int(np.prod(shape)) * np.dtype(spec["dtype"]).itemsize
        chunk = raw[offset : offset + n_bytes]
        if len(chunk) != n_bytes:
            raise CheckpointError("payload truncated; refusing partial state")
        arrays[spec["name"]] = np.frombuffer(chunk, dtype="<c16").reshape(shape).copy()
        offset += n_bytes
    if offset != len(raw):
        raise CheckpointError("payload longer than the header declares")
    return State2D(
        t=header["t"],
        u=SpectralField(arrays["u"], grid),
        dt=header["dt"],
        step_index=header["step_index"],
        u_prev=arrays.get("u_prev"),
        adv_prev=arrays.get("adv_prev"),
    )


def load_profile_csv(path: str) -> tuple:
    """Read a two-column (z, value) CSV profile."""
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    if data.ndim != 2 or data.shape[1] != 2:
        raise ValueError(f"{path}: expected two columns (z, value)")
    return data[:, 0], data[:, 1]

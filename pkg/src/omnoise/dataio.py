"""File formats for trajectories, spectra and metrics.

All data files are deterministic for a given run: floats are written with
repr-faithful precision, JSON keys are sorted, and no timestamps enter data
files.  The binary trajectory container is a text header (canonical-JSON
metadata) followed by raw little-endian float64 columns.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from .sde import Trajectory
from .spectral import Spectrum

BINARY_MAGIC = "#omnoise-trajectory 1"


def canonical_json(obj) -> str:
    """Deterministic JSON encoding used for hashing and binary headers."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def meta_hash(meta: dict) -> str:
    """sha256 of the canonical metadata encoding; the provenance key of a run."""
    return hashlib.sha256(canonical_json(meta).encode()).hexdigest()


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def trajectory_to_csv(traj: Trajectory, path) -> None:
    """Columns ``t,x[,p,re_a,im_a]``; times reconstructed from t0 and dt_sample."""
    cols = traj.columns()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", *cols.keys()])
        times = traj.times
        for k in range(len(traj.x)):
            writer.writerow([_fmt(times[k]), *(_fmt(c[k]) for c in cols.values())])


def trajectory_to_binary(traj: Trajectory, path) -> None:
    cols = traj.columns()
    header = "\n".join([
        BINARY_MAGIC,
        "meta=" + canonical_json(traj.meta),
        "columns=" + ",".join(cols.keys()),
        f"n_samples={len(traj.x)}",
        "end-header",
        "",
    ])
    with open(path, "wb") as fh:
        fh.write(header.encode())
        for arr in cols.values():
            fh.write(np.asarray(arr, dtype="<f8").tobytes())


def trajectory_from_binary(path) -> Trajectory:
    raw = Path(path).read_bytes()
    head_end = raw.index(b"end-header\n") + len(b"end-header\n")
    lines = raw[:head_end].decode().splitlines()
    if lines[0] != BINARY_MAGIC:
        raise ValueError(f"not an omnoise trajectory container: {path}")
    fields = dict(line.split("=", 1) for line in lines[1:-1])
    meta = json.loads(fields["meta"])
    columns = fields["columns"].split(",")
    n = int(fields["n_samples"])

    payload = np.frombuffer(raw[head_end:], dtype="<f8")
    if len(payload) != n * len(columns):
        raise ValueError(f"payload size mismatch in {path}")
    data = {name: payload[i * n:(i + 1) * n].copy() for i, name in enumerate(columns)}
    return Trajectory(t0=meta["t0"], dt_sample=meta["dt_sample"], x=data["x"],
                      p=data.get("p"), re_a=data.get("re_a"), im_a=data.get("im_a"),
                      meta=meta)


def spectrum_to_csv(spec: Spectrum, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["nu", "psd"])
        for nu, p in zip(spec.freq, spec.psd):
            writer.writerow([_fmt(nu), _fmt(p)])


def _json_default(o):
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o)}")


def write_json(obj: dict, path) -> None:
    Path(path).write_text(json.dumps(obj, sort_keys=True, indent=2,
                                     default=_json_default) + "\n")


def rows_to_csv(path, header: list[str], rows: list[list]) -> None:
    """Generic deterministic CSV writer; floats get repr-faithful formatting."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) if isinstance(v, float) else v for v in row])

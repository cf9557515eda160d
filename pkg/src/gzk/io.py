"""Binary Field records and trajectory checkpoints.

Field record (little endian, version 1)::

    offset  size  content
    0       4     magic b"GZKF"
    4       2     uint16 format version (1)
    6       1     uint8 representation tag (0 physical, 1 spectral)
    7       1     reserved, 0
    8       4     uint32 nx
    12      4     uint32 ny
    16      8     float64 lx
    24      8     float64 ly
    32      16*nx*ny  complex128 values, row-major with x the slow index

A trajectory checkpoint is a directory holding one record per sample plus
``manifest.json`` with the times, the file names and a config hash.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .grid import Field, GridSpec
from .norms import Trajectory

__all__ = [
    "field_to_bytes",
    "field_from_bytes",
    "save_field",
    "load_field",
    "save_trajectory",
    "load_trajectory",
]

MAGIC = b"GZKF"
VERSION = 1
_HEADER = struct.Struct("<4sHBBIIdd")
_TAGS = {"physical": 0, "spectral": 1}


def field_to_bytes(f: Field) -> bytes:
    g = f.grid
    head = _HEADER.pack(MAGIC, VERSION, _TAGS[f.kind], 0, g.nx, g.ny, g.lx, g.ly)
    return head + np.ascontiguousarray(f.values, dtype="<c16").tobytes()


def field_from_bytes(buf: bytes) -> Field:
    if len(buf) < _HEADER.size:
        raise ValueError("truncated field record")
    magic, version, tag, _, nx, ny, lx, ly = _HEADER.unpack_from(buf)
    if magic != MAGIC:
        raise ValueError("not a field record")
    if version != VERSION:
        raise ValueError(f"unsupported field record version {version}")
    kinds = {v: k for k, v in _TAGS.items()}
    if tag not in kinds:
        raise ValueError(f"unknown representation tag {tag}")
    body = buf[_HEADER.size :]
    if len(body) != 16 * nx * ny:
        raise ValueError("field record size does not match its header")
    values = np.frombuffer(body, dtype="<c16").reshape(nx, ny)
    return Field(GridSpec(nx, ny, lx, ly), values, kinds[tag])


def save_field(f: Field, path) -> None:
    Path(path).write_bytes(field_to_bytes(f))


def load_field(path) -> Field:
    return field_from_bytes(Path(path).read_bytes())


def save_trajectory(traj: Trajectory, directory, config_hash: str = "") -> Path:
    """Write one record per sample and a manifest; returns the manifest path."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    names = []
    for m, f in enumerate(traj):
        name = f"field_{m:05d}.gzkf"
        save_field(f, d / name)
        names.append(name)
    manifest = {
        "format": "gzk-trajectory",
        "version": VERSION,
        "times": [float(t) for t in traj.times],
        "fields": names,
        "config_hash": config_hash,
    }
    path = d / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return path


def load_trajectory(directory) -> tuple[Trajectory, str]:
    """Read a checkpoint; returns the trajectory and its config hash."""
    d = Path(directory)
    manifest = json.loads((d / "manifest.json").read_text())
    if manifest.get("format") != "gzk-trajectory":
        raise ValueError("not a trajectory manifest")
    fields = [load_field(d / name) for name in manifest["fields"]]
    return Trajectory.from_fields(manifest["times"], fields), manifest.get("config_hash", "")

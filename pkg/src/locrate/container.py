"""Deterministic on-disk artifacts.

Environments and maps are stored in a small versioned binary container:
an 8-byte magic, an 8-byte little-endian header length, a canonical JSON
header (metadata plus array descriptors), then the raw C-order array bytes
in descriptor order.  The same logical content always produces the same
bytes, which makes artifact digests reproducible across reruns and thread
counts.  A human-readable JSON sidecar mirrors the metadata.

CSV emitters use a fixed shortest-roundtrip float format for the same
reason.
"""

from __future__ import annotations

import dataclasses
import json
import struct
from pathlib import Path

import numpy as np

from .environment import (EnvConfig, EnvironmentMap, GridGeometry,
                          OutageCapacityMap)

MAGIC = b"LRCONT01"
FORMAT_VERSION = 1

_ALLOWED_DTYPES = {"float64", "complex128", "int64", "bool"}


class ContainerCorrupt(RuntimeError):
    """Container failed magic, schema, or size validation."""


def _canonical(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()


def save_arrays(path, meta: dict, arrays: dict[str, np.ndarray]) -> None:
    """Write a container with the given metadata and named arrays."""
    descriptors = []
    blobs = []
    for name in sorted(arrays):
        arr = np.ascontiguousarray(arrays[name])
        if arr.dtype.name not in _ALLOWED_DTYPES:
            raise ValueError(f"unsupported dtype {arr.dtype} for array {name!r}")
        descriptors.append({"name": name, "dtype": arr.dtype.name,
                            "shape": list(arr.shape)})
        blobs.append(arr.tobytes())
    header = _canonical({"version": FORMAT_VERSION, "meta": meta,
                         "arrays": descriptors})
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", len(header)))
        fh.write(header)
        for blob in blobs:
            fh.write(blob)
    sidecar = Path(str(path) + ".json")
    sidecar.write_bytes(json.dumps({"version": FORMAT_VERSION, "meta": meta,
                                    "arrays": descriptors},
                                   sort_keys=True, indent=2).encode() + b"\n")


def load_arrays(path) -> tuple[dict, dict[str, np.ndarray]]:
    """Read a container; raises ContainerCorrupt on any structural problem."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise FileNotFoundError(str(exc)) from exc
    if len(raw) < 16 or raw[:8] != MAGIC:
        raise ContainerCorrupt(f"{path}: bad magic")
    (hlen,) = struct.unpack("<Q", raw[8:16])
    if 16 + hlen > len(raw):
        raise ContainerCorrupt(f"{path}: truncated header")
    try:
        header = json.loads(raw[16:16 + hlen])
    except json.JSONDecodeError as exc:
        raise ContainerCorrupt(f"{path}: invalid header JSON") from exc
    if header.get("version") != FORMAT_VERSION:
        raise ContainerCorrupt(f"{path}: unsupported version {header.get('version')}")
    offset = 16 + hlen
    arrays: dict[str, np.ndarray] = {}
    for desc in header["arrays"]:
        dtype = desc["dtype"]
        if dtype not in _ALLOWED_DTYPES:
            raise ContainerCorrupt(f"{path}: unsupported dtype {dtype}")
        shape = tuple(desc["shape"])
        nbytes = int(np.dtype(dtype).itemsize * np.prod(shape, dtype=np.int64))
        if offset + nbytes > len(raw):
            raise ContainerCorrupt(f"{path}: truncated array {desc['name']!r}")
        arrays[desc["name"]] = np.frombuffer(
            raw[offset:offset + nbytes], dtype=dtype).reshape(shape).copy()
        offset += nbytes
    if offset != len(raw):
        raise ContainerCorrupt(f"{path}: trailing bytes")
    return header["meta"], arrays


def _grid_meta(grid: GridGeometry) -> dict:
    return {"x_start": grid.x_start, "y_start": grid.y_start,
            "spacing": grid.spacing, "nx": grid.nx, "ny": grid.ny,
            "n_pad": grid.n_pad}


def _grid_from_meta(meta: dict) -> GridGeometry:
    return GridGeometry(x_start=float(meta["x_start"]),
                        y_start=float(meta["y_start"]),
                        spacing=float(meta["spacing"]), nx=int(meta["nx"]),
                        ny=int(meta["ny"]), n_pad=int(meta["n_pad"]))


def save_environment(path, env: EnvironmentMap) -> None:
    meta = {
        "kind": "environment",
        "grid": _grid_meta(env.grid),
        "ue_height": env.ue_height,
        "seed": env.seed,
        "config": dataclasses.asdict(env.config) if env.config else None,
    }
    save_arrays(path, meta, {
        "bs_positions": env.bs_positions,
        "amplitudes": env.amplitudes,
        "delays": env.delays,
    })


def load_environment(path) -> EnvironmentMap:
    meta, arrays = load_arrays(path)
    if meta.get("kind") != "environment":
        raise ContainerCorrupt(f"{path}: not an environment container")
    cfg = None
    if meta.get("config"):
        raw_cfg = dict(meta["config"])
        raw_cfg["cell"] = tuple(raw_cfg["cell"])
        raw_cfg["bs_positions"] = tuple(tuple(b) for b in raw_cfg["bs_positions"])
        cfg = EnvConfig(**raw_cfg)
    try:
        return EnvironmentMap(
            grid=_grid_from_meta(meta["grid"]),
            bs_positions=arrays["bs_positions"],
            ue_height=float(meta["ue_height"]),
            amplitudes=arrays["amplitudes"],
            delays=arrays["delays"],
            seed=int(meta["seed"]),
            config=cfg,
        )
    except KeyError as exc:
        raise ContainerCorrupt(f"{path}: missing field {exc}") from exc


def save_capacity_map(path, cmap: OutageCapacityMap, seed: int) -> None:
    meta = {"kind": "capacity_map", "grid": _grid_meta(cmap.grid),
            "eps": cmap.eps, "sample_count": cmap.sample_count, "seed": seed}
    save_arrays(path, meta, {"values": cmap.values})


def load_capacity_map(path) -> OutageCapacityMap:
    meta, arrays = load_arrays(path)
    if meta.get("kind") != "capacity_map":
        raise ContainerCorrupt(f"{path}: not a capacity-map container")
    return OutageCapacityMap(grid=_grid_from_meta(meta["grid"]),
                             values=arrays["values"], eps=float(meta["eps"]),
                             sample_count=int(meta["sample_count"]))


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_csv(path, comment: str, header: list[str],
              columns: list[np.ndarray]) -> None:
    """Plain CSV with one leading '#' comment line; deterministic bytes."""
    n = len(columns[0])
    lines = [f"# {comment}", ",".join(header)]
    for i in range(n):
        lines.append(",".join(_fmt(col[i]) for col in columns))
    Path(path).write_bytes(("\n".join(lines) + "\n").encode())


def write_capacity_csv(path, cmap: OutageCapacityMap, seed: int) -> None:
    pts = cmap.grid.points()
    write_csv(path,
              f"eps={_fmt(cmap.eps)} samples={cmap.sample_count} seed={seed}",
              ["x", "y", "c_eps"],
              [pts[:, 0], pts[:, 1], cmap.values.ravel()])


def write_peb_csv(path, grid: GridGeometry, cov: np.ndarray, peb: np.ndarray,
                  m_draws: int, seed: int) -> None:
    pts = grid.points()
    write_csv(path, f"m_draws={m_draws} seed={seed}",
              ["x", "y", "peb", "s11", "s12", "s22"],
              [pts[:, 0], pts[:, 1], peb,
               cov[:, 0, 0], cov[:, 0, 1], cov[:, 1, 1]])


def write_report_csv(path, points: np.ndarray, meta: np.ndarray,
                     throughput: np.ndarray, comment: str) -> None:
    write_csv(path, comment, ["x", "y", "meta", "throughput"],
              [points[:, 0], points[:, 1], meta, throughput])


def write_json(path, payload: dict) -> None:
    Path(path).write_bytes(
        json.dumps(payload, sort_keys=True, indent=2).encode() + b"\n")

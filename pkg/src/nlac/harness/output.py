"""File output: energy CSV, binary snapshots with JSON manifests, error tables."""

from __future__ import annotations

import csv
import datetime
import json
import platform
from pathlib import Path
from typing import Optional

import numpy as np

from .. import __version__
from ..spectral import Grid
from ..stepper import EnergyTrace

__all__ = [
    "ENERGY_HEADER",
    "ERROR_HEADER",
    "OutputError",
    "write_energy_csv",
    "write_error_csv",
    "write_snapshot",
    "read_snapshot",
    "write_outputs",
]

ENERGY_HEADER = ("step", "time", "energy", "fp_iters", "convolutions")
ERROR_HEADER = ("tau", "error", "order")
SNAPSHOT_DTYPE = "<f8"


class OutputError(OSError):
    """An output file could not be written; the message carries the path."""


def _guard(path: Path, func):
    try:
        return func()
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def write_energy_csv(trace: Optional[EnergyTrace], path) -> Path:
    """One row per recorded step; an empty trace gives the header only.

    The step-0 energy, when present, is written with zero iterations and
    convolutions.
    """
    path = Path(path)

    def body():
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(ENERGY_HEADER)
            if trace is None:
                return
            if trace.initial_energy is not None:
                w.writerow([0, _fmt(0.0), _fmt(trace.initial_energy), 0, 0])
            for r in trace.records:
                w.writerow([r.step, _fmt(r.time), _fmt(r.energy), r.fp_iters, r.convolutions])

    _guard(path, body)
    return path


def write_error_csv(table, path) -> Path:
    """Error table ``tau,error,order``; the first row has an empty order."""
    path = Path(path)

    def body():
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(ERROR_HEADER)
            for row in table.rows:
                w.writerow([_fmt(row.tau), _fmt(row.error), _fmt(row.order)])

    _guard(path, body)
    return path


def write_snapshot(u: np.ndarray, grid: Grid, path, meta: Optional[dict] = None) -> tuple:
    """Write ``u`` as row-major little-endian float64 plus a ``.json`` sidecar.

    Returns ``(bin_path, manifest_path)``.
    """
    grid.check(u)
    path = Path(path)
    data = np.ascontiguousarray(u, dtype=SNAPSHOT_DTYPE)
    manifest = {
        "format": "float64-le-row-major",
        "extents": list(grid.extents),
        "counts": list(grid.counts),
        "bytes": int(data.nbytes),
        **(meta or {}),
        "created": {
            "utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "package_version": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
        },
    }
    side = path.with_suffix(".json")
    _guard(path, lambda: path.write_bytes(data.tobytes(order="C")))
    _guard(side, lambda: side.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n"))
    return path, side


def read_snapshot(path) -> tuple:
    """Read a snapshot back; returns ``(field, manifest)``."""
    path = Path(path)
    manifest = json.loads(path.with_suffix(".json").read_text())
    flat = np.fromfile(path, dtype=SNAPSHOT_DTYPE)
    return flat.reshape(manifest["counts"]).astype(float), manifest


def write_outputs(report, outdir, cfg=None, fields=None) -> list:
    """Write everything a report carries into ``outdir``.

    ``fields`` is an optional list of ``(name, array, meta)`` extra snapshots.
    Returns the written paths.
    """
    outdir = Path(outdir)
    _guard(outdir, lambda: outdir.mkdir(parents=True, exist_ok=True))
    meta = cfg.to_dict() if cfg is not None else {}
    grid = cfg.grid if cfg is not None else None
    written = []

    if report.result is not None or report.kind == "evolve":
        written.append(write_energy_csv(report.trace, outdir / "energy.csv"))
    if report.result is not None:
        for i, snap in enumerate(report.result.snapshots):
            extra = {**meta, "requested_time": snap.requested, "step": snap.step, "time": snap.time}
            written.extend(write_snapshot(snap.u, grid, outdir / f"snapshot_{i:03d}.bin", extra))
    if report.coupled is not None:
        for i, (t, step, u, theta) in enumerate(report.coupled.snapshots):
            extra = {**meta, "requested_time": t, "step": step, "time": step * cfg.coupled.tau}
            written.extend(write_snapshot(u, grid, outdir / f"phase_{i:03d}.bin", extra))
            written.extend(write_snapshot(theta, grid, outdir / f"temperature_{i:03d}.bin", extra))
        path = outdir / "liquid_fraction.csv"

        def body():
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(("step", "liquid_fraction"))
                for k, f in enumerate(report.coupled.liquid_fraction):
                    w.writerow([k, _fmt(f)])

        _guard(path, body)
        written.append(path)
    for name, table in report.tables.items():
        written.append(write_error_csv(table, outdir / f"errors_{name}.csv"))
        if report.kind == "cost":
            path = outdir / f"cost_{name}.csv"

            def body(table=table, path=path):
                with open(path, "w", newline="") as fh:
                    w = csv.writer(fh, lineterminator="\n")
                    w.writerow(("tau", "convolutions", "error"))
                    for row in table.rows:
                        w.writerow([_fmt(row.tau), row.convolutions, _fmt(row.error)])

            _guard(path, body)
            written.append(path)
    for name, array, extra in fields or ():
        g = grid if grid is not None else extra.pop("grid")
        written.extend(write_snapshot(array, g, outdir / f"{name}.bin", {**meta, **extra}))

    summary = {
        "kind": report.kind,
        "convolutions": report.convolutions,
        "wall_time": report.wall_time,
        "meta": report.meta,
        "slopes": {name: t.slope for name, t in report.tables.items()},
        "config": meta,
    }
    path = outdir / "report.json"
    _guard(path, lambda: path.write_text(json.dumps(summary, indent=2, sort_keys=True, default=str) + "\n"))
    written.append(path)
    return written

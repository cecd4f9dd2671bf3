"""Plot-ready field files: CSV lattices, legacy VTK and run manifests.

Floats are written with ``repr`` so a CSV round trip is bit exact.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .grid import LATTICES, VARIABLES, DofField, Grid

__all__ = ["write_field", "read_field", "write_vtk", "write_manifest", "write_radial_scatter"]

_POINT_LATTICES = ("node", "ev", "eh")


def _companion(path: Path, lattice: str) -> Path:
    return path.with_name(f"{path.stem}_{lattice}{path.suffix}")


def _meta_path(path: Path) -> Path:
    return path.with_suffix(".json")


def _write_lattice(path: Path, grid: Grid, lattice: str, data: np.ndarray) -> None:
    x, y = grid.coordinates(lattice)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["i", "j", "x", "y", *VARIABLES])
        for i in range(grid.nx):
            for j in range(grid.ny):
                w.writerow([i, j, repr(float(x[i, j])), repr(float(y[i, j])),
                            *(repr(float(data[k, i, j])) for k in range(len(VARIABLES)))])


def write_field(f: DofField, path, fmt: str = "csv") -> list[Path]:
    """Write a field; returns the files written.

    ``csv`` writes the cell averages to ``path`` (columns i, j, x, y, p, u, v
    with x, y the cell centre), one companion file per point lattice
    (``<stem>_node.csv`` and so on) and a JSON file with the grid and time.
    ``vtk`` writes a legacy structured-points file of the cell averages.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "vtk":
        write_vtk(f, path)
        return [path]
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    written = [path]
    _write_lattice(path, f.grid, "avg", f.avg)
    for name in _POINT_LATTICES:
        p = _companion(path, name)
        _write_lattice(p, f.grid, name, getattr(f, name))
        written.append(p)
    g = f.grid
    meta = {"nx": g.nx, "ny": g.ny, "dx": g.dx, "dy": g.dy, "c": g.c,
            "origin": list(g.origin), "time": f.time}
    meta_path = _meta_path(path)
    meta_path.write_text(json.dumps(meta, sort_keys=True, indent=1) + "\n")
    written.append(meta_path)
    return written


def _read_lattice(path: Path, grid: Grid) -> np.ndarray:
    out = np.zeros((len(VARIABLES), grid.nx, grid.ny))
    with open(path, newline="") as fh:
        rows = csv.reader(fh)
        next(rows)
        for row in rows:
            i, j = int(row[0]), int(row[1])
            out[:, i, j] = [float(v) for v in row[4:]]
    return out


def read_field(path) -> DofField:
    """Inverse of the CSV branch of :func:`write_field`."""
    path = Path(path)
    meta = json.loads(_meta_path(path).read_text())
    grid = Grid(meta["nx"], meta["ny"], meta["dx"], meta["dy"], meta["c"], tuple(meta["origin"]))
    arrays = {"avg": _read_lattice(path, grid)}
    for name in _POINT_LATTICES:
        arrays[name] = _read_lattice(_companion(path, name), grid)
    return DofField(grid, time=meta["time"], **{k: arrays[k] for k in LATTICES})


def write_vtk(f: DofField, path) -> None:
    """Legacy ASCII VTK, cell data on a structured-points grid (x index fastest)."""
    g = f.grid
    lines = [
        "# vtk DataFile Version 3.0",
        f"active flux field t={f.time!r}",
        "ASCII",
        "DATASET STRUCTURED_POINTS",
        f"DIMENSIONS {g.nx + 1} {g.ny + 1} 1",
        f"ORIGIN {g.origin[0]!r} {g.origin[1]!r} 0.0",
        f"SPACING {g.dx!r} {g.dy!r} 1.0",
        f"CELL_DATA {g.nx * g.ny}",
    ]
    speed = np.hypot(f.avg[1], f.avg[2])
    for name, data in (*zip(VARIABLES, f.avg), ("speed", speed)):
        lines.append(f"SCALARS {name} double 1")
        lines.append("LOOKUP_TABLE default")
        lines.extend(repr(float(v)) for v in data.T.ravel())
    Path(path).write_text("\n".join(lines) + "\n")


def write_manifest(path, **info) -> None:
    Path(path).write_text(json.dumps(info, sort_keys=True, indent=1, default=float) + "\n")


def write_radial_scatter(f: DofField, path, center=(0.0, 0.0), var: int = 0) -> None:
    """Rows ``(lattice, r, value)`` for every average and point value."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["lattice", "r", VARIABLES[var]])
        for name in ("avg", *_POINT_LATTICES):
            x, y = f.grid.coordinates(name)
            r = np.hypot(x - center[0], y - center[1])
            data = getattr(f, name)[var]
            for rr, val in zip(r.ravel(), data.ravel()):
                w.writerow([name, repr(float(rr)), repr(float(val))])

"""Cartesian grid and the four staggered degree-of-freedom lattices.

Every cell ``(i, j)`` owns

* its cell average ``avg[:, i, j]``,
* its lower-left node ``node[:, i, j]``,
* the midpoint of its left (vertical) edge ``ev[:, i, j]``,
* the midpoint of its bottom (horizontal) edge ``eh[:, i, j]``.

The leading axis of every lattice holds the variables ``(p, u, v)``.  Indices
are periodic.  Inside a cell the eight boundary values are numbered
counterclockwise starting at the lower-left corner; even numbers are edge
midpoints::

    7 --- 6 --- 5
    |           |
    8     9     4
    |           |
    1 --- 2 --- 3
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "NVARS",
    "VARIABLES",
    "LATTICES",
    "BOUNDARY_POINTS",
    "BOUNDARY_SOURCES",
    "Grid",
    "DofField",
    "gather_cell",
    "boundary_values",
    "to_reference",
]

NVARS = 3
VARIABLES = ("p", "u", "v")
# order of the lattice blocks in a Fourier state vector
LATTICES = ("avg", "eh", "ev", "node")

# reference coordinates of boundary points m = 1..8
BOUNDARY_POINTS = (
    (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0),
)

# (lattice, di, dj) storage entry holding boundary point m of cell (i, j)
BOUNDARY_SOURCES = (
    ("node", 0, 0),
    ("eh", 0, 0),
    ("node", 1, 0),
    ("ev", 1, 0),
    ("node", 1, 1),
    ("eh", 0, 1),
    ("node", 0, 1),
    ("ev", 0, 0),
)


@dataclass(frozen=True)
class Grid:
    """Uniform periodic Cartesian grid.

    ``origin`` is the lower-left corner of cell (0, 0).
    """

    nx: int
    ny: int
    dx: float
    dy: float
    c: float = 1.0
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise ValueError(f"grid needs at least 3x3 cells, got {self.nx}x{self.ny}")
        if not (self.dx > 0 and self.dy > 0):
            raise ValueError("cell widths must be positive")
        if not self.c > 0:
            raise ValueError("sound speed must be positive")

    @classmethod
    def from_extent(cls, nx, ny, lower=(0.0, 0.0), upper=(1.0, 1.0), c=1.0) -> Grid:
        dx = (upper[0] - lower[0]) / nx
        dy = (upper[1] - lower[1]) / ny
        return cls(nx, ny, dx, dy, c, (float(lower[0]), float(lower[1])))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    @property
    def dt_max(self) -> float:
        return min(self.dx, self.dy) / (2.0 * self.c)

    def coordinates(self, lattice: str) -> tuple[np.ndarray, np.ndarray]:
        """Physical positions of the entries of a lattice, arrays of shape (nx, ny)."""
        shift = {
            "avg": (0.5, 0.5),
            "node": (0.0, 0.0),
            "ev": (0.0, 0.5),
            "eh": (0.5, 0.0),
        }[lattice]
        i = np.arange(self.nx, dtype=float)
        j = np.arange(self.ny, dtype=float)
        x = self.origin[0] + (i + shift[0]) * self.dx
        y = self.origin[1] + (j + shift[1]) * self.dy
        return np.meshgrid(x, y, indexing="ij")

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        return self.coordinates("avg")


@dataclass
class DofField:
    """Cell averages and point values on the four lattices, plus the time."""

    grid: Grid
    avg: np.ndarray
    node: np.ndarray
    ev: np.ndarray
    eh: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        shape = (NVARS, self.grid.nx, self.grid.ny)
        for name in LATTICES:
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != shape:
                raise ValueError(f"lattice {name!r} has shape {arr.shape}, expected {shape}")
            setattr(self, name, arr)

    @classmethod
    def zeros(cls, grid: Grid, time: float = 0.0) -> DofField:
        z = lambda: np.zeros((NVARS, grid.nx, grid.ny))  # noqa: E731
        return cls(grid, z(), z(), z(), z(), time)

    @classmethod
    def constant(cls, grid: Grid, state) -> DofField:
        f = cls.zeros(grid)
        for name in LATTICES:
            getattr(f, name)[:] = np.asarray(state, dtype=float)[:, None, None]
        return f

    def lattice(self, name: str) -> np.ndarray:
        return getattr(self, name)

    def copy(self) -> DofField:
        return DofField(self.grid, self.avg.copy(), self.node.copy(), self.ev.copy(),
                        self.eh.copy(), self.time)

    def stacked(self) -> np.ndarray:
        """All lattices as one array of shape (4, 3, nx, ny) in ``LATTICES`` order."""
        return np.stack([getattr(self, name) for name in LATTICES])

    @classmethod
    def from_stacked(cls, grid: Grid, data: np.ndarray, time: float = 0.0) -> DofField:
        arrays = {name: np.array(data[k]) for k, name in enumerate(LATTICES)}
        return cls(grid, time=time, **arrays)

    def norm(self) -> float:
        """Largest absolute value over all lattices."""
        return float(max(np.abs(getattr(self, n)).max() for n in LATTICES))

    def __add__(self, other: DofField) -> DofField:
        return DofField.from_stacked(self.grid, self.stacked() + other.stacked(), self.time)

    def __mul__(self, alpha: float) -> DofField:
        return DofField.from_stacked(self.grid, alpha * self.stacked(), self.time)

    __rmul__ = __mul__


def gather_cell(f: DofField, i: int, j: int) -> tuple[np.ndarray, ...]:
    """Cell average and the eight boundary values ``(qbar, q1, ..., q8)`` of cell (i, j).

    Each entry is a length-3 array ``(p, u, v)``.  Indices wrap periodically.
    """
    nx, ny = f.grid.nx, f.grid.ny
    i %= nx
    j %= ny
    out = [f.avg[:, i, j].copy()]
    for lattice, di, dj in BOUNDARY_SOURCES:
        out.append(getattr(f, lattice)[:, (i + di) % nx, (j + dj) % ny].copy())
    return tuple(out)


def _shift(a: np.ndarray, di: int, dj: int) -> np.ndarray:
    """``result[..., i, j] = a[..., i + di, j + dj]`` with periodic wrap."""
    if di == 0 and dj == 0:
        return a
    return np.roll(a, (-di, -dj), axis=(-2, -1))


def boundary_values(f: DofField) -> np.ndarray:
    """Boundary values of every cell, shape (8, 3, nx, ny), ordered m = 1..8."""
    return np.stack([_shift(getattr(f, lat), di, dj) for lat, di, dj in BOUNDARY_SOURCES])


def to_reference(grid: Grid, x, y):
    """Map cell-local coordinates (origin at the cell centre) to ``[-1, 1]**2``."""
    return 2.0 * np.asarray(x) / grid.dx, 2.0 * np.asarray(y) / grid.dy

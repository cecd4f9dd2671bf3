"""Active flux time stepping for two-dimensional linear acoustics.

One step: reconstruct every cell, evolve the boundary point values to the
half and full time level from the same data, integrate the edge fluxes with
the tensor Simpson rule in space and time, and update the cell averages
conservatively.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from .errors import CFLViolation
from .evolution import StencilSet, build_stencil_set, shifted_coefficients
from .grid import NVARS, DofField, Grid
from .reconstruction import cell_coefficients

__all__ = [
    "DEFAULT_CFL",
    "acoustic_flux",
    "edge_flux_simpson",
    "simpson_average",
    "TimeStepper",
    "initialize",
]

log = logging.getLogger(__name__)

DEFAULT_CFL = 0.45
SIMPSON = (1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0)


def acoustic_flux(q, normal: str, c: float = 1.0) -> np.ndarray:
    """Physical flux of ``(p, u, v)`` (leading axis) along the x or y axis."""
    q = np.asarray(q)
    p, u, v = q[0], q[1], q[2]
    if normal == "x":
        return np.stack([c * u, c * p, np.zeros_like(p)])
    if normal == "y":
        return np.stack([c * v, np.zeros_like(p), c * p])
    raise ValueError(f"normal must be 'x' or 'y', got {normal!r}")


def simpson_average(states):
    """Tensor Simpson average over three time levels of (L, M, R) triples."""
    total = 0.0
    for wt, (left, mid, right) in zip(SIMPSON, states):
        total = total + wt * (SIMPSON[0] * left + SIMPSON[1] * mid + SIMPSON[2] * right)
    return total


def edge_flux_simpson(states, normal: str, c: float = 1.0):
    """Space-time averaged normal flux through one edge.

    ``states`` holds three time levels (n, n+1/2, n+1), each a triple
    ``(L, M, R)`` of endpoint, midpoint and endpoint values.
    """
    fluxes = [[acoustic_flux(q, normal, c) for q in level] for level in states]
    return simpson_average(fluxes)


@dataclass
class TimeStepper:
    """Fixed-step integrator with cached evolution stencils."""

    grid: Grid
    cfl: float = DEFAULT_CFL
    _cache: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        if not 0.0 < self.cfl <= 1.0:
            raise CFLViolation(f"CFL number must lie in (0, 1], got {self.cfl}")

    @property
    def dt(self) -> float:
        return self.cfl * self.grid.dt_max

    def stencils(self, dt: float) -> tuple[StencilSet, StencilSet]:
        """Half- and full-step stencil sets for time step ``dt``."""
        if dt not in self._cache:
            if not 0.0 < dt <= self.grid.dt_max * (1.0 + 1e-12):
                raise CFLViolation(f"time step {dt:.6g} exceeds dt_max {self.grid.dt_max:.6g}")
            c = self.grid.c
            self._cache[dt] = (build_stencil_set(self.grid, 0.5 * c * dt),
                               build_stencil_set(self.grid, c * dt))
        return self._cache[dt]

    def fluxes(self, f: DofField, half: dict, full: dict):
        """Simpson fluxes through the left and bottom edge of every cell."""
        c = self.grid.c
        levels = ({"node": f.node, "ev": f.ev, "eh": f.eh}, half, full)
        # vertical edge of cell (i, j): nodes (i, j) and (i, j+1)
        fx = edge_flux_simpson(
            [(lv["node"], lv["ev"], np.roll(lv["node"], -1, axis=2)) for lv in levels], "x", c)
        # horizontal edge: nodes (i, j) and (i+1, j)
        fy = edge_flux_simpson(
            [(lv["node"], lv["eh"], np.roll(lv["node"], -1, axis=1)) for lv in levels], "y", c)
        return fx, fy

    def step(self, f: DofField, dt: float | None = None) -> DofField:
        dt = self.dt if dt is None else float(dt)
        half_st, full_st = self.stencils(dt)
        shifted = shifted_coefficients(cell_coefficients(f))
        half = half_st.apply_shifted(shifted)
        full = full_st.apply_shifted(shifted)
        fx, fy = self.fluxes(f, half, full)
        g = self.grid
        avg = (f.avg
               - dt / g.dx * (np.roll(fx, -1, axis=1) - fx)
               - dt / g.dy * (np.roll(fy, -1, axis=2) - fy))
        return DofField(g, avg, full["node"], full["ev"], full["eh"], f.time + dt)

    def advance(self, f: DofField, t_end: float, callback: Callable | None = None) -> DofField:
        """Step until ``t_end``; the last step is shortened to land on it exactly."""
        n = 0
        while f.time < t_end * (1.0 - 1e-14):
            dt = min(self.dt, t_end - f.time)
            f = self.step(f, dt)
            n += 1
            if callback is not None:
                callback(n, f)
        return f


def initialize(grid: Grid, data: Callable, time: float = 0.0) -> DofField:
    """Sample ``data(x, y) -> (p, u, v)`` onto the lattices.

    Point values are evaluated at their positions; cell averages use the
    3x3 tensor Simpson rule (weights 1/36, 1/9, 4/9).
    """

    def sample(x, y):
        return np.stack([np.broadcast_to(np.asarray(a, dtype=float), x.shape)
                         for a in data(x, y)])

    f = DofField.zeros(grid, time)
    for name in ("node", "ev", "eh"):
        x, y = grid.coordinates(name)
        getattr(f, name)[:] = sample(x, y)
    xc, yc = grid.cell_centers()
    avg = np.zeros((NVARS,) + grid.shape)
    # integer weights (1, 4, 1) x (1, 4, 1) / 36 keep constants exact
    for wi, oi in zip((1, 4, 1), (-0.5, 0.0, 0.5)):
        for wj, oj in zip((1, 4, 1), (-0.5, 0.0, 0.5)):
            avg += (wi * wj) * sample(xc + oi * grid.dx, yc + oj * grid.dy)
    f.avg[:] = avg / 36.0
    return f

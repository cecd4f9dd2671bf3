"""Exact evolution of node and edge point values by precomputed linear stencils.

The acoustic solution operator at a point ``x`` and time ``tau`` (radius
``rho = c tau``) is

    p = d_r(r M[p0])  -  (1/rho) d_r(r^2 M[v0.n])
    v = v0(x) - (1/rho) d_r(r^2 M[p0 n])
        + int_0^rho (1/r) d_r( (1/r) d_r(r^3 M[(v0.n) n]) - r M[v0] ) dr

with all derivatives evaluated at ``r = rho``.  The reconstruction is
piecewise biquadratic, so every spherical mean is a polynomial in r and the
whole operator collapses to fixed linear weights on the reconstruction
coefficients of the neighbouring cells.

Assembly runs in normalised units where the cell width in x is 2 (so the
radius variable is ``s = 2 r / dx``); the resulting weight polynomials depend
only on the aspect ratio ``dy/dx`` and are cached per ratio.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import AssemblyError, CFLViolation
from .exact import PiRational, as_fraction
from .grid import NVARS, VARIABLES, DofField, Grid
from .reconstruction import BASIS_EXACT, COEFF_SOURCES, cell_coefficients
from .spherical_means import (
    RadialPolynomial,
    Sector,
    ddr,
    div_r,
    integrate_0_to_R,
    sector_mean,
)

__all__ = [
    "TargetClass",
    "EvolutionStencil",
    "StencilSet",
    "build_stencil",
    "build_stencil_set",
    "shifted_coefficients",
    "evolve_points",
    "write_stencil_csv",
]

P, U, V = 0, 1, 2
_WEIGHTS = ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))
_LATTICE_INDEX = {"avg": 0, "eh": 1, "ev": 2, "node": 3}


@dataclass(frozen=True)
class _Contributor:
    di: int
    dj: int
    sector: Sector
    point: tuple[int, int]  # target location in the cell's reference frame


class TargetClass(enum.Enum):
    """Point-value locations, each with the cell sectors covering its sphere."""

    NODE = "node"
    VERTICAL_EDGE = "ev"
    HORIZONTAL_EDGE = "eh"

    @property
    def lattice(self) -> str:
        return self.value

    @property
    def contributors(self) -> tuple[_Contributor, ...]:
        return _CONTRIBUTORS[self]

    @property
    def owner_index(self) -> int:
        """Boundary index m (1..8) of this target in the owning cell (0, 0)."""
        return {"node": 1, "ev": 8, "eh": 2}[self.value]


_CONTRIBUTORS = {
    TargetClass.NODE: (
        _Contributor(0, 0, Sector(0, 1), (-1, -1)),
        _Contributor(-1, 0, Sector(1, 2), (1, -1)),
        _Contributor(-1, -1, Sector(2, 3), (1, 1)),
        _Contributor(0, -1, Sector(3, 4), (-1, 1)),
    ),
    TargetClass.VERTICAL_EDGE: (
        _Contributor(0, 0, Sector(-1, 1), (-1, 0)),
        _Contributor(-1, 0, Sector(1, 3), (1, 0)),
    ),
    TargetClass.HORIZONTAL_EDGE: (
        _Contributor(0, 0, Sector(0, 2), (0, -1)),
        _Contributor(0, -1, Sector(2, 4), (0, 1)),
    ),
}

# a block maps (di, dj, m) -> RadialPolynomial; m is 1-based
_Block = dict


def _basis_means(target: TargetClass, aspect: Fraction) -> dict:
    """Sector means of every basis polynomial for every normal weight.

    Returns ``{weight: {(di, dj, m): RadialPolynomial}}`` in normalised units.
    """
    out = {w: {} for w in _WEIGHTS}
    for con in target.contributors:
        x0 = Fraction(con.point[0])
        y0 = aspect * con.point[1]
        for m, b in enumerate(BASIS_EXACT, start=1):
            for w in _WEIGHTS:
                acc = RadialPolynomial()
                for k in range(3):
                    for l in range(3):
                        if b[k][l]:
                            # xi^k eta^l = x^k (y / aspect)^l in normalised units
                            factor = b[k][l] / aspect**l
                            acc = acc + sector_mean((k, l), w, (x0, y0), con.sector).scale(factor)
                out[w][(con.di, con.dj, m)] = acc
    return out


def _project(functional: dict) -> dict:
    """Map a functional on cell coefficients to one on lattice storage entries."""
    out: dict = {}
    for (di, dj, m), value in functional.items():
        for lat, si, sj, w in COEFF_SOURCES[m - 1]:
            key = (lat, di + si, dj + sj)
            out[key] = out.get(key, PiRational(0)) + value * w
    return {k: v for k, v in out.items() if v}


def _point_term(r: RadialPolynomial) -> RadialPolynomial:
    # d_r(r P)
    return ddr(r.shift(1))


def _normal_term(r: RadialPolynomial) -> RadialPolynomial:
    # (1/r) d_r(r^2 P)
    return div_r(ddr(r.shift(2)))


def _vortical_term(a: _Block, b: _Block | None, what: str) -> _Block:
    """``int_0^R (1/r) d_r((1/r) d_r(r^3 A) - r B) dr`` for every input coefficient.

    Individual sector contributions need not vanish at r = 0 after the outer
    derivative; only their sum over the storage entries does, because the
    reconstruction is continuous at the target.  That sum is checked exactly
    before the constant term is discarded.
    """
    inner = {}
    for key, poly in a.items():
        f = div_r(ddr(poly.shift(3)))
        if b is not None:
            f = f - b[key].shift(1)
        inner[key] = ddr(f)
    residual = _project({k: p.coefficient(0) for k, p in inner.items()})
    if residual:
        raise AssemblyError(f"non-divisible vortical term for {what}: {residual}")
    out = {}
    for key, poly in inner.items():
        trimmed = RadialPolynomial((PiRational(0),) + poly.coeffs[1:])
        out[key] = integrate_0_to_R(div_r(trimmed))
    return out


@lru_cache(maxsize=None)
def _weight_polynomials(target: TargetClass, aspect: Fraction) -> dict:
    """Exact weight polynomials in ``s = 2 rho / dx``, keyed ``(out, in)``."""
    S = _basis_means(target, aspect)
    blocks: dict[tuple[int, int], _Block] = {}
    blocks[(P, P)] = {k: _point_term(v) for k, v in S[(0, 0)].items()}
    blocks[(P, U)] = {k: -_normal_term(v) for k, v in S[(1, 0)].items()}
    blocks[(P, V)] = {k: -_normal_term(v) for k, v in S[(0, 1)].items()}
    blocks[(U, P)] = dict(blocks[(P, U)])
    blocks[(V, P)] = dict(blocks[(P, V)])
    blocks[(U, U)] = _vortical_term(S[(2, 0)], S[(0, 0)], "u<-u")
    blocks[(U, V)] = _vortical_term(S[(1, 1)], None, "u<-v")
    blocks[(V, U)] = dict(blocks[(U, V)])
    blocks[(V, V)] = _vortical_term(S[(0, 2)], S[(0, 0)], "v<-v")

    # point term v0(x), taken from the owning cell; any neighbour sharing the
    # target must reference the same storage entry
    own = (0, 0, target.owner_index)
    neighbour = {
        TargetClass.NODE: (-1, 0, 3),
        TargetClass.VERTICAL_EDGE: (-1, 0, 4),
        TargetClass.HORIZONTAL_EDGE: (0, -1, 6),
    }[target]
    if _project({own: PiRational(1)}) != _project({neighbour: PiRational(1)}):
        raise AssemblyError(f"point term owner disagrees with neighbour for {target}")
    for var in (U, V):
        blk = blocks[(var, var)]
        blk[own] = blk.get(own, RadialPolynomial()) + RadialPolynomial.monomial(0, 1)
    return blocks


@dataclass
class EvolutionStencil:
    """Linear weights producing evolved values at one class of targets.

    ``weights[o, di + 1, dj + 1, m - 1, v]`` multiplies coefficient ``c_m`` of
    variable ``v`` in cell ``(i + di, j + dj)`` and contributes to output
    variable ``o`` at the target owned by cell ``(i, j)``.
    """

    target: TargetClass
    rho: float
    dx: float
    dy: float
    weights: np.ndarray = field(repr=False)

    def apply_shifted(self, shifted: np.ndarray) -> np.ndarray:
        """Apply to the output of :func:`shifted_coefficients`; shape (3, nx, ny)."""
        return np.tensordot(self.weights, shifted, axes=4)

    def apply(self, coeffs: np.ndarray) -> np.ndarray:
        return self.apply_shifted(shifted_coefficients(coeffs))

    def lattice_weights(self) -> dict:
        """Weights on the storage lattices: ``{(lattice, di, dj): array (3 out, 3 in)}``."""
        out: dict = {}
        for a in range(3):
            for b in range(3):
                for m in range(9):
                    w = self.weights[:, a, b, m, :]
                    if not w.any():
                        continue
                    for lat, si, sj, coeff in COEFF_SOURCES[m]:
                        key = (lat, a - 1 + si, b - 1 + sj)
                        out[key] = out.get(key, 0.0) + float(coeff) * w
        return out

    def rows(self):
        """Debug rows ``(out_var, di, dj, m, in_var, weight)``."""
        for o in range(3):
            for a in range(3):
                for b in range(3):
                    for m in range(9):
                        for v in range(3):
                            yield (VARIABLES[o], a - 1, b - 1, m + 1, VARIABLES[v],
                                   float(self.weights[o, a, b, m, v]))


def _check_radius(grid: Grid, rho: float):
    limit = min(grid.dx, grid.dy) / 2.0
    if not (0.0 <= rho <= limit * (1.0 + 1e-12)):
        raise CFLViolation(
            f"evolution radius {rho:.6g} outside [0, {limit:.6g}] (min(dx, dy)/2)"
        )


@lru_cache(maxsize=256)
def _evaluate(target: TargetClass, dx: float, dy: float, rho: float) -> np.ndarray:
    aspect = as_fraction(dy) / as_fraction(dx)
    s = 2 * as_fraction(rho) / as_fraction(dx)
    polys = _weight_polynomials(target, aspect)
    w = np.zeros((NVARS, 3, 3, 9, NVARS))
    for (o, v), block in polys.items():
        for (di, dj, m), poly in block.items():
            w[o, di + 1, dj + 1, m - 1, v] = float(poly.exact_value(s))
    w.setflags(write=False)
    return w


def build_stencil(grid: Grid, rho: float, target: TargetClass) -> EvolutionStencil:
    """Evolution stencil for radius ``rho = c * tau`` at one target class."""
    _check_radius(grid, rho)
    w = _evaluate(target, float(grid.dx), float(grid.dy), float(rho))
    return EvolutionStencil(target, float(rho), grid.dx, grid.dy, w)


@dataclass
class StencilSet:
    """Stencils for all three target classes at a common radius."""

    rho: float
    node: EvolutionStencil
    ev: EvolutionStencil
    eh: EvolutionStencil

    def __iter__(self):
        return iter((self.node, self.ev, self.eh))

    def apply_shifted(self, shifted: np.ndarray) -> dict[str, np.ndarray]:
        return {s.target.lattice: s.apply_shifted(shifted) for s in self}


def build_stencil_set(grid: Grid, rho: float) -> StencilSet:
    return StencilSet(rho, *(build_stencil(grid, rho, t) for t in TargetClass))


def shifted_coefficients(coeffs: np.ndarray) -> np.ndarray:
    """Neighbour coefficients ``X[di+1, dj+1, m, v, i, j] = coeffs[m, v, i+di, j+dj]``."""
    out = np.empty((3, 3) + coeffs.shape, dtype=coeffs.dtype)
    for a, di in enumerate((-1, 0, 1)):
        for b, dj in enumerate((-1, 0, 1)):
            out[a, b] = np.roll(coeffs, (-di, -dj), axis=(-2, -1))
    return out


def evolve_points(f: DofField, half: StencilSet, full: StencilSet):
    """Point values at ``t + dt/2`` and ``t + dt``, both evolved from the data at ``t``.

    Returns two dicts ``{"node": ..., "ev": ..., "eh": ...}`` of (3, nx, ny) arrays.
    """
    shifted = shifted_coefficients(cell_coefficients(f))
    return half.apply_shifted(shifted), full.apply_shifted(shifted)


def write_stencil_csv(stencil: EvolutionStencil, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["out_var", "di", "dj", "m", "in_var", "weight"])
        for row in stencil.rows():
            w.writerow(row[:-1] + (repr(row[-1]),))

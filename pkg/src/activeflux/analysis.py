"""Fourier-symbol analysis of the active flux scheme.

A Fourier mode puts ``q_ij = qhat * t_x**i * t_y**j`` on every lattice, with
``t_x = exp(1j k_x dx)`` and ``t_y = exp(1j k_y dy)``.  Because the scheme is
linear and translation invariant, one step acts on the 12 amplitudes

    (p, u, v, p_eh, u_eh, v_eh, p_ev, u_ev, v_ev, p_node, u_node, v_node)

through a 12x12 amplification matrix, assembled here from the same stencil
weights the solver uses, with grid offsets replaced by phase factors.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateModeError
from .evolution import EvolutionStencil
from .grid import LATTICES, NVARS, DofField, Grid
from .reconstruction import COEFF_SOURCES, cell_coefficients, recon_gradient
from .solver import TimeStepper, edge_flux_simpson

__all__ = [
    "SymbolMatrix",
    "phase_factors",
    "assemble_symbol",
    "stationary_mode",
    "to_storage_phase",
    "mode_field",
    "synthesize_mode",
    "kernel_dimension",
    "stationarity_defect",
    "spectral_radius",
    "discrete_divergences",
    "vorticity_first_order",
    "vorticity_first_order_check",
    "symbol_sweep",
    "write_sweep_csv",
]

NDOF = len(LATTICES) * NVARS
_BLOCK = {name: k for k, name in enumerate(LATTICES)}


def _index(lattice: str, var: int) -> int:
    return NVARS * _BLOCK[lattice] + var


@dataclass
class SymbolMatrix:
    matrix: np.ndarray
    dt: float
    kx: float
    ky: float
    dx: float
    dy: float
    c: float

    @property
    def tx(self) -> complex:
        return complex(np.exp(1j * self.kx * self.dx))

    @property
    def ty(self) -> complex:
        return complex(np.exp(1j * self.ky * self.dy))

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __matmul__(self, other):
        return self.matrix @ other


def phase_factors(kx: float, ky: float, dx: float, dy: float) -> tuple[complex, complex]:
    return complex(np.exp(1j * kx * dx)), complex(np.exp(1j * ky * dy))


def _coefficient_symbol(tx: complex, ty: complex) -> np.ndarray:
    """``K[m, v, :]``: reconstruction coefficient c_m of variable v as a row on Qhat."""
    K = np.zeros((9, NVARS, NDOF), dtype=complex)
    for m, sources in enumerate(COEFF_SOURCES):
        for lat, si, sj, w in sources:
            for v in range(NVARS):
                K[m, v, _index(lat, v)] += float(w) * tx**si * ty**sj
    return K


def _evolution_symbol(stencil: EvolutionStencil, tx, ty, K) -> np.ndarray:
    phase = np.array([[tx**di * ty**dj for dj in (-1, 0, 1)] for di in (-1, 0, 1)])
    return np.einsum("oabmv,ab,mvq->oq", stencil.weights, phase, K)


def _selector(lattice: str) -> np.ndarray:
    sel = np.zeros((NVARS, NDOF), dtype=complex)
    for v in range(NVARS):
        sel[v, _index(lattice, v)] = 1.0
    return sel


def assemble_symbol(stepper: TimeStepper, kx: float, ky: float,
                    dt: float | None = None) -> SymbolMatrix:
    """Amplification matrix of one step of ``stepper`` for wave vector (kx, ky)."""
    g = stepper.grid
    dt = stepper.dt if dt is None else float(dt)
    tx, ty = phase_factors(kx, ky, g.dx, g.dy)
    K = _coefficient_symbol(tx, ty)
    half_st, full_st = stepper.stencils(dt)
    levels = [{name: _selector(name) for name in ("node", "ev", "eh")}]
    for st in (half_st, full_st):
        levels.append({s.target.lattice: _evolution_symbol(s, tx, ty, K) for s in st})
    fx = edge_flux_simpson([(lv["node"], lv["ev"], ty * lv["node"]) for lv in levels], "x", g.c)
    fy = edge_flux_simpson([(lv["node"], lv["eh"], tx * lv["node"]) for lv in levels], "y", g.c)
    avg = _selector("avg") - dt / g.dx * (tx - 1.0) * fx - dt / g.dy * (ty - 1.0) * fy
    full = levels[-1]
    A = np.vstack([avg, full["eh"], full["ev"], full["node"]])
    return SymbolMatrix(A, dt, kx, ky, g.dx, g.dy, g.c)


def stationary_mode(tx: complex, ty: complex, dx: float, dy: float,
                    phase: str = "storage") -> np.ndarray:
    """Amplitudes of the discrete stationary state for translation factors (tx, ty).

    With ``phase="cell"`` the node and edge amplitudes refer to the lattices
    indexed by the cell whose upper-right node and right/top edges they are;
    ``phase="storage"`` re-expresses them for this package's lower-left
    ownership, which is what :func:`assemble_symbol` uses.
    """
    q = np.zeros(NDOF, dtype=complex)
    q[_index("avg", 1)] = -2 / 3 * (1 + 4 * tx + tx**2) / tx * (ty - 1) * (ty + 1) / (dy * ty)
    q[_index("avg", 2)] = 2 / 3 * (1 + 4 * ty + ty**2) / ty * (tx - 1) * (tx + 1) / (dx * tx)
    q[_index("eh", 1)] = -(1 + 6 * tx + tx**2) / tx * (ty - 1) / dy
    q[_index("eh", 2)] = 2 * (tx - 1) * (tx + 1) / (dx * tx) * (ty + 1)
    q[_index("ev", 1)] = -2 * (tx + 1) * (ty - 1) * (ty + 1) / (dy * ty)
    q[_index("ev", 2)] = (tx - 1) / dx * (1 + 6 * ty + ty**2) / ty
    q[_index("node", 1)] = -4 * (tx + 1) * (ty - 1) / dy
    q[_index("node", 2)] = 4 * (tx - 1) / dx * (ty + 1)
    if phase == "cell":
        return q
    if phase == "storage":
        return to_storage_phase(q, tx, ty)
    raise ValueError(f"unknown phase convention {phase!r}")


def to_storage_phase(q: np.ndarray, tx: complex, ty: complex) -> np.ndarray:
    """Convert amplitudes from upper-right to lower-left point ownership."""
    q = np.array(q, dtype=complex)
    q[3:6] /= ty        # bottom edge of (i, j) is the top edge of (i, j-1)
    q[6:9] /= tx        # left edge of (i, j) is the right edge of (i-1, j)
    q[9:12] /= tx * ty  # lower-left node is the upper-right node of (i-1, j-1)
    return q


def mode_field(grid: Grid, qhat: np.ndarray, mx: int, my: int, time: float = 0.0) -> DofField:
    """Real part of ``qhat * t_x**i * t_y**j`` with ``t = exp(2 pi 1j m / n)``."""
    i = np.arange(grid.nx)[:, None]
    j = np.arange(grid.ny)[None, :]
    phase = np.exp(2j * np.pi * (mx * i / grid.nx + my * j / grid.ny))
    data = np.real(np.asarray(qhat).reshape(len(LATTICES), NVARS)[:, :, None, None] * phase)
    return DofField.from_stacked(grid, data, time)


def synthesize_mode(grid: Grid, mx: int, my: int, amplitude: float = 1.0) -> DofField:
    """Discrete stationary state of wave numbers (mx, my) on a periodic grid."""
    if mx % grid.nx == 0 and my % grid.ny == 0:
        raise DegenerateModeError("mode (0, 0) is the constant state; no stationary content")
    tx = np.exp(2j * np.pi * mx / grid.nx)
    ty = np.exp(2j * np.pi * my / grid.ny)
    q = stationary_mode(tx, ty, grid.dx, grid.dy)
    f = mode_field(grid, q, mx, my)
    scale = f.norm()
    if scale == 0.0:
        raise DegenerateModeError(f"mode ({mx}, {my}) has vanishing real part")
    return f * (amplitude / scale)


def _singular_values(A) -> np.ndarray:
    M = np.asarray(A, dtype=complex) - np.eye(NDOF)
    return np.linalg.svd(M, compute_uv=False)


def kernel_dimension(A, tol: float = 1e-9) -> int:
    """Number of singular values of ``A - I`` below ``tol`` times the largest."""
    s = _singular_values(A)
    return int(np.sum(s <= tol * s[0]))


def stationarity_defect(A) -> float:
    """Scaled determinant ``sigma_min / sigma_max`` of ``A - I``.

    ``|det(A - I)|`` divided by the product of all singular values except the
    smallest is ``sigma_min``; dividing by ``sigma_max`` makes it scale free.
    """
    s = _singular_values(A)
    return float(s[-1] / s[0])


def spectral_radius(A) -> float:
    return float(np.abs(np.linalg.eigvals(np.asarray(A, dtype=complex))).max())


def discrete_divergences(f: DofField) -> dict[str, np.ndarray]:
    """The four discrete divergences annihilated by stationary states.

    Written in the upper-right-ownership indexing of the point lattices, i.e.
    on ``N[i,j] = node[i+1,j+1]``, ``EV[i,j] = ev[i+1,j]``, ``EH[i,j] = eh[i,j+1]``.
    """
    g = f.grid

    def sh(a, di, dj):
        return np.roll(a, (-di, -dj), axis=(0, 1))

    N = np.roll(f.node, (-1, -1), axis=(1, 2))
    EV = np.roll(f.ev, -1, axis=1)
    EH = np.roll(f.eh, -1, axis=2)
    uN, vN = N[1], N[2]
    u, v = f.avg[1], f.avg[2]
    uEV, vEV = EV[1], EV[2]
    uEH, vEH = EH[1], EH[2]

    def avg4x(a):
        return sh(a, -1, 0) + 4 * a + sh(a, 1, 0)

    def avg4y(a):
        return sh(a, 0, -1) + 4 * a + sh(a, 0, 1)

    def avg6x(a):
        return sh(a, -1, 0) + 6 * a + sh(a, 1, 0)

    def avg6y(a):
        return sh(a, 0, -1) + 6 * a + sh(a, 0, 1)

    node = ((sh(uN, 1, 1) - sh(uN, 0, 1) + sh(uN, 1, 0) - uN) / g.dx
            + (sh(vN, 1, 1) + sh(vN, 0, 1) - sh(vN, 1, 0) - vN) / g.dy)
    average = ((avg4y(sh(u, 1, 0)) - avg4y(sh(u, -1, 0))) / g.dx
               + (avg4x(sh(v, 0, 1)) - avg4x(sh(v, 0, -1))) / g.dy)
    mixed = ((avg6y(sh(uEH, 1, 0)) - avg6y(uEH)) / g.dx
             + (avg6x(sh(vEV, 0, 1)) - avg6x(vEV)) / g.dy)
    edge = (uEV - sh(uEV, -1, 0)) / g.dx + (vEH - sh(vEH, 0, -1)) / g.dy
    return {"node": node, "avg": average, "edge_mixed": mixed, "edge": edge}


def reconstruction_divergence(f: DofField, points=(-1.0, 0.0, 1.0)) -> np.ndarray:
    """Divergence of the velocity reconstruction at a tensor set of reference points.

    Returns an array (len(points), len(points), nx, ny).
    """
    g = f.grid
    C = cell_coefficients(f)
    out = np.empty((len(points), len(points), g.nx, g.ny))
    for a, xi in enumerate(points):
        for b, eta in enumerate(points):
            dudxi, _ = recon_gradient(C[:, 1], xi, eta)
            _, dvdeta = recon_gradient(C[:, 2], xi, eta)
            out[a, b] = 2.0 / g.dx * dudxi + 2.0 / g.dy * dvdeta
    return out


def vorticity_first_order(tx: complex, ty: complex, dx: float, dy: float) -> np.ndarray:
    """Leading-order left null vector: edge-based vorticity in storage phase.

    Corresponds to ``(v_ev[i+1,j] - v_ev[i,j]) / dx - (u_eh[i,j+1] - u_eh[i,j]) / dy``.
    """
    w = np.zeros(NDOF, dtype=complex)
    w[_index("eh", 1)] = -(ty - 1) / dy
    w[_index("ev", 2)] = (tx - 1) / dx
    return w


def vorticity_first_order_check(stepper: TimeStepper, kx: float, ky: float,
                                fractions=(0.2, 0.1, 0.05, 0.025)):
    """Fitted order of ``||W (A(dt) - I)||`` as ``dt -> 0``.

    Returns ``(order, residuals)`` where residuals are taken at
    ``dt = fraction * dt_max``.
    """
    g = stepper.grid
    tx, ty = phase_factors(kx, ky, g.dx, g.dy)
    w = vorticity_first_order(tx, ty, g.dx, g.dy)
    dts = np.array([fr * g.dt_max for fr in fractions])
    res = np.array([
        np.linalg.norm(w @ (assemble_symbol(stepper, kx, ky, dt).matrix - np.eye(NDOF)))
        for dt in dts
    ])
    order = float(np.polyfit(np.log(dts), np.log(res), 1)[0])
    return order, res


def symbol_sweep(stepper: TimeStepper, n_kx: int = 32, n_ky: int = 32, dt: float | None = None):
    """Rows ``(kx, ky, dt, defect, kernel_dim, spectral_radius)`` over a wave-number grid."""
    g = stepper.grid
    dt = stepper.dt if dt is None else dt
    rows = []
    for a in range(n_kx):
        for b in range(n_ky):
            kx = 2 * math.pi * a / (n_kx * g.dx)
            ky = 2 * math.pi * b / (n_ky * g.dy)
            A = assemble_symbol(stepper, kx, ky, dt)
            rows.append((kx, ky, dt, stationarity_defect(A), kernel_dimension(A), spectral_radius(A)))
    return rows


def write_sweep_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k_x", "k_y", "dt", "det_scaled", "kernel_dim", "spectral_radius"])
        for r in rows:
            w.writerow([repr(float(r[0])), repr(float(r[1])), repr(float(r[2])),
                        repr(float(r[3])), int(r[4]), repr(float(r[5]))])

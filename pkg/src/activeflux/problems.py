"""Test problems, exact reference solutions and a grid convergence harness."""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .grid import DofField, Grid
from .solver import DEFAULT_CFL, TimeStepper, initialize

__all__ = [
    "Problem",
    "PROBLEMS",
    "PROBLEM_DEFAULTS",
    "make_problem",
    "vortex_data",
    "oblique_profile",
    "oblique_data",
    "radial_shock_data",
    "custom_data",
    "oracle_oblique",
    "oracle_radial",
    "edge_l1_error",
    "convergence_study",
    "ConvergenceRow",
]

# oblique waves: direction b = (cos a, sin a) with tan a = 1/2
OBLIQUE_ANGLE = math.atan(0.5)
OBLIQUE_DIRECTION = (math.cos(OBLIQUE_ANGLE), math.sin(OBLIQUE_ANGLE))
OBLIQUE_SPACING = 0.1
OBLIQUE_WIDTH = 0.5 * math.cos(OBLIQUE_ANGLE)
# along b the unit square is periodic with period 1/sqrt(5)
OBLIQUE_PERIOD = 1.0 / math.sqrt(5.0)
_IMAGES = 10


def vortex_data(x, y):
    """Stationary vortex: azimuthal speed 5r up to r = 0.2, 2 - 5r up to 0.4, zero beyond."""
    r = np.hypot(x, y)
    speed = np.where(r <= 0.2, 5 * r, np.where(r <= 0.4, 2 - 5 * r, 0.0))
    with np.errstate(invalid="ignore", divide="ignore"):
        scale = np.where(r > 0, speed / np.where(r > 0, r, 1.0), 0.0)
    return np.zeros_like(r), -y * scale, x * scale


def oblique_profile(s, periodize: bool = True):
    """Pressure profile along the wave direction: five Gaussians of width ``w``.

    With ``periodize`` the profile is summed over translates by the period of
    the unit square along the wave direction, which makes the data exactly
    periodic.
    """
    s = np.asarray(s, dtype=float)
    shifts = range(-_IMAGES, _IMAGES + 1) if periodize else (0,)
    out = np.zeros_like(s)
    for n in shifts:
        for k in range(-2, 3):
            out += np.exp(-((s - n * OBLIQUE_PERIOD - k * OBLIQUE_SPACING) / OBLIQUE_WIDTH) ** 2)
    return out


def oblique_data(periodize: bool = True) -> Callable:
    bx, by = OBLIQUE_DIRECTION

    def data(x, y):
        p = oblique_profile(x * bx + y * by, periodize)
        return p, np.zeros_like(p), np.zeros_like(p)

    return data


def radial_shock_data(x, y, radius: float = 0.2):
    """Pressure 2 inside the circle, 1 outside; points on the circle count as inside."""
    r = np.hypot(x, y)
    # lattice points lying on the circle must not depend on coordinate rounding
    p = np.where(r <= radius * (1 + 1e-12), 2.0, 1.0)
    return p, np.zeros_like(p), np.zeros_like(p)


_SAFE = {name: getattr(np, name) for name in (
    "sin", "cos", "tan", "exp", "log", "sqrt", "hypot", "arctan2", "where", "abs", "pi",
    "tanh", "cosh", "sinh", "minimum", "maximum",
)}


def custom_data(p: str = "0", u: str = "0", v: str = "0") -> Callable:
    """Initial data from numpy expressions in ``x`` and ``y``."""
    codes = [compile(expr, "<custom>", "eval") for expr in (p, u, v)]

    def data(x, y):
        env = dict(_SAFE, x=x, y=y)
        return tuple(np.broadcast_to(eval(code, {"__builtins__": {}}, env), x.shape)
                     for code in codes)

    return data


def oracle_oblique(t, x, y, c: float = 1.0, periodize: bool = True):
    """Exact solution of the oblique-wave problem by characteristics along ``b``."""
    bx, by = OBLIQUE_DIRECTION
    s = np.asarray(x) * bx + np.asarray(y) * by
    left = oblique_profile(s - c * t, periodize)
    right = oblique_profile(s + c * t, periodize)
    p = 0.5 * (left + right)
    w = 0.5 * (left - right)
    return p, w * bx, w * by


def _disk_integral(R: float, r: float, a: float) -> float:
    """``int_{|y| < r, |x + y| < a} dy / sqrt(r^2 - |y|^2)`` for ``|x| = R``.

    Along each ray from x the radial integral is done in closed form; the
    angular integral is adaptive.
    """
    if r <= 0:
        return 0.0

    def ray(phi):
        cp, sp = math.cos(phi), math.sin(phi)
        disc = a * a - (R * sp) ** 2
        if disc <= 0:
            return 0.0
        root = math.sqrt(disc)
        lo = max(-R * cp - root, 0.0)
        hi = min(-R * cp + root, r)
        if hi <= lo:
            return 0.0
        return math.sqrt(r * r - lo * lo) - math.sqrt(max(r * r - hi * hi, 0.0))

    points = []
    if R > a:
        points.append(math.asin(a / R))
    if R > 0:
        cos_edge = (a * a - R * R - r * r) / (2 * R * r)
        if -1 < cos_edge < 1:
            points.append(math.acos(cos_edge))
    points = sorted(p for p in points if 0 < p < math.pi)
    val, _ = integrate.quad(ray, 0.0, math.pi, points=points or None, limit=400,
                            epsabs=1e-13, epsrel=1e-12)
    return 2.0 * val


def oracle_radial(t: float, r, c: float = 1.0, radius: float = 0.2,
                  inner: float = 2.0, outer: float = 1.0, h_rel: float = 1e-4) -> np.ndarray:
    """Pressure of the radial step at distances ``r`` from its centre, zero initial velocity.

    ``p = d/dR (R M(R))`` at ``R = c t``, where the spherical mean of the
    planar step reduces to a disk integral; the derivative is a centred
    difference with step ``h_rel * c t``.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    R = c * t
    if R == 0:
        return np.where(r <= radius, inner, outer)
    h = h_rel * R
    jump = inner - outer

    def rm(rad, dist):
        # rad * (spherical mean); the constant background contributes rad
        return rad * outer + jump * _disk_integral(dist, rad, radius) / (2 * math.pi)

    out = np.empty_like(r)
    for k, dist in enumerate(r):
        out[k] = (rm(R + h, dist) - rm(R - h, dist)) / (2 * h)
    return out


def edge_l1_error(f: DofField, oracle: Callable, var: int = 0) -> float:
    """Mean absolute error of one variable at the vertical edge midpoints."""
    x, y = f.grid.coordinates("ev")
    exact = oracle(f.time, x, y)[var]
    return float(np.mean(np.abs(f.ev[var] - exact)))


@dataclass
class Problem:
    """Initial data on a grid, a default end time and optionally an exact solution."""

    name: str
    grid: Grid
    t_end: float
    data: Callable | None = None
    oracle: Callable | None = None
    field_factory: Callable | None = None

    def initial_field(self) -> DofField:
        if self.field_factory is not None:
            return self.field_factory(self.grid)
        return initialize(self.grid, self.data)


# name -> (nx, ny, lower, upper, t_end in units of c t)
PROBLEM_DEFAULTS = {
    "vortex": (50, 50, (-0.75, -0.75), (0.75, 0.75), 100.0),
    "oblique_waves": (50, 50, (0.0, 0.0), (1.0, 1.0), 0.1),
    "radial_shock": (100, 100, (-0.5, -0.5), (0.5, 0.5), 0.1),
    "stationary_mode": (16, 16, (0.0, 0.0), (1.0, 1.0), 1.0),
    "custom": (32, 32, (0.0, 0.0), (1.0, 1.0), 0.1),
}
PROBLEMS = tuple(PROBLEM_DEFAULTS)


def make_problem(name: str, nx: int | None = None, ny: int | None = None, lower=None, upper=None,
                 c: float = 1.0, periodize: bool = True, mode=(1, 2), expressions=None) -> Problem:
    """Set up one of the named problems; ``None`` arguments take the problem defaults."""
    if name not in PROBLEM_DEFAULTS:
        raise ValueError(f"unknown problem {name!r}; choose from {', '.join(PROBLEMS)}")
    d_nx, d_ny, d_lo, d_hi, ct = PROBLEM_DEFAULTS[name]
    grid = Grid.from_extent(nx or d_nx, ny or d_ny, lower or d_lo, upper or d_hi, c)
    t_end = ct / c
    if name == "vortex":
        return Problem(name, grid, t_end, vortex_data)
    if name == "oblique_waves":
        return Problem(name, grid, t_end, oblique_data(periodize),
                       lambda t, x, y: oracle_oblique(t, x, y, c, periodize))
    if name == "radial_shock":
        return Problem(name, grid, t_end, radial_shock_data)
    if name == "stationary_mode":
        from .analysis import synthesize_mode

        return Problem(name, grid, t_end, field_factory=lambda g: synthesize_mode(g, *mode))
    return Problem(name, grid, t_end, custom_data(*(expressions or ())))


@dataclass(frozen=True)
class ConvergenceRow:
    cells: int
    error: float
    order: float | None


def convergence_study(resolutions=(25, 50, 100, 200), cfl: float = DEFAULT_CFL,
                      ct: float = 0.1, c: float = 1.0, periodize: bool = True):
    """Edge-midpoint L1 errors of the oblique-wave problem on M x M grids."""
    rows: list[ConvergenceRow] = []
    prev = None
    for m in resolutions:
        prob = make_problem("oblique_waves", m, m, c=c, periodize=periodize)
        stepper = TimeStepper(prob.grid, cfl)
        f = stepper.advance(prob.initial_field(), ct / c)
        err = edge_l1_error(f, prob.oracle)
        order = None
        if prev is not None:
            order = math.log(prev[1] / err) / math.log(m / prev[0])
        rows.append(ConvergenceRow(m, err, order))
        prev = (m, err)
    return rows

"""Continuous, conservative biquadratic reconstruction on a rectangular cell.

The reconstruction in reference coordinates ``(xi, eta) in [-1, 1]**2`` is
``sum_m c_m b_m(xi, eta)`` with eight Lagrange-type basis polynomials attached
to the boundary points and a bubble ``b_9`` that vanishes on all of them.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

import numpy as np

from .grid import BOUNDARY_SOURCES, DofField, boundary_values

__all__ = [
    "BASIS_EXACT",
    "BASIS",
    "C9_WEIGHTS",
    "COEFF_SOURCES",
    "basis_eval",
    "compute_coeffs",
    "cell_coefficients",
    "recon_eval",
    "recon_gradient",
    "recon_monomial_coeffs",
]


def _expand(const, *factors):
    """Expand ``const * prod(a + b xi + c eta)`` into {(k, l): coeff} over xi^k eta^l."""
    poly = {(0, 0): Fraction(const)}
    for a, b, c in factors:
        nxt: dict[tuple[int, int], Fraction] = {}
        for (k, l), v in poly.items():
            for (dk, dl), w in (((0, 0), a), ((1, 0), b), ((0, 1), c)):
                if w:
                    key = (k + dk, l + dl)
                    nxt[key] = nxt.get(key, 0) + v * w
        poly = nxt
    out = [[Fraction(0)] * 3 for _ in range(3)]
    for (k, l), v in poly.items():
        out[k][l] = v
    return out


# linear factors written as (constant, xi, eta)
_XM, _XP = (-1, 1, 0), (1, 1, 0)   # xi - 1, xi + 1
_YM, _YP = (-1, 0, 1), (1, 0, 1)   # eta - 1, eta + 1
_FACTORED = (
    (Fraction(-1, 4), (_XM, _YM, (1, 1, 1))),    # b1 (-1,-1)
    (Fraction(1, 2), (_XM, _YM, _XP)),           # b2 (0,-1)
    (Fraction(1, 4), (_XP, _YM, (1, -1, 1))),    # b3 (1,-1)
    (Fraction(-1, 2), (_YM, _XP, _YP)),          # b4 (1,0)
    (Fraction(1, 4), (_XP, _YP, (-1, 1, 1))),    # b5 (1,1)
    (Fraction(-1, 2), (_XM, _YP, _XP)),          # b6 (0,1)
    (Fraction(-1, 4), (_XM, _YP, (-1, -1, 1))),  # b7 (-1,1)
    (Fraction(1, 2), (_YM, _XM, _YP)),           # b8 (-1,0)
    (Fraction(1), (_YM, _YP, _XM, _XP)),         # b9 bubble
)
BASIS_EXACT = tuple(_expand(const, *factors) for const, factors in _FACTORED)

# BASIS[m, k, l]: coefficient of xi^k eta^l in b_{m+1}
BASIS = np.array([[[float(v) for v in row] for row in b] for b in BASIS_EXACT])

# c9 = C9_WEIGHTS[0] * qbar + sum_m C9_WEIGHTS[m] * q_m
C9_WEIGHTS = (Fraction(9, 4),) + tuple(
    Fraction(3, 16) if m % 2 == 1 else Fraction(-3, 4) for m in range(1, 9)
)

# storage entries feeding each coefficient, as (lattice, di, dj, weight)
COEFF_SOURCES = tuple(
    ((lat, di, dj, Fraction(1)),) for lat, di, dj in BOUNDARY_SOURCES
) + (
    (("avg", 0, 0, C9_WEIGHTS[0]),)
    + tuple((lat, di, dj, C9_WEIGHTS[m + 1]) for m, (lat, di, dj) in enumerate(BOUNDARY_SOURCES)),
)

_C9 = np.array([float(w) for w in C9_WEIGHTS])


def basis_eval(m: int, xi, eta):
    """Value of basis polynomial ``b_m`` (m = 1..9) at reference coordinates."""
    if not 1 <= m <= 9:
        raise ValueError(f"basis index must be in 1..9, got {m}")
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    # product form: exact zeros on the factor lines
    const, factors = _FACTORED[m - 1]
    out = float(const) * np.ones(np.broadcast(xi, eta).shape)
    for a, b, c in factors:
        out = out * (a + b * xi + c * eta)
    return out


def compute_coeffs(qbar, q) -> np.ndarray:
    """Reconstruction coefficients ``c_1..c_9`` from the average and boundary values.

    ``q`` is a sequence of eight arrays (or an array with leading axis 8);
    the result has leading axis 9 and the trailing shape of the inputs.
    """
    qbar = np.asarray(qbar, dtype=float)
    q = np.asarray(q, dtype=float)
    if q.shape[0] != 8:
        raise ValueError("expected eight boundary values")
    c9 = _C9[0] * qbar + np.tensordot(_C9[1:], q, axes=(0, 0))
    return np.concatenate([q, c9[None]], axis=0)


def cell_coefficients(f: DofField) -> np.ndarray:
    """Coefficients of every cell's reconstruction, shape (9, 3, nx, ny)."""
    return compute_coeffs(f.avg, boundary_values(f))


def recon_monomial_coeffs(coeffs) -> np.ndarray:
    """Monomial expansion ``a[k, l, ...]`` of ``sum_m c_m b_m`` over xi^k eta^l."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape[0] != 9:
        raise ValueError(f"expected 9 coefficients along axis 0, got {coeffs.shape[0]}")
    return np.tensordot(BASIS, coeffs, axes=(0, 0))


def recon_eval(coeffs, xi, eta):
    """Evaluate the reconstruction with coefficients ``coeffs`` (leading axis 9)."""
    a = recon_monomial_coeffs(coeffs)
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    out = 0.0
    for k, l in product(range(3), range(3)):
        out = out + np.multiply.outer(a[k, l], xi**k * eta**l) if a.ndim > 2 else \
            out + a[k, l] * xi**k * eta**l
    return out


def recon_gradient(coeffs, xi, eta):
    """Reference-coordinate gradient ``(d/dxi, d/deta)`` of the reconstruction."""
    a = recon_monomial_coeffs(coeffs)
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    gx = 0.0
    gy = 0.0
    for k, l in product(range(3), range(3)):
        if k:
            term = k * xi ** (k - 1) * eta**l
            gx = gx + (np.multiply.outer(a[k, l], term) if a.ndim > 2 else a[k, l] * term)
        if l:
            term = l * xi**k * eta ** (l - 1)
            gy = gy + (np.multiply.outer(a[k, l], term) if a.ndim > 2 else a[k, l] * term)
    return gx, gy

"""Closed-form partial spherical means of polynomial data.

Data are functions of (x, y) only, averaged over the unit sphere in three
dimensions (method of descent).  For a sector ``phi1 <= phi <= phi2`` of the
sphere the mean is

    M[f](x0, r) = 1/(4 pi) int_{phi1}^{phi2} dphi int_0^pi dtheta sin(theta)
                  f(x0 + r sin(theta) cos(phi), y0 + r sin(theta) sin(phi)),

optionally weighted by powers of the outward normal components
``n_x = sin(theta) cos(phi)`` and ``n_y = sin(theta) sin(phi)``.  For monomial
data the result is a polynomial in r whose coefficients lie in Q[pi, 1/pi];
they are kept exact here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import AssemblyError, DivisibilityError
from .exact import PiRational, as_fraction

__all__ = [
    "MAX_DEGREE",
    "RadialPolynomial",
    "Sector",
    "FULL_SPHERE",
    "radial_integral",
    "polar_integral",
    "angular_integral",
    "sphere_moment",
    "sector_mean",
    "ddr",
    "div_r",
    "integrate_0_to_R",
]

MAX_DEGREE = 8

_ZERO = PiRational(0)


def _exact(c) -> PiRational:
    return c if isinstance(c, PiRational) else PiRational(c)


@dataclass(frozen=True)
class RadialPolynomial:
    """Polynomial ``sum_k coeffs[k] * r**k`` with exact coefficients."""

    coeffs: tuple[PiRational, ...] = ()

    def __post_init__(self):
        cs = [_exact(c) for c in self.coeffs]
        while cs and not cs[-1]:
            cs.pop()
        if len(cs) - 1 > MAX_DEGREE:
            raise AssemblyError(
                f"radial polynomial of degree {len(cs) - 1} exceeds cap {MAX_DEGREE}"
            )
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def monomial(cls, k: int, coeff=1) -> RadialPolynomial:
        return cls((_ZERO,) * k + (_exact(coeff),))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coefficient(self, k: int) -> PiRational:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else _ZERO

    def __add__(self, other: RadialPolynomial) -> RadialPolynomial:
        if not isinstance(other, RadialPolynomial):
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return RadialPolynomial(
            tuple(self.coefficient(k) + other.coefficient(k) for k in range(n))
        )

    def __neg__(self) -> RadialPolynomial:
        return RadialPolynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: RadialPolynomial) -> RadialPolynomial:
        return self + (-other)

    def scale(self, factor) -> RadialPolynomial:
        """Multiply by an exact scalar (int, Fraction or PiRational)."""
        return RadialPolynomial(tuple(c * factor for c in self.coeffs))

    def shift(self, k: int) -> RadialPolynomial:
        """Multiply by ``r**k``."""
        if not self.coeffs:
            return self
        return RadialPolynomial((_ZERO,) * k + self.coeffs)

    def exact_value(self, r) -> PiRational:
        """Exact value at a rational (or binary float) radius."""
        rq = as_fraction(r)
        acc = _ZERO
        for c in reversed(self.coeffs):
            acc = acc * rq + c
        return acc

    def __call__(self, r: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * r + float(c)
        return acc

    def __repr__(self):
        return f"RadialPolynomial({[str(c) for c in self.coeffs]})"


@dataclass(frozen=True)
class Sector:
    """Azimuthal range ``[start*pi/2, stop*pi/2]`` in quarter turns."""

    start: int
    stop: int

    def __post_init__(self):
        if self.stop - self.start not in (1, 2, 4):
            raise ValueError(
                f"sector width must be pi/2, pi or 2pi, got {self.stop - self.start} quarter turns"
            )

    @classmethod
    def from_radians(cls, phi1: float, phi2: float) -> Sector:
        k1 = round(2 * phi1 / math.pi)
        k2 = round(2 * phi2 / math.pi)
        if not (math.isclose(k1 * math.pi / 2, phi1, abs_tol=1e-12)
                and math.isclose(k2 * math.pi / 2, phi2, abs_tol=1e-12)):
            raise ValueError("sector bounds must be integer multiples of pi/2")
        return cls(k1, k2)

    @property
    def quarters(self) -> range:
        return range(self.start, self.stop)

    def radians(self) -> tuple[float, float]:
        return self.start * math.pi / 2, self.stop * math.pi / 2


FULL_SPHERE = Sector(0, 4)


@lru_cache(maxsize=None)
def polar_integral(n: int) -> PiRational:
    """``int_0^pi sin(theta)**n dtheta`` (Wallis recursion)."""
    if n < 0:
        raise ValueError("power must be non-negative")
    if n == 0:
        return PiRational(1, 1)
    if n == 1:
        return PiRational(2)
    return polar_integral(n - 2) * Fraction(n - 1, n)


def radial_integral(m: int) -> RadialPolynomial:
    """``int_0^r s**m / sqrt(r**2 - s**2) ds`` as a polynomial in r."""
    if m < 0:
        raise ValueError("m must be non-negative")
    if m == 0:
        # the general even-case binomial is not defined at m' = 0
        return RadialPolynomial.monomial(0, PiRational(Fraction(1, 2), 1))
    mp, odd = divmod(m, 2)
    if odd:
        c = Fraction(math.factorial(mp) ** 2 * 4**mp, math.factorial(2 * mp + 1))
        return RadialPolynomial.monomial(m, c)
    c = PiRational(Fraction(math.comb(2 * mp - 1, mp), 4**mp), 1)
    return RadialPolynomial.monomial(m, c)


@lru_cache(maxsize=None)
def _quarter(p: int, q: int) -> PiRational:
    """``int_0^{pi/2} cos**p sin**q dphi``."""
    if p >= 2:
        return _quarter(p - 2, q) * Fraction(p - 1, p + q)
    if q >= 2:
        return _quarter(p, q - 2) * Fraction(q - 1, p + q)
    table = {
        (0, 0): PiRational(Fraction(1, 2), 1),
        (1, 0): PiRational(1),
        (0, 1): PiRational(1),
        (1, 1): PiRational(Fraction(1, 2)),
    }
    return table[(p, q)]


@lru_cache(maxsize=None)
def angular_integral(p: int, q: int, sector: Sector) -> PiRational:
    """``int_{phi1}^{phi2} cos(phi)**p sin(phi)**q dphi`` over a quarter-aligned sector."""
    if p < 0 or q < 0:
        raise ValueError("powers must be non-negative")
    total = PiRational(0)
    for k in sector.quarters:
        # rotate the k-th quarter onto [0, pi/2]
        r = k % 4
        if r == 0:
            total += _quarter(p, q)
        elif r == 1:
            total += _quarter(q, p) * (-1) ** p
        elif r == 2:
            total += _quarter(p, q) * (-1) ** (p + q)
        else:
            total += _quarter(q, p) * (-1) ** q
    return total


@lru_cache(maxsize=None)
def sphere_moment(alpha: int, beta: int, sector: Sector) -> PiRational:
    """Sector mean of ``n_x**alpha * n_y**beta`` with the 1/(4 pi) normalisation."""
    return (polar_integral(1 + alpha + beta) * angular_integral(alpha, beta, sector)
            / PiRational(4, 1))


@lru_cache(maxsize=None)
def _sector_mean(p, q, a, b, x0: Fraction, y0: Fraction, sector: Sector) -> RadialPolynomial:
    coeffs = [PiRational(0)] * (p + q + 1)
    for i in range(p + 1):
        for j in range(q + 1):
            base = math.comb(p, i) * math.comb(q, j) * x0 ** (p - i) * y0 ** (q - j)
            if base:
                coeffs[i + j] = coeffs[i + j] + sphere_moment(i + a, j + b, sector) * base
    return RadialPolynomial(tuple(coeffs))


def sector_mean(monomial, normal_weight, offset, sector: Sector = FULL_SPHERE) -> RadialPolynomial:
    """Partial spherical mean of ``x**p y**q n_x**a n_y**b`` about ``offset``.

    Args:
        monomial: powers ``(p, q)`` of the local coordinates, each at most 2.
        normal_weight: powers ``(a, b)`` of the normal components, ``a + b <= 2``.
        offset: evaluation point ``(x0, y0)``; ints, Fractions or floats
            (floats are taken at their exact binary value).
        sector: azimuthal range of the partial mean.

    Returns:
        The mean as an exact polynomial in the radius r.
    """
    p, q = monomial
    a, b = normal_weight
    if not (0 <= p <= 2 and 0 <= q <= 2):
        raise ValueError(f"monomial powers must lie in 0..2, got {monomial}")
    if a < 0 or b < 0 or a + b > 2:
        raise ValueError(f"normal weight powers must satisfy a+b <= 2, got {normal_weight}")
    x0, y0 = (as_fraction(v) for v in offset)
    return _sector_mean(p, q, a, b, x0, y0, sector)


def ddr(poly: RadialPolynomial) -> RadialPolynomial:
    """Derivative with respect to r."""
    return RadialPolynomial(tuple(c * k for k, c in enumerate(poly.coeffs) if k > 0))


def div_r(poly: RadialPolynomial, tol: float = 1e-12) -> RadialPolynomial:
    """Divide by r; the constant coefficient must vanish (to ``tol`` relative)."""
    if not poly.coeffs:
        return poly
    c0 = poly.coeffs[0]
    if c0:
        scale = max(abs(float(c)) for c in poly.coeffs)
        if abs(float(c0)) > tol * scale:
            raise DivisibilityError(
                f"constant term {float(c0):.3e} does not vanish (scale {scale:.3e})"
            )
    return RadialPolynomial(poly.coeffs[1:])


def integrate_0_to_R(poly: RadialPolynomial) -> RadialPolynomial:
    """``int_0^R poly(r) dr`` as a polynomial in R."""
    return RadialPolynomial(
        (PiRational(0),) + tuple(c / (k + 1) for k, c in enumerate(poly.coeffs))
    )

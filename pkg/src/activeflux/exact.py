"""Exact arithmetic over Q[pi, 1/pi].

Spherical means of polynomial data on sectors bounded by multiples of pi/2
produce coefficients of the form ``q0 + q1*pi + q_1/pi`` with rational q's.
Carrying them exactly lets the evolution stencils be rounded to float only
once, after all cancellations have happened.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

__all__ = ["PiRational", "as_fraction"]


def as_fraction(x) -> Fraction:
    """Exact rational value of an int, Fraction or (binary) float."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x!r}")
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


class PiRational:
    """A finite sum ``sum_k q_k * pi**k`` with rational ``q_k``."""

    __slots__ = ("_terms",)

    def __init__(self, value=0, power: int = 0):
        q = as_fraction(value)
        self._terms: dict[int, Fraction] = {power: q} if q else {}

    @classmethod
    def _from_terms(cls, terms: dict[int, Fraction]) -> PiRational:
        obj = cls.__new__(cls)
        obj._terms = {k: v for k, v in terms.items() if v}
        return obj

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def coefficient(self, power: int) -> Fraction:
        return self._terms.get(power, Fraction(0))

    @staticmethod
    def _coerce(other) -> PiRational | None:
        if isinstance(other, PiRational):
            return other
        if isinstance(other, (int, Fraction, float, Rational)):
            return PiRational(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        terms = dict(self._terms)
        for k, v in o._terms.items():
            terms[k] = terms.get(k, 0) + v
        return PiRational._from_terms(terms)

    __radd__ = __add__

    def __neg__(self):
        return PiRational._from_terms({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, PiRational):
            terms: dict[int, Fraction] = {}
            for k1, v1 in self._terms.items():
                for k2, v2 in other._terms.items():
                    terms[k1 + k2] = terms.get(k1 + k2, 0) + v1 * v2
            return PiRational._from_terms(terms)
        if isinstance(other, (int, Fraction, Rational)):
            q = Fraction(other)
            return PiRational._from_terms({k: v * q for k, v in self._terms.items()})
        if isinstance(other, float):
            return self * as_fraction(other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, Rational, float)):
            q = as_fraction(other)
            if q == 0:
                raise ZeroDivisionError("PiRational division by zero")
            return PiRational._from_terms({k: v / q for k, v in self._terms.items()})
        if isinstance(other, PiRational) and len(other._terms) == 1:
            ((k, q),) = other._terms.items()
            return PiRational._from_terms({p - k: v / q for p, v in self._terms.items()})
        return NotImplemented

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __bool__(self):
        return bool(self._terms)

    def __float__(self):
        return float(sum(float(v) * math.pi**k for k, v in sorted(self._terms.items())))

    def is_rational(self) -> bool:
        return set(self._terms) <= {0}

    def __repr__(self):
        if not self._terms:
            return "PiRational(0)"
        parts = []
        for k, v in sorted(self._terms.items()):
            parts.append(str(v) if k == 0 else f"({v})*pi^{k}")
        return "PiRational(" + " + ".join(parts) + ")"

"""Active flux finite-volume scheme for two-dimensional linear acoustics.

Point values on cell boundaries are advanced with the exact solution
operator written as linear stencils of spherical means; cell averages are
updated conservatively with space-time Simpson fluxes.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .grid import DofField, Grid  # noqa: E402
from .solver import TimeStepper, initialize  # noqa: E402

__all__ = ["__version__", "Grid", "DofField", "TimeStepper", "initialize"]

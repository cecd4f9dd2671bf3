"""Exception types raised by the solver library."""


class ActiveFluxError(Exception):
    """Base class for library errors."""


class CFLViolation(ActiveFluxError, ValueError):
    """Time step or evolution radius exceeds the region-of-dependence bound."""


class DivisibilityError(ActiveFluxError, ArithmeticError):
    """A radial polynomial expected to vanish at r = 0 does not."""


class AssemblyError(ActiveFluxError, RuntimeError):
    """Internal inconsistency while assembling evolution stencils."""


class DegenerateModeError(ActiveFluxError, ValueError):
    """The requested Fourier mode carries no stationary content."""

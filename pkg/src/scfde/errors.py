"""Exception types raised by the simulation library."""


class ScfdeError(Exception):
    """Base class for all library errors."""


class BlockTooShort(ScfdeError, ValueError):
    """Block length smaller than the channel length (nu + 1)."""


class DimensionMismatch(ScfdeError, ValueError):
    pass


class DegenerateEigenvalue(ScfdeError, ArithmeticError):
    """A channel frequency bin is exactly zero, so it cannot be inverted."""


class InvalidConfig(ScfdeError, ValueError):
    pass


class InsufficientData(ScfdeError, ValueError):
    """Too few usable points to fit a slope."""

"""Exception types shared across the package."""


class PoleError(ValueError):
    """Argument hits a pole of a Gamma function."""


class DomainError(ValueError):
    """Argument outside the domain of a function."""


class ConvergenceError(RuntimeError):
    """Series, quadrature or contour truncation did not converge."""


class OverflowFlag(OverflowError):
    """Result would overflow double precision."""


class EmptyStripError(ValueError):
    """Two Mellin strips do not intersect."""


class GridSingularityError(ValueError):
    """Finite-difference stencil touches a singular point of the density."""

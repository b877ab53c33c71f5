"""Subordinated generalized Gamma processes: Mellin algebra, densities, samplers and checks."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConvergenceError,
    DomainError,
    EmptyStripError,
    GridSingularityError,
    OverflowFlag,
    PoleError,
)

__all__ = [
    "__version__",
    "ConvergenceError",
    "DomainError",
    "EmptyStripError",
    "GridSingularityError",
    "OverflowFlag",
    "PoleError",
]

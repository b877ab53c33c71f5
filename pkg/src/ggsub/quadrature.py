"""Quadrature helpers: adaptive 1-d integration and tensor Gauss-Legendre in 2-d."""

from __future__ import annotations

import math
import warnings
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import ConvergenceError

__all__ = ["integrate_interval", "integrate_half_line", "gauss_legendre_panels"]


def integrate_interval(f: Callable[[float], float], a: float, b: float,
                       epsrel: float = 1e-11, limit: int = 500, points=None) -> float:
    """Adaptive Gauss-Kronrod on [a, b] (either end may be infinite)."""
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            if points is not None and math.isfinite(a) and math.isfinite(b):
                val, _ = integrate.quad(f, a, b, epsabs=0.0, epsrel=epsrel, limit=limit, points=points)
            else:
                val, _ = integrate.quad(f, a, b, epsabs=0.0, epsrel=epsrel, limit=limit)
        except integrate.IntegrationWarning as exc:
            raise ConvergenceError(f"quadrature did not converge on [{a}, {b}]: {exc}") from exc
    return val


def integrate_half_line(f: Callable[[float], float], scale: float = 1.0, epsrel: float = 1e-11) -> float:
    """Integral over (0, inf), split at a characteristic scale and in decades."""
    edges = [0.0] + [scale * 10.0 ** k for k in (-3, -1, 0, 1)] + [math.inf]
    return sum(integrate_interval(f, a, b, epsrel=epsrel) for a, b in zip(edges[:-1], edges[1:]))


def gauss_legendre_panels(a: float, b: float, panels: int, order: int = 20) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of a composite Gauss-Legendre rule on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights

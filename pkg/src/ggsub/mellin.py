"""Gamma-product Mellin forms and the algebra that proves equalities in law.

A form represents

    M(eta; t) = exp(const_log + eta_log * eta) * t^(t_slope*eta + t_offset)
                * prod_i Gamma(s_i*eta + o_i)^(p_i)

on a vertical strip lo < Re eta < hi.  For a positive random variable X(t)
this is E X(t)^(eta-1); for a real-valued symmetric one it is E|X(t)|^(eta-1).
The ``eta_log`` term carries space scalings a^(eta-1), which are not
powers of t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyStripError, PoleError
from .specfun import log_gamma

__all__ = [
    "GammaFactor",
    "MellinForm",
    "GGParams",
    "unit_form",
    "deterministic_clock",
    "mellin_of_gg",
    "mellin_of_folded_cauchy",
    "product",
    "subordinate",
    "power_map",
    "scale",
    "equal_on_strip",
    "moment",
    "pole_strip",
]

INF = math.inf
EQUAL_TOL = 1e-9
GRID_IMAG = (0.0, 0.5, -0.5, 1.5, -1.5, 3.0, -3.0)
GRID_T = (0.5, 1.0, 2.0)


@dataclass(frozen=True)
class GammaFactor:
    slope: float
    offset: float
    power: int = 1

    def __post_init__(self) -> None:
        if not (math.isfinite(self.slope) and math.isfinite(self.offset)):
            raise ValueError("GammaFactor slope and offset must be finite")
        if self.power == 0:
            raise ValueError("GammaFactor power must be nonzero")


def pole_strip(factors: Iterable[GammaFactor]) -> tuple[float, float]:
    """Widest strip free of poles of the numerator Gamma factors."""
    lo, hi = -INF, INF
    for f in factors:
        if f.power <= 0 or f.slope == 0:
            continue
        edge = -f.offset / f.slope
        if f.slope > 0:
            lo = max(lo, edge)
        else:
            hi = min(hi, edge)
    return lo, hi


@dataclass(frozen=True)
class MellinForm:
    const_log: float = 0.0
    t_slope: float = 0.0
    t_offset: float = 0.0
    factors: tuple[GammaFactor, ...] = ()
    strip: tuple[float, float] = (-INF, INF)
    eta_log: float = 0.0

    def __post_init__(self) -> None:
        lo, hi = self.strip
        if not lo < hi:
            raise EmptyStripError(f"empty strip ({lo}, {hi})")
        plo, phi = pole_strip(self.factors)
        if lo < plo - 1e-12 or hi > phi + 1e-12:
            raise ValueError(f"strip ({lo}, {hi}) contains a Gamma pole; poles allow ({plo}, {phi})")

    @classmethod
    def build(cls, const_log: float, t_slope: float, t_offset: float,
              factors: Sequence[GammaFactor], eta_log: float = 0.0,
              strip: tuple[float, float] | None = None) -> "MellinForm":
        """Construct with the strip derived from the factor poles (optionally narrowed)."""
        factors = tuple(factors)
        lo, hi = pole_strip(factors)
        if strip is not None:
            lo, hi = max(lo, strip[0]), min(hi, strip[1])
        return cls(const_log, t_slope, t_offset, factors, (lo, hi), eta_log)

    def log_value(self, eta, t: float):
        """Log of the form at complex eta (array ok) and scalar t > 0."""
        eta = np.asarray(eta, dtype=complex)
        out = self.const_log + self.eta_log * eta + (self.t_slope * eta + self.t_offset) * math.log(t)
        for f in self.factors:
            arg = f.slope * eta + f.offset
            if f.power < 0:
                real_arg = np.isclose(arg.imag, 0.0, atol=0.0)
                at_pole = real_arg & (arg.real <= 0) & (arg.real == np.round(arg.real))
                if np.any(at_pole):
                    safe = np.where(at_pole, 1.0, arg)
                    out = np.where(at_pole, -np.inf, out + f.power * log_gamma(safe))
                    continue
            out = out + f.power * log_gamma(arg)
        return out

    def value(self, eta, t: float):
        return np.exp(self.log_value(eta, t))

    def to_json(self) -> dict:
        return {
            "const_log": self.const_log,
            "eta_log": self.eta_log,
            "t_slope": self.t_slope,
            "t_offset": self.t_offset,
            "factors": [{"slope": f.slope, "offset": f.offset, "power": f.power} for f in self.factors],
            "strip": [_edge_json(self.strip[0]), _edge_json(self.strip[1])],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MellinForm":
        factors = tuple(GammaFactor(f["slope"], f["offset"], int(f["power"])) for f in obj["factors"])
        strip = (_edge_parse(obj["strip"][0]), _edge_parse(obj["strip"][1]))
        return cls(obj["const_log"], obj["t_slope"], obj["t_offset"], factors, strip, obj.get("eta_log", 0.0))


def _edge_json(v: float):
    if math.isinf(v):
        return "-inf" if v < 0 else "inf"
    return v + 0.0  # normalizes -0.0


def _edge_parse(v) -> float:
    return float(v)


def unit_form() -> MellinForm:
    """Form of the constant 1: E 1^(eta-1) = 1."""
    return MellinForm()


def deterministic_clock(beta: float, alpha: float = 1.0) -> MellinForm:
    """Form of the deterministic process alpha * t^beta."""
    if alpha <= 0:
        raise ValueError("clock scale alpha must be positive")
    la = math.log(alpha)
    return MellinForm(const_log=-la, eta_log=la, t_slope=beta, t_offset=-beta)


@dataclass(frozen=True)
class GGParams:
    """Generalized Gamma process X = (c(t) Y)^(1/gamma), Y ~ Gamma(mu, 1).

    clock is "raw" (c = t), "tilde" (c = t^gamma) or "affine" (c = alpha t^beta).
    """

    mu: float
    gamma: float
    clock: str = "raw"
    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self) -> None:
        if not self.mu > 0:
            raise ValueError("mu must be positive")
        if self.gamma == 0:
            raise ValueError("gamma must be nonzero")
        if self.clock not in ("raw", "tilde", "affine"):
            raise ValueError(f"unknown clock {self.clock!r}")
        if self.clock == "affine" and (self.beta == 0 or self.alpha <= 0):
            raise ValueError("affine clock needs alpha > 0 and beta != 0")

    def clock_alpha_beta(self) -> tuple[float, float]:
        if self.clock == "raw":
            return 1.0, 1.0
        if self.clock == "tilde":
            return 1.0, self.gamma
        return self.alpha, self.beta


def mellin_of_gg(params: GGParams) -> MellinForm:
    mu, g = params.mu, params.gamma
    alpha, beta = params.clock_alpha_beta()
    la = math.log(alpha)
    # E (cY)^((eta-1)/g) = c^((eta-1)/g) Gamma(mu + (eta-1)/g) / Gamma(mu)
    return MellinForm.build(
        const_log=-math.lgamma(mu) - la / g,
        eta_log=la / g,
        t_slope=beta / g,
        t_offset=-beta / g,
        factors=[GammaFactor(1.0 / g, mu - 1.0 / g, 1)],
    )


def mellin_of_folded_cauchy(t_power_unit: bool = True) -> MellinForm:
    """E|C(t)|^(eta-1) = Gamma(eta/2) Gamma(1-eta/2) t^(eta-1) / pi, strip (0, 2).

    With ``t_power_unit`` false the t-power is dropped (the law at t = 1).
    """
    slope, offset = (1.0, -1.0) if t_power_unit else (0.0, 0.0)
    return MellinForm.build(
        const_log=-math.log(math.pi), t_slope=slope, t_offset=offset,
        factors=[GammaFactor(0.5, 0.0, 1), GammaFactor(-0.5, 1.0, 1)],
    )


def _intersect(a: tuple[float, float], b: tuple[float, float]) -> tuple[float, float]:
    lo, hi = max(a[0], b[0]), min(a[1], b[1])
    if not lo < hi:
        raise EmptyStripError(f"strips {a} and {b} do not intersect")
    return lo, hi


def product(f: MellinForm, g: MellinForm) -> MellinForm:
    """Form of the product of independent variables (Mellin convolution)."""
    return MellinForm(
        const_log=f.const_log + g.const_log,
        eta_log=f.eta_log + g.eta_log,
        t_slope=f.t_slope + g.t_slope,
        t_offset=f.t_offset + g.t_offset,
        factors=f.factors + g.factors,
        strip=_intersect(f.strip, g.strip),
    )


def _substitute(f: MellinForm, a: float, b: float) -> MellinForm:
    # f evaluated at eta' = a*eta + b, as a form in eta
    if a == 0:
        raise ValueError("substitution slope must be nonzero")
    factors = tuple(GammaFactor(x.slope * a, x.slope * b + x.offset, x.power) for x in f.factors)
    lo, hi = ((f.strip[0] - b) / a, (f.strip[1] - b) / a)
    if a < 0:
        lo, hi = hi, lo
    return MellinForm(
        const_log=f.const_log + f.eta_log * b,
        eta_log=f.eta_log * a,
        t_slope=f.t_slope * a,
        t_offset=f.t_slope * b + f.t_offset,
        factors=factors,
        strip=(lo, hi),
    )


def subordinate(outer: MellinForm, inner: MellinForm) -> MellinForm:
    """Form of outer(inner(t)) for independent processes.

    The outer form depends on its time as t^(a*eta+b); conditioning on the
    inner time T gives E T^(a*eta+b) = inner evaluated at a*eta + b + 1.
    """
    a, b = outer.t_slope, outer.t_offset
    base = replace(outer, t_slope=0.0, t_offset=0.0)
    if a == 0:
        if b != 0:
            raise ValueError("outer form has a constant nonzero t-power")
        return base
    return product(base, _substitute(inner, a, b + 1.0))


def power_map(f: MellinForm, beta: float) -> MellinForm:
    """Form of X^beta: E X^(beta(eta-1)) = f at beta*eta + 1 - beta."""
    if beta == 0:
        raise ValueError("beta must be nonzero")
    return _substitute(f, beta, 1.0 - beta)


def scale(f: MellinForm, a: float, mode: str) -> MellinForm:
    """Scale time (t -> a t) or space (X -> a X) by a > 0."""
    if a <= 0:
        raise ValueError("scale factor must be positive")
    la = math.log(a)
    if mode == "time":
        return replace(f, const_log=f.const_log + f.t_offset * la, eta_log=f.eta_log + f.t_slope * la)
    if mode == "space":
        return replace(f, const_log=f.const_log - la, eta_log=f.eta_log + la)
    raise ValueError(f"unknown scale mode {mode!r}")


def strip_abscissae(strip: tuple[float, float]) -> list[float]:
    """Five real abscissae spread across a strip (finite window for infinite ends)."""
    lo, hi = strip
    if math.isfinite(lo) and math.isfinite(hi):
        return [lo + (hi - lo) * (k + 1) / 6.0 for k in range(5)]
    offs = (0.2, 0.5, 1.0, 1.7, 2.5)
    if math.isfinite(lo):
        return [lo + d for d in offs]
    if math.isfinite(hi):
        return [hi - d for d in offs]
    return [-2.0, -1.0, 0.0, 1.0, 2.0]


@dataclass(frozen=True)
class StripComparison:
    equal: bool
    max_rel_dev: float
    strip: tuple[float, float] = field(default=(-INF, INF))


def equal_on_strip(f: MellinForm, g: MellinForm, tol: float = EQUAL_TOL) -> StripComparison:
    """Compare two forms at 35 complex points times 3 values of t, in log domain."""
    strip = _intersect(f.strip, g.strip)
    etas = np.array([complex(th, y) for th in strip_abscissae(strip) for y in GRID_IMAG])
    worst = 0.0
    for t in GRID_T:
        d = f.log_value(etas, t) - g.log_value(etas, t)
        dev = np.abs(np.expm1(d))
        worst = max(worst, float(np.max(dev)))
    return StripComparison(bool(worst < tol), worst, strip)


def moment(f: MellinForm, k: int, t: float) -> float:
    """E|X(t)|^k, i.e. the form at eta = k+1, or inf outside the open strip."""
    eta = k + 1.0
    lo, hi = f.strip
    if not lo < eta < hi:
        return INF
    try:
        return float(np.real(f.value(eta, t)))
    except PoleError:
        return INF

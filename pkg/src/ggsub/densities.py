"""Catalog of closed-form marginal densities of subordinated Gamma-type processes.

Every law is a parameterized evaluator q(x, t) with a support descriptor and
its origin behaviour.  Laws on the real line are symmetric; their Mellin
transform is taken on the folded variable |X|.  Laws on R^n depend on the
Euclidean norm only and are evaluated radially.

Two families carry constants that were fixed by quadrature rather than
taken from a closed-form derivation: the density of B(G_1(t)) in one and n
dimensions, and its special cases (mu = 1/2 in the plane, mu = n/2).
The alternative constants are retained in ``alt_constants`` so the ratio
can be reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

from . import samplers as S
from .errors import DomainError
from .mellin import MellinForm
from .quadrature import gauss_legendre_panels, integrate_half_line
from .specfun import bessel_i, bessel_k, hyp2f1

__all__ = [
    "DensityLaw", "SupportBoundary", "CATALOG", "get_law", "eval_density",
    "normalization_check", "mellin_numeric", "bivariate_gamma_covariance",
    "bivariate_expectation",
]

LOG2 = math.log(2.0)
LOGPI = math.log(math.pi)
lg = math.lgamma


@dataclass(frozen=True)
class SupportBoundary:
    includes_origin: bool
    divergence_at_origin: str  # "none" | "power" | "logarithmic"


def _power_boundary(e: float, log_at_zero: bool = False) -> SupportBoundary:
    # density ~ x^e (times log x when log_at_zero) near the origin
    if e > 0:
        return SupportBoundary(True, "none")
    if e == 0:
        return SupportBoundary(False, "logarithmic") if log_at_zero else SupportBoundary(True, "none")
    return SupportBoundary(False, "power")


@dataclass(frozen=True)
class DensityLaw:
    id: str
    label: str
    support: str  # "positive-line" | "real-line" | "real-n-space" | "positive-quadrant"
    defaults: Mapping[str, float]
    log_eval: Callable[[np.ndarray, float, dict], np.ndarray]
    boundary_fn: Callable[[dict, float], SupportBoundary]
    origin_fn: Callable[[float, dict], float]
    expr_fn: Optional[Callable[[dict], "S.ProcessExpr"]] = None
    scale_fn: Callable[[float, dict], float] = lambda t, p: t
    check: Callable[[dict], None] = lambda p: None
    alt_constants: Mapping[str, Callable[[dict], float]] = field(default_factory=dict)
    constant_fn: Optional[Callable[[dict], float]] = None

    def params(self, overrides: Optional[Mapping[str, float]] = None) -> dict:
        p = dict(self.defaults)
        for k, v in (overrides or {}).items():
            if k not in p:
                raise KeyError(f"law {self.id!r} has no parameter {k!r}")
            p[k] = v
        self.check(p)
        return p

    def boundary(self, params: Optional[Mapping[str, float]] = None, t: float = 1.0) -> SupportBoundary:
        return self.boundary_fn(self.params(params), t)

    def form(self, params: Optional[Mapping[str, float]] = None) -> Optional[MellinForm]:
        if self.expr_fn is None:
            return None
        return S.form_of(self.expr_fn(self.params(params)))

    @property
    def dimension_param(self) -> Optional[str]:
        return "n" if "n" in self.defaults else None


# ---------------------------------------------------------------- helpers

def _log_k(nu: float, z: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(bessel_k(nu, z))


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise DomainError(msg)


def _k_origin_limit(nu: float) -> float:
    # z^nu K_nu(z) -> Gamma(nu) 2^(nu-1) as z -> 0, nu > 0
    return math.gamma(nu) * 2.0 ** (nu - 1.0)


# ---------------------------------------------------------------- laws

def _ggen_log(x, t, p):
    g, mu = p["gamma"], p["mu"]
    y = x / t
    return math.log(abs(g)) + (mu * g - 1) * np.log(y) - y ** g - math.log(t) - lg(mu)


def _ggen_origin(t, p):
    g, mu = p["gamma"], p["mu"]
    e = mu * g - 1
    if g < 0 or e > 0:
        return 0.0
    if e == 0:
        return abs(g) / (t * math.gamma(mu))
    return math.inf


def _gg_log(x, t, p):
    g, mu = p["gamma"], p["mu"]
    return math.log(abs(g)) + (mu * g - 1) * np.log(x) - x ** g / t - mu * np.log(t) - lg(mu)


def _gg_origin(t, p):
    g, mu = p["gamma"], p["mu"]
    e = mu * g - 1
    if g < 0 or e > 0:
        return 0.0
    if e == 0:
        return abs(g) / (t ** mu * math.gamma(mu))
    return math.inf


def _gen_boundary(p, t):
    if p["gamma"] < 0:
        return SupportBoundary(True, "none")
    return _power_boundary(p["mu"] * p["gamma"] - 1)


def _levy_log(x, t, p):
    return (t - 1) * np.log(x) - x - lg(t)


def _levy_origin(t, p):
    return 0.0 if t > 1 else (1.0 if t == 1 else math.inf)


def _gtilde_log(x, t, p):
    g, mu = p["gamma"], p["mu"]
    y = x / t
    return math.log(2 * abs(g)) - np.log(x) - 2 * lg(mu) + g * mu * np.log(y) + _log_k(0.0, 2.0 * y ** (g / 2.0))


def _k0_boundary(p, t):
    if p["gamma"] < 0:
        return SupportBoundary(True, "none")
    return _power_boundary(p["gamma"] * p["mu"] - 1, log_at_zero=True)


def _k0_origin(t, p):
    b = _k0_boundary(p, t)
    return 0.0 if b.divergence_at_origin == "none" else math.inf


def _qaqa_log(x, t, p):
    g, mu = p["gamma"], p["mu"]
    return (math.log(g) + (mu * g - 1) * np.log(x) + mu * g * math.log(t)
            - 2 * mu * np.log(x ** g + t ** g) + lg(2 * mu) - 2 * lg(mu))


def _qaqa_origin(t, p):
    g, mu = p["gamma"], p["mu"]
    e = mu * g - 1
    if e > 0:
        return 0.0
    if e == 0:
        return g / t * math.exp(lg(2 * mu) - 2 * lg(mu))
    return math.inf


def _tdist0_log(x, t, p):
    g, m1, m2 = p["gamma"], p["mu1"], p["mu2"]
    return (math.log(g) + (g * m1 - 1) * np.log(x) + g * m2 * math.log(t)
            - (m1 + m2) * np.log(x ** g + t ** g) + lg(m1 + m2) - lg(m1) - lg(m2))


def _tdist0_origin(t, p):
    g, m1, m2 = p["gamma"], p["mu1"], p["mu2"]
    e = g * m1 - 1
    if e > 0:
        return 0.0
    if e == 0:
        return g / t * math.exp(lg(m1 + m2) - lg(m1) - lg(m2))
    return math.inf


def _tdist1_log(x, t, p):
    nu = p["nu"]
    return (LOG2 + nu * math.log(t) - 0.5 * (nu + 1) * np.log(x * x + t * t)
            + lg(0.5 * (nu + 1)) - 0.5 * LOGPI - lg(0.5 * nu))


def _tdist1_origin(t, p):
    return float(np.exp(_tdist1_log(np.array(0.0), t, p)))


def _unok_log(x, t, p):
    g, mu = p["gamma"], p["mu"]
    return (math.log(2 * abs(g)) + (mu * g - 1) * np.log(x) - mu * math.log(t) - 2 * lg(mu)
            + _log_k(0.0, 2.0 * np.sqrt(x ** g / t)))


def _special_log(x, t, p):
    g, m1, m2 = p["gamma"], p["mu1"], p["mu2"]
    y = x ** g / t
    return (math.log(2 * g) - np.log(x) - lg(m1) - lg(m2) + 0.5 * (m1 + m2) * np.log(y)
            + _log_k(m2 - m1, 2.0 * np.sqrt(y)))


def _special_boundary(p, t):
    g, m1, m2 = p["gamma"], p["mu1"], p["mu2"]
    return _power_boundary(g * min(m1, m2) - 1, log_at_zero=(m1 == m2))


def _special_origin(t, p):
    g, m1, m2 = p["gamma"], p["mu1"], p["mu2"]
    b = _special_boundary(p, t)
    if b.divergence_at_origin != "none":
        return math.inf
    if g * min(m1, m2) - 1 > 0:
        return 0.0
    nu = abs(m2 - m1)
    return g * math.gamma(nu) / (math.gamma(m1) * math.gamma(m2)) * t ** (-min(m1, m2))


# B(G_1(t)) in n dimensions, radial profile.
def _bg_const(mu: float, n: float) -> float:
    return 2.0 ** (1.0 - mu - n / 2.0) / (math.pi ** (n / 2.0) * math.gamma(mu))


def _bg_log(r, t, mu, n):
    nu = mu - n / 2.0
    a = math.sqrt(2.0 / t)
    return (math.log(_bg_const(mu, n)) + nu * np.log(r) + (2 * mu + n) / 4.0 * math.log(2.0 / t)
            + _log_k(nu, r * a))


def _bg_boundary(mu, n):
    nu = mu - n / 2.0
    if nu > 0:
        return SupportBoundary(True, "none")
    if nu == 0:
        return SupportBoundary(False, "logarithmic")
    return SupportBoundary(False, "power")


def _bg_origin(t, mu, n):
    nu = mu - n / 2.0
    if nu <= 0:
        return math.inf
    a = math.sqrt(2.0 / t)
    return _bg_const(mu, n) * (2.0 / t) ** ((2 * mu + n) / 4.0) * _k_origin_limit(nu) * a ** (-nu)


def _k0law_log(x, t, p):
    h = p["H"]
    th = t ** h
    return -LOGPI - math.log(th) + _log_k(0.0, np.abs(x) / th)


def _llla_log(r, t, p):
    a = math.sqrt(2.0 / t)
    return -LOGPI - 0.5 * math.log(2.0 * t) - a * r - np.log(r)


def _sdi_log(r, t, p):
    n = p["n"]
    return ((1 - n) * LOG2 - 0.5 * n * math.log(math.pi * t) - lg(n / 2.0)
            + _log_k(0.0, r / math.sqrt(t)))


def _cauchy_log(x, t, p):
    return math.log(t) - LOGPI - np.log(t * t + x * x)


# G_{gamma1}(G_{gamma2}(t)) by one-dimensional quadrature of the composition.
# In u = log s the integrand is smooth with double-exponential tails, so a
# composite Gauss-Legendre rule over the window where it exceeds e^-60 of its
# peak is accurate to roundoff.
_COMPOSE_SCAN = 4001
_COMPOSE_PANELS = 60
_COMPOSE_ORDER = 20


def _compose_log_integrand(x: np.ndarray, u: np.ndarray, t: float, p: dict) -> np.ndarray:
    g1, g2, mu = p["gamma1"], p["gamma2"], p["mu"]
    s = np.exp(u)[None, :]
    xx = x[:, None]
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = _gg_log(xx, s, {"gamma": g1, "mu": mu})
        b = _gg_log(s, t, {"gamma": g2, "mu": mu})
        v = a + b + u[None, :]
    return np.where(np.isnan(v), -np.inf, v)


def _compose_log(x, t, p):
    xs = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    centre = math.log(t) / p["gamma2"]
    width = 60.0 / min(abs(p["gamma2"]), 1.0) + abs(math.log(np.max(xs)) * p["gamma1"])
    scan = np.linspace(centre - width, centre + width, _COMPOSE_SCAN)
    out = np.empty(xs.shape)
    for i, xv in enumerate(xs):
        lv = _compose_log_integrand(np.array([xv]), scan, t, p)[0]
        peak = float(np.max(lv))
        if not np.isfinite(peak):
            out[i] = -np.inf
            continue
        keep = np.nonzero(lv > peak - 60.0)[0]
        step = scan[1] - scan[0]
        lo, hi = scan[keep[0]] - 2 * step, scan[keep[-1]] + 2 * step
        nodes, weights = gauss_legendre_panels(lo, hi, _COMPOSE_PANELS, _COMPOSE_ORDER)
        vals = _compose_log_integrand(np.array([xv]), nodes, t, p)[0]
        out[i] = peak + math.log(float(np.sum(weights * np.exp(vals - peak))))
    out = out.reshape(np.shape(x)) if np.ndim(x) else out
    return out if np.ndim(x) else out[0]


def _compose_boundary(p, t):
    lo = S.form_of(S.Compose(S.gg(p["gamma1"], p["mu"]), S.gg(p["gamma2"], p["mu"]))).strip[0]
    return _power_boundary(lo - 1.0, log_at_zero=True)


def _compose_origin(t, p):
    return 0.0 if _compose_boundary(p, t).divergence_at_origin == "none" else math.inf


# Correlated bivariate generalized Gamma (n = 2), Bessel-I closed form.
def _biv_log(xy, t, p):
    mu, g, rho = p["mu"], p["gamma"], p["rho"]
    s = p["t2"] if p["t2"] > 0 else t
    x, y = xy[..., 0], xy[..., 1]
    phi = 1.0 - rho
    xg, yg = x ** g, y ** g
    base = (2 * math.log(abs(g)) + (g * mu - 1) * np.log(x * y) - (xg / t + yg / s) / phi
            - mu * math.log(phi) - mu * math.log(t * s) - lg(mu))
    if rho == 0:
        return base - lg(mu)
    z = rho * xg * yg / (phi * phi * t * s)
    arg = 2.0 * np.sqrt(z)
    with np.errstate(divide="ignore"):
        # z^((1-mu)/2) I_{mu-1}(2 sqrt z) -> 1/Gamma(mu) at z = 0
        tail = np.where(z > 0, 0.5 * (1 - mu) * np.log(np.where(z > 0, z, 1.0))
                        + np.log(bessel_i(mu - 1, np.where(z > 0, arg, 1.0))), -lg(mu))
    return base + tail


def _biv_check(p):
    _need(0 <= p["rho"] < 1, "rho must lie in [0, 1)")
    _need(p["mu"] > 0 and p["gamma"] != 0, "need mu > 0 and gamma != 0")


def _mu_gamma_check(p):
    _need(p["mu"] > 0, "mu must be positive")
    _need(p["gamma"] != 0, "gamma must be nonzero")


def _pos_gamma_check(p):
    _need(p["mu"] > 0 and p["gamma"] > 0, "need mu > 0 and gamma > 0")


def _n_check(p):
    _need(p["n"] >= 1 and float(p["n"]).is_integer(), "n must be a positive integer")


def _law(**kw) -> DensityLaw:
    return DensityLaw(**kw)


def _bg_alt(n_key: Optional[str]):
    def n_of(p):
        return p[n_key] if n_key else 1.0
    return {
        "2/pi^(n/2)": lambda p: 2.0 / (math.pi ** (n_of(p) / 2.0) * math.gamma(p["mu"])),
        "2^(1-mu)/pi^(n/2)": lambda p: 2.0 ** (1 - p["mu"]) / (math.pi ** (n_of(p) / 2.0) * math.gamma(p["mu"])),
    }


CATALOG: dict[str, DensityLaw] = {}


def _register(law: DensityLaw) -> None:
    CATALOG[law.id] = law


_register(_law(
    id="ggen", label="generalized Gamma, scale c = t", support="positive-line",
    defaults={"mu": 0.8, "gamma": 1.7}, log_eval=_ggen_log, boundary_fn=_gen_boundary,
    origin_fn=_ggen_origin, expr_fn=lambda p: S.ggt(p["gamma"], p["mu"]), check=_mu_gamma_check))
_register(_law(
    id="gg", label="generalized Gamma Q(x; t, mu, gamma), marginal of G_gamma(t)", support="positive-line",
    defaults={"mu": 1.3, "gamma": 1.5}, log_eval=_gg_log, boundary_fn=_gen_boundary,
    origin_fn=_gg_origin, expr_fn=lambda p: S.gg(p["gamma"], p["mu"]),
    scale_fn=lambda t, p: t ** (1.0 / p["gamma"]), check=_mu_gamma_check))
_register(_law(
    id="gamma_levy", label="Gamma subordinator marginal, shape t", support="positive-line",
    defaults={}, log_eval=_levy_log, boundary_fn=lambda p, t: _power_boundary(t - 1),
    origin_fn=_levy_origin, scale_fn=lambda t, p: max(t, 1.0)))
_register(_law(
    id="gtilde", label="G-tilde_gamma(G-tilde_gamma(t)), K_0 form", support="positive-line",
    defaults={"mu": 0.7, "gamma": 1.5}, log_eval=_gtilde_log, boundary_fn=_k0_boundary,
    origin_fn=_k0_origin, expr_fn=lambda p: S.Compose(S.ggt(p["gamma"], p["mu"]), S.ggt(p["gamma"], p["mu"])),
    check=_mu_gamma_check))
_register(_law(
    id="qaqa", label="G-tilde_gamma(G-tilde_-gamma(t)), equal shapes", support="positive-line",
    defaults={"mu": 0.5, "gamma": 2.0}, log_eval=_qaqa_log,
    boundary_fn=lambda p, t: _power_boundary(p["mu"] * p["gamma"] - 1),
    origin_fn=_qaqa_origin, expr_fn=lambda p: S.Compose(S.ggt(p["gamma"], p["mu"]), S.ggt(-p["gamma"], p["mu"])),
    check=_pos_gamma_check))
_register(_law(
    id="tdist0", label="G-tilde_gamma,mu1(G-tilde_-gamma,mu2(t))", support="positive-line",
    defaults={"mu1": 0.7, "mu2": 1.2, "gamma": 1.5}, log_eval=_tdist0_log,
    boundary_fn=lambda p, t: _power_boundary(p["gamma"] * p["mu1"] - 1),
    origin_fn=_tdist0_origin,
    expr_fn=lambda p: S.Compose(S.ggt(p["gamma"], p["mu1"]), S.ggt(-p["gamma"], p["mu2"])),
    check=lambda p: _need(p["gamma"] > 0 and p["mu1"] > 0 and p["mu2"] > 0, "need gamma, mu1, mu2 > 0")))
_register(_law(
    id="tdist1", label="folded Student law, nu degrees of freedom at t = sqrt(nu)", support="positive-line",
    defaults={"nu": 3.0}, log_eval=_tdist1_log, boundary_fn=lambda p, t: SupportBoundary(True, "none"),
    origin_fn=_tdist1_origin,
    expr_fn=lambda p: S.Compose(S.ggt(2.0, 0.5), S.ggt(-2.0, p["nu"] / 2.0)),
    check=lambda p: _need(p["nu"] > 0, "nu must be positive")))
_register(_law(
    id="unok", label="G_gamma(G_1(t)), K_0 form", support="positive-line",
    defaults={"mu": 0.8, "gamma": 1.5}, log_eval=_unok_log, boundary_fn=_k0_boundary,
    origin_fn=_k0_origin, expr_fn=lambda p: S.Compose(S.gg(p["gamma"], p["mu"]), S.gg(1.0, p["mu"])),
    scale_fn=lambda t, p: t ** (1.0 / p["gamma"]), check=_pos_gamma_check))
_register(_law(
    id="special_gg", label="G_gamma,mu1(G_1,mu2(t)), K_(mu2-mu1) form", support="positive-line",
    defaults={"mu1": 0.8, "mu2": 1.4, "gamma": 1.5}, log_eval=_special_log, boundary_fn=_special_boundary,
    origin_fn=_special_origin,
    expr_fn=lambda p: S.Compose(S.gg(p["gamma"], p["mu1"]), S.gg(1.0, p["mu2"])),
    scale_fn=lambda t, p: t ** (1.0 / p["gamma"]),
    check=lambda p: _need(p["gamma"] > 0 and p["mu1"] > 0 and p["mu2"] > 0, "need gamma, mu1, mu2 > 0")))
_register(_law(
    id="bg1", label="B(G_1(t)), Brownian motion with Gamma time", support="real-line",
    defaults={"mu": 1.3}, log_eval=lambda x, t, p: _bg_log(np.abs(x), t, p["mu"], 1.0),
    boundary_fn=lambda p, t: _bg_boundary(p["mu"], 1.0),
    origin_fn=lambda t, p: _bg_origin(t, p["mu"], 1.0),
    expr_fn=lambda p: S.Compose(S.Brown(), S.gg(1.0, p["mu"])),
    check=lambda p: _need(p["mu"] > 0, "mu must be positive"),
    alt_constants=_bg_alt(None), constant_fn=lambda p: _bg_const(p["mu"], 1.0)))
_register(_law(
    id="ssr", label="B_(gamma/2)(G_gamma(t)), same law as B(G_1(t))", support="real-line",
    defaults={"mu": 1.3, "gamma": 1.2}, log_eval=lambda x, t, p: _bg_log(np.abs(x), t, p["mu"], 1.0),
    boundary_fn=lambda p, t: _bg_boundary(p["mu"], 1.0),
    origin_fn=lambda t, p: _bg_origin(t, p["mu"], 1.0),
    expr_fn=lambda p: S.Compose(S.FBM(p["gamma"] / 2.0), S.gg(p["gamma"], p["mu"])),
    check=lambda p: _need(p["mu"] > 0 and 0 < p["gamma"] < 2, "need mu > 0 and 0 < gamma < 2")))
_register(_law(
    id="multi_bg1", label="n-dimensional B(G_1(t)), radial", support="real-n-space",
    defaults={"mu": 1.3, "n": 2}, log_eval=lambda r, t, p: _bg_log(r, t, p["mu"], p["n"]),
    boundary_fn=lambda p, t: _bg_boundary(p["mu"], p["n"]),
    origin_fn=lambda t, p: _bg_origin(t, p["mu"], p["n"]),
    check=lambda p: (_need(p["mu"] > 0, "mu must be positive"), _n_check(p)),
    alt_constants=_bg_alt("n"), constant_fn=lambda p: _bg_const(p["mu"], p["n"])))
_register(_law(
    id="density_k0", label="B_H1(|B_H(t)|^(1/H1)), K_0 form", support="real-line",
    defaults={"H": 0.3}, log_eval=_k0law_log,
    boundary_fn=lambda p, t: SupportBoundary(False, "logarithmic"),
    origin_fn=lambda t, p: math.inf,
    expr_fn=lambda p: S.Compose(S.Brown(), S.gg(1.0, 0.5, 2.0, 2.0 * p["H"])),
    scale_fn=lambda t, p: t ** p["H"],
    check=lambda p: _need(0 < p["H"] <= 1, "H must lie in (0, 1]")))
_register(_law(
    id="llla", label="planar B(G_1(t)) with mu = 1/2, radial", support="real-n-space",
    defaults={"n": 2}, log_eval=_llla_log,
    boundary_fn=lambda p, t: SupportBoundary(False, "power"), origin_fn=lambda t, p: math.inf,
    check=lambda p: _need(p["n"] == 2, "this law is planar (n = 2)"),
    alt_constants={"1/(pi sqrt t)": lambda p: 1.0 / math.pi}, constant_fn=lambda p: 1.0 / (math.pi * math.sqrt(2.0))))
_register(_law(
    id="sdi", label="n-dimensional B(G_1(2t)) with mu = n/2, radial", support="real-n-space",
    defaults={"n": 2}, log_eval=_sdi_log,
    boundary_fn=lambda p, t: SupportBoundary(False, "logarithmic"), origin_fn=lambda t, p: math.inf,
    check=_n_check,
    alt_constants={"2/((pi t)^(n/2) Gamma(n/2))": lambda p: 2.0 / math.gamma(p["n"] / 2.0)},
    constant_fn=lambda p: 2.0 ** (1 - p["n"]) / math.gamma(p["n"] / 2.0)))
_register(_law(
    id="cauchy", label="Cauchy process marginal", support="real-line",
    defaults={}, log_eval=_cauchy_log, boundary_fn=lambda p, t: SupportBoundary(True, "none"),
    origin_fn=lambda t, p: 1.0 / (math.pi * t), expr_fn=lambda p: S.Cauchy()))
_register(_law(
    id="gg_compose", label="G_gamma1(G_gamma2(t)) by quadrature of the composition", support="positive-line",
    defaults={"mu": 0.8, "gamma1": 1.5, "gamma2": 0.7}, log_eval=_compose_log, boundary_fn=_compose_boundary,
    origin_fn=_compose_origin,
    expr_fn=lambda p: S.Compose(S.gg(p["gamma1"], p["mu"]), S.gg(p["gamma2"], p["mu"])),
    scale_fn=lambda t, p: t ** (1.0 / (p["gamma1"] * p["gamma2"])),
    check=lambda p: _need(p["mu"] > 0 and p["gamma1"] != 0 and p["gamma2"] != 0, "need mu > 0, gammas != 0")))
_register(_law(
    id="bivariate_gamma", label="correlated bivariate generalized Gamma, Bessel-I form",
    support="positive-quadrant", defaults={"mu": 1.3, "gamma": 1.0, "rho": 0.4, "t2": 0.0},
    log_eval=_biv_log, boundary_fn=lambda p, t: _power_boundary(p["gamma"] * p["mu"] - 1),
    origin_fn=lambda t, p: math.nan, check=_biv_check))


def get_law(law_id: str) -> DensityLaw:
    try:
        return CATALOG[law_id]
    except KeyError:
        raise KeyError(f"unknown law {law_id!r}; known: {', '.join(sorted(CATALOG))}") from None


# ---------------------------------------------------------------- evaluation

def _as_law(law) -> DensityLaw:
    return law if isinstance(law, DensityLaw) else get_law(law)


def eval_density(law, x, t: float, params: Optional[Mapping[str, float]] = None):
    """Density q(x, t).

    Positive-line laws take x >= 0; real-line laws any real x; R^n laws take
    either a point (last axis of length n) or a radius; the bivariate law
    takes points with a last axis of length 2.
    """
    law = _as_law(law)
    if not t > 0:
        raise DomainError("t must be positive")
    p = law.params(params)
    xa = np.asarray(x, dtype=float)
    if law.support == "positive-quadrant":
        if xa.shape[-1:] != (2,):
            raise DomainError("bivariate law needs points (x, y)")
        if np.any(xa < 0):
            raise DomainError("bivariate law lives on the positive quadrant")
        with np.errstate(divide="ignore"):
            return np.exp(law.log_eval(xa, t, p))
    if law.support == "real-n-space":
        n = int(p["n"])
        if xa.ndim >= 1 and xa.shape[-1] == n and n > 1:
            xa = np.linalg.norm(xa, axis=-1)
        xa = np.abs(xa)
    elif law.support == "positive-line":
        if np.any(xa < 0):
            raise DomainError(f"law {law.id!r} lives on the positive half-line")
    scalar = xa.ndim == 0
    xs = np.atleast_1d(xa)
    out = np.empty(xs.shape)
    zero = xs == 0
    if zero.any():
        out[zero] = law.origin_fn(t, p)
    if (~zero).any():
        xx = np.abs(xs[~zero]) if law.support == "real-line" else xs[~zero]
        with np.errstate(divide="ignore", over="ignore"):
            out[~zero] = np.exp(law.log_eval(xx, t, p))
    return float(out[0]) if scalar else out


def _scalar_density(law: DensityLaw, p: dict, t: float) -> Callable[[float], float]:
    def f(x: float) -> float:
        if x == 0:
            return 0.0
        with np.errstate(divide="ignore", over="ignore"):
            return float(np.exp(law.log_eval(np.array([x]), t, p))[0])
    return f


def normalization_check(law, t: float, params: Optional[Mapping[str, float]] = None) -> float:
    """Total mass of q(., t) by adaptive quadrature (radial for R^n laws)."""
    law = _as_law(law)
    p = law.params(params)
    if law.support == "positive-quadrant":
        return bivariate_expectation(lambda x, y: np.ones_like(x), t, p)
    f = _scalar_density(law, p, t)
    scale = law.scale_fn(t, p)
    if law.support == "positive-line":
        return integrate_half_line(f, scale)
    if law.support == "real-line":
        return 2.0 * integrate_half_line(f, scale)
    n = int(p["n"])
    sphere = 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)
    return sphere * integrate_half_line(lambda r: r ** (n - 1) * f(r), scale)


def mellin_numeric(law, eta: complex, t: float, params: Optional[Mapping[str, float]] = None) -> complex:
    """int_0^inf x^(eta-1) q(x, t) dx; real-line laws use the folded variable."""
    law = _as_law(law)
    if law.support not in ("positive-line", "real-line"):
        raise DomainError("Mellin transform is defined here for one-dimensional laws only")
    p = law.params(params)
    f = _scalar_density(law, p, t)
    eta = complex(eta)
    a, b = eta.real - 1.0, eta.imag
    scale = law.scale_fn(t, p)
    re = integrate_half_line(lambda x: x ** a * math.cos(b * math.log(x)) * f(x) if x > 0 else 0.0, scale)
    im = 0.0
    if b != 0:
        im = integrate_half_line(lambda x: x ** a * math.sin(b * math.log(x)) * f(x) if x > 0 else 0.0, scale)
    fold = 2.0 if law.support == "real-line" else 1.0
    return fold * complex(re, im)


# ---------------------------------------------------------------- bivariate law

def bivariate_expectation(g: Callable[[np.ndarray, np.ndarray], np.ndarray], t: float, params: Mapping[str, float],
                          panels: int = 60, order: int = 20) -> float:
    """E g(X, Y) under the bivariate law by tensor Gauss-Legendre quadrature.

    Integrates in u = x^(1/2) so that x^(gamma mu - 1) endpoint behaviour is
    smoothed; the box edge is placed where the marginal tails are below 1e-25.
    """
    law = CATALOG["bivariate_gamma"]
    p = law.params(params)
    s = p["t2"] if p["t2"] > 0 else t
    mu, g_ = p["mu"], p["gamma"]
    _need(g_ > 0, "quadrature box assumes gamma > 0")
    edge = [(c * (60.0 + 4.0 * mu)) ** (1.0 / g_) for c in (t, s)]
    ux, wx = gauss_legendre_panels(0.0, math.sqrt(edge[0]), panels, order)
    uy, wy = gauss_legendre_panels(0.0, math.sqrt(edge[1]), panels, order)
    x, y = ux * ux, uy * uy
    jx, jy = 2.0 * ux * wx, 2.0 * uy * wy
    X, Y = np.meshgrid(x, y, indexing="ij")
    pts = np.stack([X, Y], axis=-1)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        dens = np.exp(law.log_eval(pts, t, p))
    dens = np.nan_to_num(dens, nan=0.0, posinf=0.0)
    return float(np.einsum("i,ij,j->", jx, dens * g(X, Y), jy))


def bivariate_gamma_covariance(mu: float, gamma: float, rho: float, t1: float, t2: float) -> float:
    """E{G(t1) G(t2)} for the correlated bivariate law (raw product moment).

    gamma > 0: phi^mu (phi^2 t1 t2)^(1/gamma) Gamma^2(mu + 1/gamma)/Gamma^2(mu)
               * F(mu + 1/gamma, mu + 1/gamma; mu; rho),   phi = 1 - rho.
    gamma < 0 (write g = |gamma|): (t1 t2)^(-1/g) Gamma^2(mu - 1/g)/Gamma^2(mu)
               * F(1/g, 1/g; mu; rho).
    """
    _need(0 <= rho < 1, "rho must lie in [0, 1)")
    _need(mu > 0 and gamma != 0, "need mu > 0 and gamma != 0")
    if gamma > 0:
        a = mu + 1.0 / gamma
        phi = 1.0 - rho
        log_c = mu * math.log(phi) + (2 * math.log(phi) + math.log(t1 * t2)) / gamma + 2 * (lg(a) - lg(mu))
        return math.exp(log_c) * hyp2f1(a, a, mu, rho)
    g = -gamma
    _need(mu - 1.0 / g > 0, "second moment is infinite unless mu > 1/|gamma|")
    log_c = -math.log(t1 * t2) / g + 2 * (lg(mu - 1.0 / g) - lg(mu))
    return math.exp(log_c) * hyp2f1(1.0 / g, 1.0 / g, mu, rho)

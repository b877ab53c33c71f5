"""Fox H-function by Mellin-Barnes quadrature on a vertical line.

Convention used throughout::

    H(x) = (1/2 pi i) int_C Hcal(eta) x^eta d eta,

    Hcal(eta) = prod_{j<=m} Gamma(b_j - eta beta_j) prod_{i<=n} Gamma(1 - a_i + eta alpha_i)
                / [prod_{j>m} Gamma(1 - b_j + eta beta_j) prod_{i>n} Gamma(a_i - eta alpha_i)].

The more common convention integrates x^(-s) with Gamma(b_j + s beta_j); the
two agree under eta = -s, so int_0^inf x^(s-1) H(x) dx = Hcal(-s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np
from scipy import optimize

from .errors import ConvergenceError, DomainError, PoleError
from .specfun import log_gamma

__all__ = [
    "HParams", "HResult", "HRepresentation", "h_mellin", "h_eval", "h_rescale", "h_shift",
    "contour_abscissa", "saddle_abscissa", "REPRESENTATIONS", "h_density",
]

GL_ORDER = 64
T_START = 20.0
T_CAP = 400.0


@dataclass(frozen=True)
class HParams:
    m: int
    n: int
    upper: tuple[tuple[float, float], ...] = ()
    lower: tuple[tuple[float, float], ...] = ()
    delta: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple((float(a), float(al)) for a, al in self.upper))
        object.__setattr__(self, "lower", tuple((float(b), float(be)) for b, be in self.lower))
        p, q = len(self.upper), len(self.lower)
        if not (0 <= self.m <= q and 0 <= self.n <= p):
            raise DomainError(f"need 0 <= m <= q and 0 <= n <= p (m={self.m}, n={self.n}, p={p}, q={q})")
        if any(al < 0 for _, al in self.upper) or any(be < 0 for _, be in self.lower):
            raise DomainError("alpha_i and beta_j must be nonnegative")
        d = (sum(be for _, be in self.lower[: self.m]) + sum(al for _, al in self.upper[: self.n])
             - sum(be for _, be in self.lower[self.m:]) - sum(al for _, al in self.upper[self.n:]))
        object.__setattr__(self, "delta", d)

    @property
    def p(self) -> int:
        return len(self.upper)

    @property
    def q(self) -> int:
        return len(self.lower)

    def to_json(self) -> dict:
        return {"m": self.m, "n": self.n, "p": self.p, "q": self.q,
                "upper": [list(u) for u in self.upper], "lower": [list(b) for b in self.lower]}


@dataclass(frozen=True)
class HResult:
    value: float
    T_used: float
    est_error: float
    theta: float


def _log_kernel(params: HParams, eta: np.ndarray) -> np.ndarray:
    # log Hcal(eta), complex; denominator poles give -inf real part
    out = np.zeros(eta.shape, dtype=complex)
    for j, (b, be) in enumerate(params.lower):
        if j < params.m:
            out += log_gamma(b - eta * be)
        else:
            out -= log_gamma(1.0 - b + eta * be)
    for i, (a, al) in enumerate(params.upper):
        if i < params.n:
            out += log_gamma(1.0 - a + eta * al)
        else:
            out -= log_gamma(a - eta * al)
    return out


def h_mellin(params: HParams, eta) -> complex:
    """Hcal(-eta), i.e. int_0^inf x^(eta-1) H(x) dx, as a closed Gamma product."""
    e = -np.atleast_1d(np.asarray(eta, dtype=complex))
    for j, (b, be) in enumerate(params.lower[: params.m]):
        _check_pole(b - e * be)
    for i, (a, al) in enumerate(params.upper[: params.n]):
        _check_pole(1.0 - a + e * al)
    num = np.ones(e.shape, dtype=complex)
    for j, (b, be) in enumerate(params.lower):
        z = b - e * be if j < params.m else 1.0 - b + e * be
        num = num * np.exp(log_gamma(z)) if j < params.m else num * _rgamma_c(z)
    for i, (a, al) in enumerate(params.upper):
        z = 1.0 - a + e * al if i < params.n else a - e * al
        num = num * np.exp(log_gamma(z)) if i < params.n else num * _rgamma_c(z)
    return complex(num[0]) if np.ndim(eta) == 0 else num


def _check_pole(z: np.ndarray) -> None:
    if np.any((z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))):
        raise PoleError("h_mellin: eta sits on a pole of the numerator")


def _rgamma_c(z: np.ndarray) -> np.ndarray:
    pole = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    safe = np.where(pole, 1.0, z)
    return np.where(pole, 0.0, np.exp(-log_gamma(safe)))


def _pole_bounds(params: HParams) -> tuple[float, float]:
    # right poles of Gamma(b_j - eta beta_j) start at b_j/beta_j;
    # left poles of Gamma(1 - a_i + eta alpha_i) end at (a_i - 1)/alpha_i
    right = min((b / be for b, be in params.lower[: params.m] if be > 0), default=math.inf)
    left = max(((a - 1.0) / al for a, al in params.upper[: params.n] if al > 0), default=-math.inf)
    return left, right


def contour_abscissa(params: HParams) -> float:
    """theta = min_j b_j/beta_j - 1/2, moved to the gap midpoint if that crosses a left pole."""
    left, right = _pole_bounds(params)
    if not left < right:
        raise PoleError("left and right pole sequences overlap; no separating contour")
    if math.isinf(right):
        return left + 0.5 if math.isfinite(left) else 0.0
    theta = right - 0.5
    if theta <= left:
        theta = 0.5 * (left + right)
    return theta


def saddle_abscissa(params: HParams, x: float) -> float:
    """Abscissa minimizing |Hcal(theta) x^theta| between the pole sequences.

    The integrand modulus on the line is bounded by its value on the real
    axis, so this choice limits cancellation when H(x) is tiny.
    """
    left, right = _pole_bounds(params)
    if not left < right:
        raise PoleError("left and right pole sequences overlap; no separating contour")
    lo = left if math.isfinite(left) else (right if math.isfinite(right) else 0.0) - 60.0
    hi = right if math.isfinite(right) else lo + 120.0
    pad = 1e-6 * max(1.0, hi - lo)
    logx = math.log(x)

    def phi(th: float) -> float:
        return float(_log_kernel(params, np.array([th + 0j]))[0].real) + th * logx

    res = optimize.minimize_scalar(phi, bounds=(lo + pad, hi - pad), method="bounded",
                                   options={"xatol": 1e-6})
    return float(res.x)


def h_eval(params: HParams, x: float, tol: float = 1e-10, theta: Optional[float] = None,
           contour: str = "standard") -> HResult:
    """Evaluate H(x) as (1/pi) int_0^inf Re[Hcal(theta + iy) x^(theta + iy)] dy.

    Composite 64-point Gauss-Legendre on unit panels; the half-height starts
    at 20 and doubles until the newest band [T, 2T] adds less than
    tol * |accumulated|.  Raises ConvergenceError past T = 400.

    ``contour="standard"`` uses theta = min b_j/beta_j - 1/2;
    ``contour="saddle"`` uses :func:`saddle_abscissa`, which keeps relative
    accuracy where H(x) is exponentially small.
    """
    if not x > 0:
        raise DomainError("h_eval requires x > 0")
    if not params.delta > 0:
        raise DomainError(f"unsupported regime: convergence indicator {params.delta:g} is not positive")
    if theta is None:
        if contour == "saddle":
            theta = saddle_abscissa(params, x)
        elif contour == "standard":
            theta = contour_abscissa(params)
        else:
            raise ValueError(f"unknown contour rule {contour!r}")
    else:
        left, right = _pole_bounds(params)
        if not left < theta < right:
            raise PoleError(f"theta = {theta} does not separate the pole sequences ({left}, {right})")
    gx, gw = np.polynomial.legendre.leggauss(GL_ORDER)
    logx = math.log(x)

    def band(lo: float, hi: float) -> float:
        k = int(round(hi - lo))
        starts = lo + np.arange(k, dtype=float)
        y = (starts[:, None] + 0.5 * (gx[None, :] + 1.0)).ravel()
        w = np.tile(0.5 * gw, k)
        eta = theta + 1j * y
        val = np.exp(_log_kernel(params, eta) + eta * logx).real
        # pairwise summation keeps results bit-stable for a fixed panel count
        return float(np.sum(w * val)) / math.pi

    acc = band(0.0, T_START)
    T = T_START
    while True:
        if 2 * T > T_CAP:
            raise ConvergenceError(f"h_eval: contour truncation did not converge by T = {T_CAP:g}")
        extra = band(T, 2 * T)
        acc += extra
        T *= 2
        if abs(extra) < tol * abs(acc) or acc == 0.0 and extra == 0.0:
            return HResult(acc, T, abs(extra), theta)


def h_rescale(params: HParams, c: float) -> HParams:
    """Power rule: H_P(x) = c H_{P'}(x^c) where P' has every alpha, beta multiplied by c > 0."""
    if not c > 0:
        raise DomainError("power rule requires c > 0")
    return HParams(params.m, params.n,
                   tuple((a, c * al) for a, al in params.upper),
                   tuple((b, c * be) for b, be in params.lower))


def h_shift(params: HParams, c: float) -> HParams:
    """Shift rule: x^c H_P(x) = H_{P''}(x) with a_i -> a_i + c alpha_i, b_j -> b_j + c beta_j."""
    return HParams(params.m, params.n,
                   tuple((a + c * al, al) for a, al in params.upper),
                   tuple((b + c * be, be) for b, be in params.lower))


# ---------------------------------------------------------------- density representations

@dataclass(frozen=True)
class HRepresentation:
    """q(x, t) = prefactor(x, t) * H_P[x * arg_scale(t)].

    ``quoted_ratio`` gives (quoted prefactor)/(correct prefactor) where a
    commonly quoted form of the representation differs from the one that
    integrates to one.
    """

    id: str
    label: str
    defaults: Mapping[str, object]
    build: Callable[[dict, float], tuple[float, float, HParams]]  # -> (log const, arg scale, params)
    law: str
    law_params: Callable[[dict], dict]
    quoted_ratio: Optional[Callable[[dict, float], float]] = None

    def params(self, overrides: Optional[Mapping[str, object]] = None) -> dict:
        p = dict(self.defaults)
        for k, v in (overrides or {}).items():
            if k not in p:
                raise KeyError(f"representation {self.id!r} has no parameter {k!r}")
            p[k] = v
        return p


def _lgn(mu: float, k: int) -> float:
    return k * math.lgamma(mu)


def _rap(p, t):
    gam: Sequence[float] = p["gammas"]
    lower = tuple((p["mu"], 1.0 / g) for g in gam)
    return -_lgn(p["mu"], len(gam)), 1.0 / t, HParams(len(gam), 0, (), lower)


def _gg2(p, t):
    g1, g2, mu = p["gamma1"], p["gamma2"], p["mu"]
    s = t ** (-1.0 / (g1 * g2))
    return -_lgn(mu, 2), s, HParams(2, 0, (), ((mu, 1.0 / g1), (mu, 1.0 / (g1 * g2))))


def _dfh(p, t):
    g, mu = p["gamma"], p["mu"]
    # the (mu, 0) upper pairs only contribute the constant 1/Gamma(mu)^2
    return 0.0, t ** (-1.0 / g), HParams(2, 0, ((mu, 0.0), (mu, 0.0)), ((mu, 1.0), (mu, 1.0 / g)))


def _tt(p, t):
    g, mu = p["gamma"], p["mu"]
    return -_lgn(mu, 2), t ** (1.0 / g ** 2), HParams(1, 1, ((1.0 - mu, 1.0 / g ** 2),), ((mu, 1.0 / g),))


def _meijer(p, t, g):
    # q = x^(g mu - 1) / (t^mu Gamma^k(mu)) H^{k,0}_{0,k}[x / t^(1/g) | (0, 1/g)_k]; the
    # x-power is folded into the H parameters by the shift rule
    k, mu = int(p["n"]), p["mu"]
    s = t ** (-1.0 / g)
    base = HParams(k, 0, (), tuple((0.0, 1.0 / g) for _ in range(k)))
    shifted = h_shift(base, g * mu)  # (x s)^(g mu) H(x s)
    return -_lgn(mu, k) - mu * math.log(t) - g * mu * math.log(s), s, shifted


REPRESENTATIONS: dict[str, HRepresentation] = {}


def _reg(r: HRepresentation) -> None:
    REPRESENTATIONS[r.id] = r


_reg(HRepresentation(
    id="rap1", label="generalized Gamma with scale t, one H^{1,0}_{0,1} factor",
    defaults={"mu": 0.8, "gammas": (1.7,)}, build=_rap, law="ggen",
    law_params=lambda p: {"mu": p["mu"], "gamma": p["gammas"][0]},
    quoted_ratio=lambda p, t: 1.0 / t))
_reg(HRepresentation(
    id="rap2", label="G-tilde composition of two factors, H^{2,0}_{0,2}",
    defaults={"mu": 0.7, "gammas": (1.5, 1.5)}, build=_rap, law="gtilde",
    law_params=lambda p: {"mu": p["mu"], "gamma": p["gammas"][0]},
    quoted_ratio=lambda p, t: 1.0 / t))
_reg(HRepresentation(
    id="rap3", label="G-tilde composition of n factors, H^{n,0}_{0,n}",
    defaults={"mu": 0.8, "gammas": (1.7, 1.5, 1.5)}, build=_rap, law="",
    law_params=lambda p: {}, quoted_ratio=lambda p, t: 1.0 / t))
_reg(HRepresentation(
    id="h_gamma_gamma", label="G_gamma1(G_gamma2(t)), H^{2,0}_{0,2}",
    defaults={"mu": 0.8, "gamma1": 1.5, "gamma2": 1.0}, build=_gg2, law="unok",
    law_params=lambda p: {"mu": p["mu"], "gamma": p["gamma1"]},
    quoted_ratio=lambda p, t: t ** (-1.0 / (p["gamma1"] * p["gamma2"]))))
_reg(HRepresentation(
    id="dfh", label="G_1(G_gamma(t)), H^{2,0}_{2,2} with (mu, 0) upper pairs",
    defaults={"mu": 0.8, "gamma": 1.0}, build=_dfh, law="unok",
    law_params=lambda p: {"mu": p["mu"], "gamma": 1.0},
    quoted_ratio=lambda p, t: t ** (-1.0 / p["gamma"])))
_reg(HRepresentation(
    id="dens_tt", label="G_gamma(G_-gamma(t)), H^{1,1}_{1,1}",
    defaults={"mu": 0.9, "gamma": 1.3}, build=_tt, law="gg_compose",
    law_params=lambda p: {"mu": p["mu"], "gamma1": p["gamma"], "gamma2": -p["gamma"]},
    quoted_ratio=lambda p, t: t ** (1.0 / p["gamma"] ** 2)))
_reg(HRepresentation(
    id="gmei", label="Meijer G^{n,0}_{0,n} form of the n-fold G_1 composition",
    defaults={"mu": 0.8, "n": 2}, build=lambda p, t: _meijer(p, t, 1.0), law="unok",
    law_params=lambda p: {"mu": p["mu"], "gamma": 1.0}))
_reg(HRepresentation(
    id="jjjl", label="H^{n,0}_{0,n} form with (0, 1/gamma) pairs",
    defaults={"mu": 0.8, "n": 2, "gamma": 1.5}, build=lambda p, t: _meijer(p, t, p["gamma"]), law="unok",
    law_params=lambda p: {"mu": p["mu"], "gamma": p["gamma"]}))


def h_density(rep: str, x: float, t: float, params: Optional[Mapping[str, object]] = None,
              tol: float = 1e-10) -> float:
    """Density value from an H-representation, q(x, t) = exp(c) x^(-1) H[x s]."""
    r = REPRESENTATIONS[rep]
    p = r.params(params)
    log_c, s, hp = r.build(p, t)
    res = h_eval(hp, x * s, tol=tol, contour="saddle")
    return math.exp(log_c) * res.value / x

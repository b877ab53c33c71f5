"""Special functions: log-Gamma, modified Bessel I and K, Gauss 2F1, Pochhammer.

Everything here is evaluated in double precision with numpy broadcasting
where it is cheap to do so.  The Bessel routines accept scalar orders and
scalar or array arguments.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import integrate

from .errors import ConvergenceError, DomainError, OverflowFlag, PoleError

__all__ = [
    "log_gamma",
    "bessel_i",
    "bessel_k",
    "bessel_k_integral",
    "hyp2f1",
    "pochhammer",
]

SERIES_EPS = 1e-16
SERIES_MAX_TERMS = 500
X_OVERFLOW = 700.0

# Lanczos coefficients for g = 607/128, 15 terms.
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C = np.array([
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
])
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _lanczos_log_gamma(z: np.ndarray) -> np.ndarray:
    # valid for Re z >= 0.5
    w = z - 1.0
    acc = np.full_like(w, _LANCZOS_C[0])
    for k in range(1, len(_LANCZOS_C)):
        acc = acc + _LANCZOS_C[k] / (w + k)
    base = w + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (w + 0.5) * np.log(base) - base + np.log(acc)


def log_gamma(z):
    """Principal branch of log Gamma(z) for complex (or real) z.

    Uses the Lanczos approximation on Re z >= 1/2.  Points left of that
    line are shifted right with the recurrence Gamma(z) = Gamma(z+N) /
    prod(z+k), which keeps the principal branch on the upper and lower
    half planes.  Raises PoleError at nonpositive integers.
    """
    scalar = np.ndim(z) == 0
    zc = np.atleast_1d(np.asarray(z, dtype=complex))
    re = zc.real
    if np.any((zc.imag == 0) & (re <= 0) & (re == np.round(re))):
        raise PoleError("log_gamma: pole at a nonpositive integer")
    shift = np.where(re < 0.5, np.ceil(0.5 - re), 0.0).astype(int)
    out = _lanczos_log_gamma(zc + shift)
    nmax = int(shift.max()) if shift.size else 0
    for k in range(nmax):
        active = shift > k
        out = np.where(active, out - np.log(np.where(active, zc + k, 1.0)), out)
    return out[0] if scalar else out


def _rgamma(v: float) -> float:
    # 1/Gamma(v) for real v, zero at the poles
    if v <= 0 and v == math.floor(v):
        return 0.0
    if v > 170.0:
        return math.exp(-math.lgamma(v))
    return 1.0 / math.gamma(v)


def bessel_i(nu: float, x):
    """Modified Bessel function of the first kind by its power series.

    Sum of (x/2)^(2k+nu) / (k! Gamma(k+nu+1)), truncated when the term falls
    below 1e-16 of the partial sum.  Raises OverflowFlag for x > 700.
    """
    scalar = np.ndim(x) == 0
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xa < 0):
        raise DomainError("bessel_i requires x >= 0")
    if np.any(xa > X_OVERFLOW):
        raise OverflowFlag("bessel_i: x > 700 overflows double precision")
    nu = float(nu)
    if nu < 0 and nu == math.floor(nu):
        nu = -nu  # I_{-n} = I_n
    half = 0.5 * xa
    with np.errstate(divide="ignore"):
        if nu == 0:
            term = np.ones_like(xa)
        else:
            term = np.where(half > 0, np.power(np.where(half > 0, half, 1.0), nu), 0.0 if nu > 0 else np.inf)
        term = term * _rgamma(nu + 1.0)
    total = term.copy()
    q = half * half
    converged = np.zeros(xa.shape, dtype=bool) | (q == 0)
    for k in range(1, SERIES_MAX_TERMS + 1):
        term = term * q / (k * (k + nu))
        total = total + term
        small = np.abs(term) <= SERIES_EPS * np.abs(total)
        converged |= small & (k * (k + abs(nu)) > q)
        if converged.all():
            break
    else:
        raise ConvergenceError("bessel_i: series did not converge in 500 terms")
    return float(total[0]) if scalar else total


# Reflection is used only where its cancellation costs less than ~1e-12.
_NEAR_INTEGER = 1e-4
_REFLECTION_XMAX = 1.0
_TRAP_STEP = 0.05
_TRAP_WIDTH = 0.6


def _k_cosh_trapezoid(nu: float, x: np.ndarray) -> np.ndarray:
    # K_nu(x) = int_0^inf exp(-x cosh u) cosh(nu u) du, trapezoid on the half line.
    # The peak narrows like x^(-1/2), so the step shrinks with it; the
    # aliasing error is then about exp(-2 pi^2 / (x h^2)) < 1e-20.
    nu = abs(nu)
    ustar = np.arcsinh(nu / x)
    lmax = -x * np.cosh(ustar) + nu * ustar
    upper = ustar + 1.0
    for _ in range(8):
        arg = (nu * upper - lmax + 45.0) / x
        upper = np.maximum(upper, np.arccosh(np.maximum(arg, 1.0)))
    h = np.minimum(_TRAP_STEP, _TRAP_WIDTH / np.sqrt(x))
    n = int(math.ceil(float(np.max(upper / h)))) + 1
    u = h[:, None] * np.arange(n + 1)[None, :]
    xc = x[:, None]
    # integrand scaled by exp(x) so that large x does not underflow early
    logf = -xc * (np.cosh(u) - 1.0) + np.log(np.cosh(nu * u))
    f = np.exp(logf)
    f[:, 0] *= 0.5
    return h * f.sum(axis=1) * np.exp(-x)


def bessel_k(nu: float, x):
    """Modified Bessel function of the second kind.

    Away from integer orders and for x <= 1 the reflection formula
    K = (pi/2)(I_{-nu} - I_nu)/sin(nu pi) is used.  Near-integer orders and
    larger arguments use the uniform representation
    int_0^inf exp(-x cosh u) cosh(nu u) du with the trapezoid rule, which
    converges geometrically for this analytic integrand.
    """
    scalar = np.ndim(x) == 0
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xa <= 0):
        raise DomainError("bessel_k requires x > 0")
    nu = abs(float(nu))
    out = np.empty_like(xa)
    near_int = abs(nu - round(nu)) < _NEAR_INTEGER
    refl = np.zeros(xa.shape, dtype=bool) if near_int else xa <= _REFLECTION_XMAX
    if refl.any():
        xr = xa[refl]
        diff = bessel_i(-nu, xr) - bessel_i(nu, xr)
        out[refl] = 0.5 * math.pi * diff / math.sin(nu * math.pi)
    if (~refl).any():
        out[~refl] = _k_cosh_trapezoid(nu, xa[~refl])
    return float(out[0]) if scalar else out


def bessel_k_integral(nu: float, p: float, x: float, t: float, zeta: float) -> float:
    """Evaluate K_{nu/p}(sqrt(x/t^zeta)) through its one-dimensional integral.

    (|p|/2)(x t^zeta)^(-nu/2p) int_0^inf s^(nu-1) exp(-x/(2 s^p) - s^p/(2 t^zeta)) ds,
    computed by adaptive quadrature after the substitution s = exp(u).
    """
    if x <= 0 or t <= 0:
        raise DomainError("bessel_k_integral requires x > 0 and t > 0")
    if p == 0:
        raise DomainError("bessel_k_integral requires p != 0")
    tz = t ** zeta
    b = 0.5 / tz
    a = 0.5 * x

    def logf(u: float) -> float:
        return nu * u - a * math.exp(-p * u) - b * math.exp(p * u)

    # saddle of the log-integrand, found by Newton from the symmetric point
    u0 = math.log(x * tz) / (2.0 * p)
    for _ in range(50):
        g = nu + a * p * math.exp(-p * u0) - b * p * math.exp(p * u0)
        h = -a * p * p * math.exp(-p * u0) - b * p * p * math.exp(p * u0)
        step = g / h
        u0 -= max(min(step, 2.0), -2.0)
        if abs(step) < 1e-14:
            break
    peak = logf(u0)
    lo, hi = u0 - 1.0, u0 + 1.0
    while logf(lo) - peak > -60.0:
        lo -= 0.5 * (u0 - lo) + 0.5
    while logf(hi) - peak > -60.0:
        hi += 0.5 * (hi - u0) + 0.5

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, _ = integrate.quad(lambda u: math.exp(logf(u) - peak), lo, hi,
                                    points=[u0], epsabs=0.0, epsrel=1e-13, limit=400)
        except integrate.IntegrationWarning as exc:
            raise ConvergenceError(f"bessel_k_integral: {exc}") from exc
    log_pref = math.log(0.5 * abs(p)) - nu / (2.0 * p) * math.log(x * tz)
    return math.exp(log_pref + peak) * val


def _hyp2f1_series(a: float, b: float, c: float, z: float, max_terms: int) -> float:
    term = 1.0
    total = 1.0
    for k in range(max_terms):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
        total += term
        if term == 0.0:
            return total
        ratio = abs((a + k + 1) * (b + k + 1) * z / ((c + k + 1) * (k + 2.0)))
        if abs(term) <= SERIES_EPS * abs(total) and ratio < 1.0:
            return total
    raise ConvergenceError(f"hyp2f1: no convergence in {max_terms} terms")


def hyp2f1(a: float, b: float, c: float, z: float, max_terms: int = SERIES_MAX_TERMS) -> float:
    """Gauss hypergeometric function F(a, b; c; z) for |z| < 1.

    Direct series for z >= 0.  For z < 0 the Pfaff transformation
    F(a, b; c; z) = (1-z)^(-a) F(a, c-b; c; z/(z-1)) moves the argument into
    [0, 1/2), which avoids the slow alternating series near z = -1.
    """
    if abs(z) >= 1.0:
        raise DomainError("hyp2f1: series diverges for |z| >= 1")
    if c <= 0 and c == math.floor(c):
        raise PoleError("hyp2f1: c is a nonpositive integer")
    if z < 0:
        return (1.0 - z) ** (-a) * _hyp2f1_series(a, c - b, c, z / (z - 1.0), max_terms)
    return _hyp2f1_series(a, b, c, z, max_terms)


def pochhammer(mu: float, k: int) -> float:
    """Rising factorial (mu)_k = Gamma(mu+k)/Gamma(mu)."""
    if k < 0 or int(k) != k:
        raise DomainError("pochhammer requires a nonnegative integer k")
    if k == 0:
        return 1.0
    end = mu + k
    if end <= 0 and end == math.floor(end):
        raise PoleError("pochhammer: mu + k is a pole of Gamma")
    out = 1.0
    for j in range(int(k)):
        out *= mu + j
    return out

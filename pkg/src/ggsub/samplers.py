"""Process expressions, their Mellin forms, and marginal samplers.

A process expression is a small tree: leaves are marginal laws (generalized
Gamma, Brownian, fractional Brownian, Cauchy, ...) and inner nodes combine
them (subordination, independent products, powers, scalings, sums of
powers).  Sampling draws the marginal at a fixed time t; subordination
feeds the inner samples to the outer node as an array of random times.

Randomness comes from numpy's Philox counter-based generator.  Every node
gets a stream keyed by (seed, shard, path-in-tree), so results do not
depend on thread scheduling and sibling subtrees are independent.
"""

from __future__ import annotations

import ast
import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import mellin as M
from .mellin import GammaFactor, GGParams, MellinForm

__all__ = [
    "GG", "Brown", "FBM", "Cauchy", "FoldedCauchy", "BesselSq", "StableHalf",
    "BrownNorm", "Student", "Clock", "Compose", "ProductSplit", "Power", "Scale",
    "Abs", "SumOfPowers", "ProcessExpr", "SampleBatch",
    "gg", "ggt", "parse_expr", "to_string", "expr_digest", "support",
    "form_of", "sample_gamma", "sample_process", "sample_gaussian_pair",
]

SHARD_SIZE = 1 << 16


# ---------------------------------------------------------------- nodes

@dataclass(frozen=True)
class GG:
    params: GGParams


@dataclass(frozen=True)
class Brown:
    pass


@dataclass(frozen=True)
class FBM:
    H: float

    def __post_init__(self) -> None:
        if not 0 < self.H <= 1:
            raise ValueError("fBm Hurst index must lie in (0, 1]")


@dataclass(frozen=True)
class Cauchy:
    pass


@dataclass(frozen=True)
class FoldedCauchy:
    pass


@dataclass(frozen=True)
class BesselSq:
    delta: float

    def __post_init__(self) -> None:
        if not self.delta > 0:
            raise ValueError("BESQ dimension must be positive")


@dataclass(frozen=True)
class StableHalf:
    pass


@dataclass(frozen=True)
class BrownNorm:
    """Euclidean norm of n-dimensional Brownian motion (Bessel process from 0)."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("dimension must be at least 1")


@dataclass(frozen=True)
class Student:
    """Signed Student marginal with nu degrees of freedom, scale sqrt(t/nu)."""

    nu: float

    def __post_init__(self) -> None:
        if not self.nu > 0:
            raise ValueError("nu must be positive")


@dataclass(frozen=True)
class Clock:
    """Deterministic time change alpha * t^beta."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise ValueError("clock alpha must be positive")


@dataclass(frozen=True)
class Compose:
    outer: "ProcessExpr"
    inner: "ProcessExpr"


@dataclass(frozen=True)
class ProductSplit:
    """Product of independent children; each runs at t^(1/n) when ``split``."""

    children: tuple
    split: bool = True

    def __post_init__(self) -> None:
        if not self.children:
            raise ValueError("product needs at least one child")


@dataclass(frozen=True)
class Power:
    base: "ProcessExpr"
    beta: float

    def __post_init__(self) -> None:
        if self.beta == 0:
            raise ValueError("power exponent must be nonzero")


@dataclass(frozen=True)
class Scale:
    base: "ProcessExpr"
    a: float

    def __post_init__(self) -> None:
        if not self.a > 0:
            raise ValueError("scale factor must be positive")


@dataclass(frozen=True)
class Abs:
    base: "ProcessExpr"


@dataclass(frozen=True)
class SumOfPowers:
    """(sum_i X_i(t)^gamma_i)^root for independent children X_i."""

    children: tuple
    gammas: tuple
    root: float

    def __post_init__(self) -> None:
        if len(self.children) != len(self.gammas) or not self.children:
            raise ValueError("children and gammas must have the same nonzero length")


ProcessExpr = Union[GG, Brown, FBM, Cauchy, FoldedCauchy, BesselSq, StableHalf, BrownNorm,
                    Student, Clock, Compose, ProductSplit, Power, Scale, Abs, SumOfPowers]


def gg(gamma: float, mu: float, alpha: Optional[float] = None, beta: Optional[float] = None) -> GG:
    """G_gamma with raw clock, or with clock alpha*t^beta when given."""
    if alpha is None and beta is None:
        return GG(GGParams(mu, gamma))
    return GG(GGParams(mu, gamma, "affine", 1.0 if alpha is None else alpha, 1.0 if beta is None else beta))


def ggt(gamma: float, mu: float) -> GG:
    """G-tilde_gamma: clock t^gamma, so that X = t * Y^(1/gamma)."""
    return GG(GGParams(mu, gamma, "tilde"))


# ---------------------------------------------------------------- support

def support(expr: ProcessExpr) -> str:
    """'positive' for a.s. nonnegative marginals, 'real' otherwise."""
    if isinstance(expr, (Brown, FBM, Cauchy, Student)):
        return "real"
    if isinstance(expr, Compose):
        if support(expr.inner) != "positive":
            raise ValueError("subordinator (inner process) must be nonnegative")
        return support(expr.outer)
    if isinstance(expr, ProductSplit):
        return "real" if any(support(c) == "real" for c in expr.children) else "positive"
    if isinstance(expr, Scale):
        return support(expr.base)
    if isinstance(expr, Power):
        if support(expr.base) == "real" and float(expr.beta) != round(expr.beta):
            raise ValueError("non-integer power of a real-valued process; fold it first")
        if support(expr.base) == "real":
            return "positive" if round(expr.beta) % 2 == 0 else "real"
        return "positive"
    if isinstance(expr, SumOfPowers):
        for c in expr.children:
            if support(c) != "positive":
                raise ValueError("sum of powers needs nonnegative children")
        return "positive"
    return "positive"


# ---------------------------------------------------------------- grammar

def _num(v: float) -> str:
    return repr(float(v))


def to_string(expr: ProcessExpr) -> str:
    """Canonical expression string, accepted back by parse_expr."""
    if isinstance(expr, GG):
        p = expr.params
        if p.clock == "tilde":
            return f"ggt({_num(p.gamma)}, {_num(p.mu)})"
        if p.clock == "raw":
            return f"gg({_num(p.gamma)}, {_num(p.mu)})"
        return f"gg({_num(p.gamma)}, {_num(p.mu)}, {_num(p.alpha)}, {_num(p.beta)})"
    if isinstance(expr, Brown):
        return "brown()"
    if isinstance(expr, FBM):
        return f"fbm({_num(expr.H)})"
    if isinstance(expr, Cauchy):
        return "cauchy()"
    if isinstance(expr, FoldedCauchy):
        return "fcauchy()"
    if isinstance(expr, BesselSq):
        return f"bsq({_num(expr.delta)})"
    if isinstance(expr, StableHalf):
        return "stable()"
    if isinstance(expr, BrownNorm):
        return f"bnorm({expr.n})"
    if isinstance(expr, Student):
        return f"student({_num(expr.nu)})"
    if isinstance(expr, Clock):
        return f"clock({_num(expr.alpha)}, {_num(expr.beta)})"
    if isinstance(expr, Compose):
        return f"compose({to_string(expr.outer)}, {to_string(expr.inner)})"
    if isinstance(expr, ProductSplit):
        name = "split" if expr.split else "mul"
        return f"{name}({', '.join(to_string(c) for c in expr.children)})"
    if isinstance(expr, Power):
        return f"power({to_string(expr.base)}, {_num(expr.beta)})"
    if isinstance(expr, Scale):
        return f"scale({to_string(expr.base)}, {_num(expr.a)})"
    if isinstance(expr, Abs):
        return f"abs({to_string(expr.base)})"
    if isinstance(expr, SumOfPowers):
        kids = ", ".join(to_string(c) for c in expr.children)
        gams = ", ".join(_num(g) for g in expr.gammas)
        return f"sumpow([{kids}], [{gams}], {_num(expr.root)})"
    raise TypeError(f"not a process expression: {expr!r}")


def expr_digest(expr: ProcessExpr) -> str:
    return hashlib.sha256(to_string(expr).encode()).hexdigest()[:16]


_LEAVES = {
    "brown": (0, lambda: Brown()),
    "cauchy": (0, lambda: Cauchy()),
    "fcauchy": (0, lambda: FoldedCauchy()),
    "stable": (0, lambda: StableHalf()),
    "fbm": (1, lambda h: FBM(h)),
    "bsq": (1, lambda d: BesselSq(d)),
    "bnorm": (1, lambda n: BrownNorm(int(n))),
    "student": (1, lambda nu: Student(nu)),
    "clock": (2, lambda a, b: Clock(a, b)),
    "ggt": (2, lambda g, m: ggt(g, m)),
}


def parse_expr(text: str) -> ProcessExpr:
    """Parse an expression such as ``compose(ggt(2,0.5), ggt(-2,0.5))``."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse expression: {exc.msg}") from exc
    return _build(tree.body)


def _number(node: ast.AST) -> float:
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return float(node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _number(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Div):
        return _number(node.left) / _number(node.right)
    raise ValueError(f"expected a number, got {ast.unparse(node)!r}")


def _build(node: ast.AST) -> ProcessExpr:
    if not (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)):
        raise ValueError(f"expected a constructor call, got {ast.unparse(node)!r}")
    if node.keywords:
        raise ValueError("keyword arguments are not supported")
    name, args = node.func.id, node.args
    if name in _LEAVES:
        arity, make = _LEAVES[name]
        if len(args) != arity:
            raise ValueError(f"{name} takes {arity} argument(s)")
        return make(*[_number(a) for a in args])
    if name == "gg":
        if len(args) not in (2, 4):
            raise ValueError("gg takes 2 or 4 arguments")
        return gg(*[_number(a) for a in args])
    if name == "compose":
        if len(args) != 2:
            raise ValueError("compose takes 2 arguments")
        return Compose(_build(args[0]), _build(args[1]))
    if name in ("split", "mul"):
        return ProductSplit(tuple(_build(a) for a in args), split=(name == "split"))
    if name in ("power", "scale"):
        if len(args) != 2:
            raise ValueError(f"{name} takes 2 arguments")
        cls = Power if name == "power" else Scale
        return cls(_build(args[0]), _number(args[1]))
    if name == "abs":
        if len(args) != 1:
            raise ValueError("abs takes 1 argument")
        return Abs(_build(args[0]))
    if name == "sumpow":
        if len(args) != 3 or not isinstance(args[0], ast.List) or not isinstance(args[1], ast.List):
            raise ValueError("sumpow takes ([children], [gammas], root)")
        return SumOfPowers(tuple(_build(a) for a in args[0].elts),
                           tuple(_number(a) for a in args[1].elts), _number(args[2]))
    raise ValueError(f"unknown constructor {name!r}")


# ---------------------------------------------------------------- Mellin forms

_LOG2 = math.log(2.0)
_LOGPI = math.log(math.pi)


def _abs_normal_form(h: float) -> MellinForm:
    # E|t^h Z|^(eta-1) = 2^((eta-1)/2) Gamma(eta/2) t^(h(eta-1)) / sqrt(pi)
    return MellinForm.build(-0.5 * _LOG2 - 0.5 * _LOGPI, h, -h, [GammaFactor(0.5, 0.0)], eta_log=0.5 * _LOG2)


def form_of(expr: ProcessExpr) -> Optional[MellinForm]:
    """Mellin form of E|X(t)|^(eta-1), or None when X is not in the algebra."""
    if isinstance(expr, GG):
        return M.mellin_of_gg(expr.params)
    if isinstance(expr, Brown):
        return _abs_normal_form(0.5)
    if isinstance(expr, FBM):
        return _abs_normal_form(expr.H)
    if isinstance(expr, (Cauchy, FoldedCauchy)):
        return M.mellin_of_folded_cauchy()
    if isinstance(expr, BesselSq):
        return M.mellin_of_gg(GGParams(expr.delta / 2.0, 1.0, "affine", 2.0, 1.0))
    if isinstance(expr, StableHalf):
        # t^2 / Z^2: E = t^(2(eta-1)) 2^(1-eta) Gamma(3/2 - eta) / sqrt(pi)
        return MellinForm.build(_LOG2 - 0.5 * _LOGPI, 2.0, -2.0, [GammaFactor(-1.0, 1.5)], eta_log=-_LOG2)
    if isinstance(expr, BrownNorm):
        n = expr.n
        return MellinForm.build(-0.5 * _LOG2 - math.lgamma(n / 2.0), 0.5, -0.5,
                                [GammaFactor(0.5, (n - 1) / 2.0)], eta_log=0.5 * _LOG2)
    if isinstance(expr, Student):
        nu = expr.nu
        return MellinForm.build(-0.5 * _LOGPI - math.lgamma(nu / 2.0), 0.5, -0.5,
                                [GammaFactor(0.5, 0.0), GammaFactor(-0.5, (nu + 1) / 2.0)])
    if isinstance(expr, Clock):
        return M.deterministic_clock(expr.beta, expr.alpha)
    if isinstance(expr, Abs):
        return form_of(expr.base)
    if isinstance(expr, Scale):
        f = form_of(expr.base)
        return None if f is None else M.scale(f, expr.a, "space")
    if isinstance(expr, Power):
        f = form_of(expr.base)
        return None if f is None else M.power_map(f, expr.beta)
    if isinstance(expr, Compose):
        fo, fi = form_of(expr.outer), form_of(expr.inner)
        if fo is None or fi is None:
            return None
        return M.subordinate(fo, fi)
    if isinstance(expr, ProductSplit):
        n = len(expr.children)
        out = M.unit_form()
        for c in expr.children:
            f = form_of(c)
            if f is None:
                return None
            if expr.split:
                f = M.subordinate(f, M.deterministic_clock(1.0 / n))
            out = M.product(out, f)
        return out
    if isinstance(expr, SumOfPowers):
        return None
    raise TypeError(f"not a process expression: {expr!r}")


# ---------------------------------------------------------------- sampling

@dataclass(frozen=True)
class SampleBatch:
    values: np.ndarray
    t: float
    seed: int
    expr_digest: str


def _rng(seed: int, key: tuple) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed) & ((1 << 64) - 1), spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))


def gamma_variates(rng: np.random.Generator, mu: float, size: int) -> np.ndarray:
    """Standard Gamma(mu, 1) variates by Marsaglia-Tsang rejection (no squeeze).

    For mu < 1 the boost X_{mu+1} * U^(1/mu) is applied.
    """
    if not mu > 0:
        raise ValueError("gamma shape must be positive")
    boost = mu < 1.0
    shape = mu + 1.0 if boost else mu
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(size)
    todo = np.arange(size)
    while todo.size:
        m = todo.size
        z = rng.standard_normal(m)
        u = rng.random(m)
        v = 1.0 + c * z
        ok = v > 0
        v3 = np.where(ok, v * v * v, 1.0)
        with np.errstate(divide="ignore"):
            accept = ok & (np.log(u) < 0.5 * z * z + d - d * v3 + d * np.log(v3))
        out[todo[accept]] = d * v3[accept]
        todo = todo[~accept]
    if boost:
        u = rng.random(size)
        out *= np.power(u, 1.0 / mu)
    return out


def _draw(expr: ProcessExpr, t: np.ndarray, seed: int, key: tuple) -> np.ndarray:
    n = t.size
    if isinstance(expr, GG):
        p = expr.params
        a, b = p.clock_alpha_beta()
        y = gamma_variates(_rng(seed, key), p.mu, n)
        with np.errstate(divide="ignore", over="ignore"):
            return np.power(a * np.power(t, b) * y, 1.0 / p.gamma)
    if isinstance(expr, Brown):
        return np.sqrt(t) * _rng(seed, key).standard_normal(n)
    if isinstance(expr, FBM):
        return np.power(t, expr.H) * _rng(seed, key).standard_normal(n)
    if isinstance(expr, Cauchy):
        rng = _rng(seed, key)
        return t * rng.standard_normal(n) / rng.standard_normal(n)
    if isinstance(expr, FoldedCauchy):
        rng = _rng(seed, key)
        return np.abs(t * rng.standard_normal(n) / rng.standard_normal(n))
    if isinstance(expr, BesselSq):
        return 2.0 * t * gamma_variates(_rng(seed, key), expr.delta / 2.0, n)
    if isinstance(expr, StableHalf):
        z = _rng(seed, key).standard_normal(n)
        return t * t / (z * z)
    if isinstance(expr, BrownNorm):
        return np.sqrt(2.0 * t * gamma_variates(_rng(seed, key), expr.n / 2.0, n))
    if isinstance(expr, Student):
        return np.sqrt(t / expr.nu) * _rng(seed, key).standard_t(expr.nu, n)
    if isinstance(expr, Clock):
        return expr.alpha * np.power(t, expr.beta)
    if isinstance(expr, Abs):
        return np.abs(_draw(expr.base, t, seed, key))
    if isinstance(expr, Scale):
        return expr.a * _draw(expr.base, t, seed, key)
    if isinstance(expr, Power):
        with np.errstate(divide="ignore", over="ignore"):
            return np.power(_draw(expr.base, t, seed, key), expr.beta)
    if isinstance(expr, Compose):
        inner = _draw(expr.inner, t, seed, key + (1,))
        return _draw(expr.outer, inner, seed, key + (0,))
    if isinstance(expr, ProductSplit):
        tt = np.power(t, 1.0 / len(expr.children)) if expr.split else t
        out = np.ones(n)
        for i, c in enumerate(expr.children):
            out = out * _draw(c, tt, seed, key + (i,))
        return out
    if isinstance(expr, SumOfPowers):
        acc = np.zeros(n)
        for i, (c, g) in enumerate(zip(expr.children, expr.gammas)):
            acc = acc + np.power(_draw(c, t, seed, key + (i,)), g)
        return np.power(acc, expr.root)
    raise TypeError(f"not a process expression: {expr!r}")


def _shards(count: int, shard_size: int) -> list[tuple[int, int]]:
    return [(i, min(shard_size, count - i * shard_size)) for i in range((count + shard_size - 1) // shard_size)]


def sample_process(expr: ProcessExpr, t: float, count: int, seed: int,
                   jobs: int = 1, shard_size: int = SHARD_SIZE) -> SampleBatch:
    """Draw ``count`` independent copies of X(t)."""
    if not t > 0:
        raise ValueError("t must be positive")
    if count < 1:
        raise ValueError("count must be positive")
    support(expr)  # validates the tree

    def run(shard: tuple[int, int]) -> np.ndarray:
        idx, size = shard
        return _draw(expr, np.full(size, float(t)), seed, (idx,))

    shards = _shards(count, shard_size)
    if jobs > 1 and len(shards) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(run, shards))
    else:
        parts = [run(s) for s in shards]
    return SampleBatch(np.concatenate(parts), float(t), int(seed), expr_digest(expr))


def sample_gamma(mu: float, scale: float, count: int, seed: int) -> SampleBatch:
    """Gamma(mu) variates with the given scale (mean mu*scale)."""
    if not scale > 0:
        raise ValueError("scale must be positive")
    expr = gg(1.0, mu)
    return sample_process(expr, scale, count, seed)


def sample_gaussian_pair(H: float, t1: float, t2: float, count: int, seed: int) -> np.ndarray:
    """(B_H(t1), B_H(t2)) pairs from the fBm covariance; shape (count, 2)."""
    if not 0 < H <= 1:
        raise ValueError("H must lie in (0, 1]")
    v1, v2 = abs(t1) ** (2 * H), abs(t2) ** (2 * H)
    r = 0.5 * (v1 + v2 - abs(t1 - t2) ** (2 * H))
    rng = _rng(seed, (0, 7))
    z1 = rng.standard_normal(count)
    z2 = rng.standard_normal(count)
    s1 = math.sqrt(v1)
    x1 = s1 * z1
    if s1 == 0:
        x2 = math.sqrt(v2) * z2
    else:
        x2 = (r / s1) * z1 + math.sqrt(max(v2 - r * r / v1, 0.0)) * z2
    return np.column_stack([x1, x2])

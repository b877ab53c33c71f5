import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from ggsub.errors import ConvergenceError, DomainError, PoleError
from ggsub.specfun import bessel_i, bessel_k, bessel_k_integral, hyp2f1, log_gamma, pochhammer


# ---------------------------------------------------------------- log_gamma

@pytest.mark.parametrize("z, expected", [
    (1.0, 0.0),
    (0.5, 0.5 * math.log(math.pi)),
    (5.0, math.log(24.0)),
])
def test_log_gamma_examples(z, expected):
    assert log_gamma(z) == pytest.approx(expected, abs=1e-13)


def test_log_gamma_matches_scipy_on_vertical_lines():
    z = np.array([complex(a, b) for a in (-2.3, 0.2, 0.5, 1.7, 6.0) for b in (-40, -3, -0.5, 0.7, 12, 80)])
    got = log_gamma(z)
    ref = special.loggamma(z)
    # compare modulo 2 pi i: only exp(log_gamma) is meaningful
    assert np.max(np.abs(np.exp(got - ref) - 1.0)) < 1e-12


def test_log_gamma_pole_raises():
    with pytest.raises(PoleError):
        log_gamma(-2.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=1e-3, max_value=60.0))
def test_log_gamma_recurrence(x):
    lhs = log_gamma(x + 1.0).real
    rhs = math.log(x) + log_gamma(x).real
    assert math.exp(lhs - rhs) == pytest.approx(1.0, rel=1e-12)


# ---------------------------------------------------------------- Bessel I and K

def test_bessel_i_examples():
    assert bessel_i(0.0, 0.0) == 1.0
    assert bessel_i(0.5, 1.0) == pytest.approx(math.sqrt(2 / math.pi) * math.sinh(1.0), rel=1e-13)
    assert bessel_i(0.5, 1.0) == pytest.approx(0.9376748, abs=1e-7)
    assert bessel_i(0.0, 1.0) == pytest.approx(1.2660658, abs=1e-7)


def test_bessel_i_against_truncated_series():
    def series(nu, x, terms=30):
        return sum((x / 2) ** (2 * k + nu) / (math.factorial(k) * math.gamma(k + nu + 1)) for k in range(terms))
    for nu in (0.0, 0.3, 1.0, 2.5):
        for x in (0.1, 1.0, 4.0):
            assert bessel_i(nu, x) == pytest.approx(series(nu, x), rel=1e-13)


@pytest.mark.parametrize("nu", [0.0, 0.4, 1.0, 3.3])
def test_bessel_i_relative_error_vs_scipy(nu):
    x = np.array([0.01, 0.5, 3.0, 15.0, 60.0, 200.0])
    assert np.max(np.abs(bessel_i(nu, x) / special.iv(nu, x) - 1.0)) < 1e-11


def test_bessel_k_examples():
    assert bessel_k(0.5, 1.0) == pytest.approx(math.sqrt(math.pi / 2) * math.exp(-1.0), rel=1e-13)
    assert bessel_k(0.5, 1.0) == pytest.approx(0.4610685, abs=1e-7)
    assert bessel_k(0.0, 1.0) == pytest.approx(0.4210244, abs=1e-7)


def test_bessel_k0_against_its_integral():
    ref, _ = integrate.quad(lambda s: math.exp(-1.0 / (4 * s * s) - s * s) / s, 0, math.inf, epsrel=1e-12)
    assert bessel_k(0.0, 1.0) == pytest.approx(ref, rel=1e-10)


def test_bessel_k0_small_argument_log_limit():
    for x in (1e-4, 1e-6, 1e-8):
        assert bessel_k(0.0, x) - math.log(2.0 / x) == pytest.approx(-np.euler_gamma, abs=1e-6)


@pytest.mark.parametrize("nu", [0.0, 0.3, 0.5, 1.0, 2.0, 2.7, 5.5])
def test_bessel_k_vs_scipy(nu):
    x = np.geomspace(1e-3, 600.0, 60)
    assert np.max(np.abs(bessel_k(nu, x) / special.kv(nu, x) - 1.0)) < 1e-11


def test_bessel_k_rejects_nonpositive():
    with pytest.raises(DomainError):
        bessel_k(0.5, 0.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=-6.0, max_value=6.0), st.floats(min_value=1e-2, max_value=50.0))
def test_bessel_k_symmetric_in_order(nu, x):
    assert bessel_k(nu, x) == bessel_k(-nu, x)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=-4.0, max_value=4.0), st.floats(min_value=0.05, max_value=50.0))
def test_bessel_k_matches_integral_representation(nu, x):
    via_integral = bessel_k_integral(nu, 1.0, x * x, 1.0, 0.0)
    assert bessel_k(nu, x) == pytest.approx(via_integral, rel=1e-8)


def test_bessel_k_integral_examples():
    assert bessel_k_integral(0.0, 2.0, 1.0, 1.0, 0.0) == pytest.approx(bessel_k(0.0, 1.0), rel=1e-10)
    half = math.sqrt(math.pi / 4) * math.exp(-2.0)
    assert bessel_k_integral(1.0, 2.0, 4.0, 1.0, 0.0) == pytest.approx(half, rel=1e-10)
    assert half == pytest.approx(0.1199377, abs=1e-7)


@pytest.mark.parametrize("nu, p, x, t, zeta", [
    (0.7, 1.0, 2.0, 1.5, 1.0), (1.3, -2.0, 0.4, 2.0, 0.5), (-0.6, 3.0, 5.0, 0.7, 2.0),
])
def test_bessel_k_integral_general_identity(nu, p, x, t, zeta):
    expected = bessel_k(nu / p, math.sqrt(x / t ** zeta))
    assert bessel_k_integral(nu, p, x, t, zeta) == pytest.approx(expected, rel=1e-9)


def test_mellin_transform_of_k0():
    for eta in (1.0, 1.5, 2.0, 3.0):
        val, _ = integrate.quad(lambda x: x ** (eta - 1) * bessel_k(0.0, x), 0, math.inf, epsrel=1e-12, limit=200)
        expected = 2 ** eta * math.gamma(eta / 2) ** 2 / 4
        assert val == pytest.approx(expected, rel=1e-7)


# ---------------------------------------------------------------- hyp2f1 and pochhammer

def test_hyp2f1_examples():
    assert hyp2f1(0.3, 1.7, 2.2, 0.0) == 1.0
    assert hyp2f1(1.0, 1.0, 2.0, 0.5) == pytest.approx(-math.log(0.5) / 0.5, rel=1e-12)
    a, b, c, z = 0.7, 1.3, 2.1, 0.4
    euler = (1 - z) ** (c - a - b) * hyp2f1(c - a, c - b, c, z)
    assert hyp2f1(a, b, c, z) == pytest.approx(euler, rel=1e-12)


def test_hyp2f1_vs_scipy():
    rng = np.random.default_rng(3)
    for _ in range(50):
        a, b = rng.uniform(-2, 3, 2)
        c = rng.uniform(0.2, 4)
        z = rng.uniform(-0.9, 0.9)
        assert hyp2f1(a, b, c, z) == pytest.approx(special.hyp2f1(a, b, c, z), rel=1e-10)


def test_hyp2f1_flags_nonconvergence():
    with pytest.raises(ConvergenceError):
        hyp2f1(1.0, 1.0, 2.0, 0.5, max_terms=5)


def test_hyp2f1_negative_argument_near_minus_one():
    a, b, c, z = 3.034, 3.892, 2.85, -0.895
    assert hyp2f1(a, b, c, z) == pytest.approx(special.hyp2f1(a, b, c, z), rel=1e-11)


def test_hyp2f1_domain_errors():
    with pytest.raises(DomainError):
        hyp2f1(1, 1, 2, 1.0)
    with pytest.raises(PoleError):
        hyp2f1(1, 1, -2.0, 0.3)


@settings(max_examples=100, deadline=None)
@given(st.floats(-2, 3), st.floats(-2, 3), st.floats(0.2, 4), st.floats(-0.9, 0.9))
def test_hyp2f1_euler_transformation(a, b, c, z):
    lhs = hyp2f1(a, b, c, z)
    rhs = (1 - z) ** (c - a - b) * hyp2f1(c - a, c - b, c, z)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-12)


def test_pochhammer_examples():
    assert pochhammer(3.7, 0) == 1.0
    assert pochhammer(1.0, 4) == 24.0
    assert pochhammer(0.5, 2) == pytest.approx(0.75)
    assert pochhammer(1.3, 5) == pytest.approx(math.gamma(6.3) / math.gamma(1.3), rel=1e-13)


def test_pochhammer_errors():
    with pytest.raises(DomainError):
        pochhammer(1.0, -1)
    with pytest.raises(PoleError):
        pochhammer(-3.0, 2)

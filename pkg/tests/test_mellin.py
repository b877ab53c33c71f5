import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ggsub.errors import EmptyStripError
from ggsub.mellin import (
    GammaFactor, GGParams, MellinForm, deterministic_clock, equal_on_strip, mellin_of_folded_cauchy,
    mellin_of_gg, moment, power_map, product, scale, subordinate, unit_form,
)
from ggsub.samplers import Brown, Compose, gg, form_of

def gt(gamma, mu):
    return mellin_of_gg(GGParams(mu, gamma, "tilde"))


def graw(gamma, mu):
    return mellin_of_gg(GGParams(mu, gamma, "raw"))


def at_sqrt_t(f):
    return subordinate(f, deterministic_clock(0.5))



# ---------------------------------------------------------------- constructors

def test_gamma_mean():
    mu0, t = 1.7, 2.5
    assert graw(1.0, mu0).value(2.0, t).real == pytest.approx(mu0 * t, rel=1e-13)


def test_inverse_gg_factor_and_strip():
    f = graw(-2.0, 0.5)
    assert f.factors == (GammaFactor(-0.5, 1.0, 1),)
    assert f.strip[1] == pytest.approx(2.0)
    assert math.isinf(f.strip[0])


def test_folded_cauchy_form():
    f = mellin_of_folded_cauchy()
    assert f.value(1.0, 3.0).real == pytest.approx(1.0, rel=1e-14)
    assert f.value(1.5, 1.0).real == pytest.approx(math.sqrt(2.0), rel=1e-13)
    assert f.strip == (0.0, 2.0)


# ---------------------------------------------------------------- product

def test_product_of_two_half_time_gtildes():
    gamma, mu = 1.7, 0.8
    f = product(at_sqrt_t(gt(gamma, mu)), at_sqrt_t(gt(gamma, mu)))
    for eta in (1.2, 1.5, 2.6):
        for t in (0.5, 2.0):
            expected = math.gamma((eta - 1) / gamma + mu) ** 2 / math.gamma(mu) ** 2 * t ** (eta - 1)
            assert f.value(eta, t).real == pytest.approx(expected, rel=1e-12)


def test_product_with_unit_is_identity():
    f = gt(2.0, 0.5)
    assert equal_on_strip(product(f, unit_form()), f).max_rel_dev == 0.0


def test_product_of_opposite_gtildes():
    gamma, mu, t = 2.0, 0.5, 1.3
    f = product(at_sqrt_t(gt(gamma, mu)), at_sqrt_t(gt(-gamma, mu)))
    for eta in (0.4, 1.0, 1.6):
        expected = math.gamma((eta - 1) / gamma + mu) * math.gamma((1 - eta) / gamma + mu) * t ** (eta - 1) / math.gamma(mu) ** 2
        assert f.value(eta, t).real == pytest.approx(expected, rel=1e-12)


def test_product_empty_strip():
    with pytest.raises(EmptyStripError):
        product(MellinForm(strip=(0.0, 1.0)), MellinForm(strip=(2.0, 3.0)))


# ---------------------------------------------------------------- subordinate

def test_subordinate_equals_half_time_product():
    f = gt(2.0, 0.5)
    lhs = subordinate(f, f)
    rhs = product(at_sqrt_t(f), at_sqrt_t(f))
    assert equal_on_strip(lhs, rhs).equal


def test_subordinate_by_identity_clock():
    f = gt(1.5, 0.7)
    assert equal_on_strip(subordinate(f, deterministic_clock(1.0)), f).max_rel_dev < 1e-15


def test_subordinate_raw_clocks_t_exponent():
    g1, g2 = 1.5, 0.7
    f = subordinate(graw(g1, 1.0), graw(g2, 1.2))
    assert f.t_slope == pytest.approx(1.0 / (g1 * g2))
    assert f.t_offset == pytest.approx(-1.0 / (g1 * g2))


# ---------------------------------------------------------------- power_map and scale

def test_power_map_gamma_to_gg():
    gamma, mu = 1.6, 0.9
    assert equal_on_strip(power_map(graw(1.0, mu), 1.0 / gamma), graw(gamma, mu)).equal


def test_power_map_identity():
    f = gt(2.0, 0.5)
    assert equal_on_strip(power_map(f, 1.0), f).max_rel_dev == 0.0


def test_power_map_inverse_flips():
    gamma, mu = 1.6, 0.9
    g = power_map(graw(gamma, mu), -1.0)
    assert equal_on_strip(g, graw(-gamma, mu)).equal
    assert g.strip == pytest.approx(graw(-gamma, mu).strip)


def test_scale_time_equals_space_for_gg():
    gamma, a = 1.8, 2.7
    f = graw(gamma, 0.6)
    assert equal_on_strip(scale(f, a, "time"), scale(f, a ** (1 / gamma), "space")).equal


def test_scale_unit():
    f = gt(2.0, 0.5)
    assert equal_on_strip(scale(f, 1.0, "time"), f).max_rel_dev == 0.0
    assert equal_on_strip(scale(f, 1.0, "space"), f).max_rel_dev == 0.0


def test_scale_cauchy_space_equals_time():
    f = mellin_of_folded_cauchy()
    assert equal_on_strip(scale(f, 3.1, "space"), scale(f, 3.1, "time")).equal


def test_scale_rejects_bad_mode_and_factor():
    with pytest.raises(ValueError):
        scale(unit_form(), 2.0, "sideways")
    with pytest.raises(ValueError):
        scale(unit_form(), -1.0, "time")


# ---------------------------------------------------------------- equal_on_strip

def test_iterated_gtilde_chain_equals_quarter_time_product():
    gammas, mu = (2.0, -2.0, 2.0, -2.0), 0.5
    chain = gt(gammas[-1], mu)
    for g in reversed(gammas[:-1]):
        chain = subordinate(gt(g, mu), chain)
    prod = unit_form()
    for g in gammas:
        prod = product(prod, subordinate(gt(g, mu), deterministic_clock(0.25)))
    res = equal_on_strip(chain, prod)
    assert res.equal and res.max_rel_dev < 1e-9


def test_equal_with_itself_is_exact():
    f = product(gt(2.0, 0.5), mellin_of_folded_cauchy())
    res = equal_on_strip(f, f)
    assert res.equal and res.max_rel_dev == 0.0


def test_gg_of_gg_differs_from_gtilde_of_gtilde():
    gamma, mu = 2.0, 0.5
    res = equal_on_strip(subordinate(graw(gamma, mu), graw(gamma, mu)), subordinate(gt(gamma, mu), gt(gamma, mu)))
    assert not res.equal
    assert res.max_rel_dev > 1e-3


def test_gg_of_gg_equals_gtilde_of_gtilde_when_gamma_one():
    res = equal_on_strip(subordinate(graw(1.0, 0.5), graw(1.0, 0.5)), subordinate(gt(1.0, 0.5), gt(1.0, 0.5)))
    assert res.equal


# ---------------------------------------------------------------- moment

def test_moment_examples():
    mu, t = 1.4, 2.0
    assert moment(graw(1.0, mu), 1, t) == pytest.approx(mu * t, rel=1e-13)
    assert math.isinf(moment(mellin_of_folded_cauchy(), 1, 1.0))


def test_brownian_gamma_time_fourth_moment():
    # E B(G_1(1))^4 with mu = 1: 3 E G^2 = 3 * 2
    f = form_of(Compose(Brown(), gg(1.0, 1.0)))
    assert moment(f, 4, 1.0) == pytest.approx(6.0, rel=1e-12)
    assert moment(f, 2, 1.0) == pytest.approx(1.0, rel=1e-12)


# ---------------------------------------------------------------- serialization

def test_json_roundtrip():
    f = product(subordinate(gt(2.0, 0.5), gt(-2.0, 0.5)), mellin_of_folded_cauchy())
    g = MellinForm.from_json(json.loads(json.dumps(f.to_json())))
    assert g == f


def test_json_infinite_strip_edges():
    obj = gt(2.0, 0.5).to_json()
    text = json.dumps(obj)
    assert "Infinity" not in text
    assert MellinForm.from_json(json.loads(text)).strip == gt(2.0, 0.5).strip


# ---------------------------------------------------------------- properties

gg_params = st.builds(
    lambda mu, g, clock: GGParams(mu, g, clock),
    st.floats(0.2, 3.0),
    st.sampled_from([-3.0, -2.0, -1.5, -0.7, 0.5, 1.0, 1.5, 2.0, 3.0]),
    st.sampled_from(["raw", "tilde"]),
)
ops = st.lists(st.tuples(st.sampled_from(["product", "subordinate", "power", "time", "space"]),
                         gg_params, st.floats(0.3, 3.0)), max_size=4)


def _chain(base, steps):
    f = mellin_of_gg(base)
    for op, p, a in steps:
        g = mellin_of_gg(p)
        try:
            if op == "product":
                f = product(f, g)
            elif op == "subordinate":
                f = subordinate(g, f)
            elif op == "power":
                f = power_map(f, a if a != 1 else 2.0)
            else:
                f = scale(f, a, op)
        except EmptyStripError:
            continue
    return f


@settings(max_examples=150, deadline=None)
@given(gg_params, ops)
def test_algebra_closure(base, steps):
    f = _chain(base, steps)
    lo, hi = f.strip
    assert lo < hi
    for theta in (lo, hi):
        assert math.isinf(theta) or math.isfinite(theta)


@settings(max_examples=150, deadline=None)
@given(gg_params, ops)
def test_real_positive_on_real_axis(base, steps):
    f = _chain(base, steps)
    lo, hi = f.strip
    a = lo if math.isfinite(lo) else hi - 3.0
    b = hi if math.isfinite(hi) else a + 3.0
    for eta in np.linspace(a, b, 7)[1:-1]:
        v = f.value(eta, 1.3)
        assert abs(v.imag) < 1e-12 * max(1.0, abs(v.real))
        assert v.real > 0


@settings(max_examples=150, deadline=None)
@given(gg_params, ops, st.floats(0.2, 5.0))
def test_normalized_moment_zero(base, steps, t):
    f = _chain(base, steps)
    if f.strip[0] < 1.0 < f.strip[1]:
        assert moment(f, 0, t) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(gg_params, st.sampled_from([-2.5, -1.0, -0.4, 0.3, 0.8, 2.0, 3.5]))
def test_power_map_inverse(p, beta):
    f = mellin_of_gg(p)
    back = power_map(power_map(f, beta), 1.0 / beta)
    res = equal_on_strip(back, f, tol=1e-12)
    assert res.equal

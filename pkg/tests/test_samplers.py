import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from ggsub.samplers import (
    Abs, Brown, Compose, ProductSplit, Scale, StableHalf, Cauchy, form_of, gg, ggt, parse_expr,
    sample_gamma, sample_gaussian_pair, sample_process, support, to_string, expr_digest,
)
from ggsub.verify import ks_two_sample


def test_exponential_mean():
    t, n = 2.5, 200_000
    b = sample_gamma(1.0, t, n, seed=5)
    assert abs(b.values.mean() - t) < 3 * math.sqrt(t * t / n)


def test_gamma_mean_one_million():
    b = sample_gamma(2.0, 1.0, 1_000_000, seed=11)
    assert abs(b.values.mean() - 2.0) < 0.006


@pytest.mark.parametrize("mu", [0.05, 0.5, 1.0, 3.7])
def test_gamma_variates_match_cdf(mu):
    b = sample_gamma(mu, 1.0, 50_000, seed=7)
    assert stats.kstest(b.values, stats.gamma(mu).cdf).pvalue > 1e-3


def test_gaussian_pair_brownian_identical():
    pairs = sample_gaussian_pair(0.5, 1.0, 1.0, 1000, seed=1)
    np.testing.assert_array_equal(pairs[:, 0], pairs[:, 1])


def _cov_within(pairs, expected, k=3.0):
    prod = pairs[:, 0] * pairs[:, 1]
    se = prod.std(ddof=1) / math.sqrt(len(prod))
    assert abs(prod.mean() - expected) < k * se


def test_gaussian_pair_brownian_covariance():
    _cov_within(sample_gaussian_pair(0.5, 1.0, 2.0, 400_000, seed=2), 1.0)


def test_gaussian_pair_rough_covariance():
    expected = 0.5 * (1 + 1.5 ** 0.6 - 0.5 ** 0.6)
    _cov_within(sample_gaussian_pair(0.3, 1.0, 1.5, 400_000, seed=3), expected)


def test_gaussian_pair_rejects_bad_hurst():
    with pytest.raises(ValueError):
        sample_gaussian_pair(1.2, 1.0, 2.0, 10, seed=0)


def test_determinism_across_job_counts():
    e = parse_expr("compose(ggt(2, 0.5), split(ggt(-2, 0.5), bsq(3)))")
    a = sample_process(e, 1.3, 300_000, seed=9, jobs=1).values
    b = sample_process(e, 1.3, 300_000, seed=9, jobs=4).values
    c = sample_process(e, 1.3, 300_000, seed=9, jobs=4).values
    np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(b, c)


def test_different_seeds_differ():
    e = ggt(2.0, 0.5)
    assert not np.array_equal(sample_process(e, 1.0, 100, 1).values, sample_process(e, 1.0, 100, 2).values)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 10.0), st.integers(0, 2 ** 32), st.floats(0.2, 3.0))
def test_scale_is_realization_wise(a, seed, t):
    e = Compose(Brown(), gg(1.0, 1.3))
    base = sample_process(e, t, 500, seed).values
    scaled = sample_process(Scale(e, a), t, 500, seed).values
    np.testing.assert_allclose(scaled, a * base, rtol=1e-15)


EXPRS = [
    "gg(1.5, 0.8)", "ggt(-2, 0.7)", "brown()", "fbm(0.3)", "cauchy()", "bsq(3)", "stable()",
    "bnorm(3)", "student(3)", "compose(ggt(2, 0.5), ggt(-2, 0.5))", "compose(brown(), gg(1, 1.3))",
    "split(ggt(2, 0.5), gg(1, 0.8), fbm(0.6))", "power(gg(1.7, 1.2), -1)", "scale(abs(cauchy()), 2)",
]


@pytest.mark.parametrize("text", EXPRS)
def test_empirical_mellin_matches_form(text):
    e = parse_expr(text)
    f = form_of(e)
    t, n = 1.4, 100_000
    x = np.abs(sample_process(e, t, n, seed=21).values)
    for eta in (1.3, 1.7):
        if not f.strip[0] < eta < f.strip[1]:
            continue
        y = x ** (eta - 1)
        se = y.std(ddof=1) / math.sqrt(n)
        assert abs(y.mean() - f.value(eta, t).real) < 4 * se


def test_subordinated_brownian_by_stable_is_cauchy():
    a = np.abs(sample_process(Compose(Brown(), StableHalf()), 1.0, 100_000, seed=4).values)
    b = np.abs(sample_process(Cauchy(), 1.0, 100_000, seed=5).values)
    assert ks_two_sample(a, b)[1] > 0.01


def test_power_of_gg_is_gamma():
    gamma = 1.7
    a = sample_process(parse_expr(f"power(gg({gamma}, 0.8), {gamma})"), 1.0, 100_000, seed=6).values
    b = sample_process(gg(1.0, 0.8), 1.0, 100_000, seed=7).values
    assert ks_two_sample(a, b)[1] > 0.01


@pytest.mark.parametrize("text", EXPRS + ["sumpow([gg(2, 0.5), ggt(1, 1)], [2, 1], 0.5)", "mul(cauchy(), brown())"])
def test_parser_roundtrip(text):
    e = parse_expr(text)
    again = parse_expr(to_string(e))
    assert again == e
    assert expr_digest(again) == expr_digest(e)


@pytest.mark.parametrize("bad", [
    "gg(1)", "nope(1)", "compose(gg(1,1))", "compose(ggt(2,0.5), brown())", "1 +", "gg(a, 1)",
    "power(brown(), 0.5)", "gg(0, 1)", "gg(1, -1)", "fbm(1.5)",
])
def test_parser_rejects(bad):
    with pytest.raises(ValueError):
        e = parse_expr(bad)
        support(e)


def test_support_classification():
    assert support(parse_expr("compose(brown(), gg(1, 1))")) == "real"
    assert support(Abs(Brown())) == "positive"
    assert support(ProductSplit((Brown(), Brown()), True)) == "real"
    assert support(parse_expr("power(brown(), 2)")) == "positive"


def test_batch_metadata():
    e = ggt(2.0, 0.5)
    b = sample_process(e, 0.7, 10, seed=3)
    assert b.t == 0.7 and b.seed == 3 and b.expr_digest == expr_digest(e)
    with pytest.raises(ValueError):
        sample_process(e, 0.0, 10, seed=3)
    with pytest.raises(ValueError):
        sample_process(e, 1.0, 0, seed=3)

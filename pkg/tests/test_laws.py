import math

import numpy as np
import pytest
from scipy import integrate

from inspectruin import (Erlang, Exponential, HyperErlang, Hyperexponential, Lognormal,
                         ModelError, lognormal_params, parse_law)

import oracles

LAWS = [Exponential(1.3), Hyperexponential((0.3, 0.7), (0.5, 2.0)), Erlang(3, 2.0),
        HyperErlang((2, 3), (0.6, 0.4), 2.4)]


@pytest.mark.parametrize("law", LAWS, ids=lambda l: l.family)
def test_moments_against_scipy(law):
    m, v = oracles.law_moments(law)
    assert law.mean() == pytest.approx(m, rel=1e-13)
    assert law.variance() == pytest.approx(v, rel=1e-12)


@pytest.mark.parametrize("law", LAWS + [Lognormal(1.0, 0.5)], ids=lambda l: l.family)
def test_mgf_against_quadrature(law):
    s = -0.7
    h = 1e-6
    pdf = lambda t: (law.cdf(t + h) - law.cdf(max(t - h, 0.0))) / (t + h - max(t - h, 0.0))
    val, _ = integrate.quad(lambda t: math.exp(s * t) * pdf(t), 0, np.inf, limit=200)
    assert law.mgf(s) == pytest.approx(val, rel=1e-5)


@pytest.mark.parametrize("law", LAWS + [Lognormal(2.0, 4.0)], ids=lambda l: l.family)
def test_spec_round_trip(law):
    assert parse_law(law.spec()) == law


@pytest.mark.parametrize("text", ["exp", "exp:-1", "erlang:2.5,1", "hyperexp:0.5,0.6;1,2",
                                  "hypererlang:3,2;0.5,0.5;1", "weibull:1,2", "lognormal:1"])
def test_parse_rejects(text):
    with pytest.raises(ModelError):
        parse_law(text)


def test_lognormal_params_examples():
    m, s2 = lognormal_params(1.0, 1.0)
    assert m == pytest.approx(-math.log(2) / 2, abs=1e-15)
    assert s2 == pytest.approx(math.log(2), abs=1e-15)
    m, s2 = lognormal_params(1.0, 1e-14)
    assert abs(m) < 1e-13 and abs(s2) < 1e-13


@pytest.mark.parametrize("mean,var", [(1.0, 1.0), (2.0, 4.0)])
def test_lognormal_params_sampling(mean, var):
    m, s2 = lognormal_params(mean, var)
    rng = np.random.default_rng(3)
    x = np.exp(m + math.sqrt(s2) * rng.standard_normal(10 ** 6))
    mu_hat, se = oracles.mean_se(x)
    assert abs(mu_hat - mean) < 3 * se
    d = (x - mean) ** 2
    v_hat, v_se = oracles.mean_se(d)
    assert abs(v_hat - var) < 3 * v_se

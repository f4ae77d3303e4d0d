import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from inspectruin import BASE_MODEL, ModelError, delta_nk, xi, xi_k_deriv
from inspectruin.montecarlo import sample_killed_maximum
from inspectruin.wiener_hopf import WhContext

import oracles

M = BASE_MODEL


def test_xi_at_zero():
    assert xi(M, 0.0, 1.0) == pytest.approx(1.0, abs=1e-15)


def test_xi_matches_textbook_form():
    for a in (0.1, 0.5, 2.0, 7.0):
        for b in (0.05, 1.0, 4.0):
            assert xi(M, a, b) == pytest.approx(oracles.xi_classic(M, a, b), rel=1e-12)


def test_xi_removable_point():
    b = 1.0
    pb = M.psi(b)
    lhopital = b / (pb * M.phi_prime(pb))
    assert xi(M, pb, b) == pytest.approx(lhopital, rel=1e-12)
    avg = 0.5 * (oracles.xi_classic(M, pb + 1e-5, b) + oracles.xi_classic(M, pb - 1e-5, b))
    assert xi(M, pb, b) == pytest.approx(avg, rel=1e-8)


def test_xi_twisted_matches_shifted_form():
    q = M.twist()
    for a in (0.1, 0.5, 1.5):
        for b in (0.3, 1.0):
            assert xi(q, a, b) == pytest.approx(oracles.xi_q_original(M, a, b), rel=1e-11)


def test_xi_against_simulated_maximum():
    rng = np.random.default_rng(2024)
    ymax = sample_killed_maximum(M, 1.0, 10 ** 6, rng)
    m, se = oracles.mean_se(np.exp(-0.5 * ymax))
    assert abs(m - xi(M, 0.5, 1.0)) < 3 * se


def test_complete_monotonicity():
    a = np.linspace(0.0, 20.0, 50)
    v = np.array([xi(M, x, 0.7) for x in a])
    assert np.all(v > 0)
    assert np.all(np.diff(v) < 0)
    assert np.all(np.diff(v, 2) > 0)


def test_xi_k_deriv_examples():
    assert xi_k_deriv(M, 1, 0, 0.0, 1.0) == pytest.approx(1.0, abs=1e-12)
    assert xi_k_deriv(M, 3, 0, 0.7, 1.0) == pytest.approx(xi(M, 0.7, 1.0) ** 3, rel=1e-10)
    h = 1e-4
    f = lambda a: xi(M, a, 1.0) ** 2
    fd = (f(0.7 + h) - 2 * f(0.7) + f(0.7 - h)) / h ** 2
    assert xi_k_deriv(M, 2, 2, 0.7, 1.0) == pytest.approx(fd, rel=1e-5)


def test_xi_k_deriv_high_order_against_classic_series():
    # fifth derivative of xi^3 against a Cauchy-integral evaluation of the textbook form
    a0, b, k, n = 0.9, 1.3, 3, 5
    r = 0.2
    t = np.exp(2j * np.pi * np.arange(256) / 256)
    vals = np.array([oracles.xi_classic(M, a0 + r * z, b) ** k for z in t])
    coef = np.mean(vals * t ** (-n)) / r ** n
    exact = xi_k_deriv(M, k, n, a0, b, eps=0) / math.factorial(n)
    assert exact == pytest.approx(coef.real, rel=1e-9)


def test_xi_k_deriv_cap():
    with pytest.raises(ModelError):
        xi_k_deriv(M, 20, 13, 0.5, 1.0)
    assert np.isfinite(xi_k_deriv(M, 20, 13, 0.5, 1.0, k_max=20))


@given(st.integers(1, 6), st.integers(0, 5), st.floats(0.05, 3.0), st.floats(0.1, 5.0))
def test_eps_offset_stability(k, n, a, b):
    d1 = xi_k_deriv(M, k, n, a, b)
    d2 = xi_k_deriv(M, k, n, a, b, eps=0.5e-6 * max(1.0, a))
    assert d1 == pytest.approx(d2, rel=1e-4, abs=1e-12)


def test_delta_examples():
    th = M.psi(1.5)
    assert delta_nk(M, 0, 1, None, 1.5) == pytest.approx(xi(M, th, 1.5), rel=1e-14)
    with pytest.raises(ModelError):
        delta_nk(M, 5, 3, None, 1.5)


def test_delta_against_marked_maximum():
    # delta_{1,2}: probability that a Poisson(theta) process puts exactly one mark
    # on [0, Z_2^+], Z_2^+ a sum of two independent killed running maxima
    beta, omega = 0.5, 1.0
    th = M.psi(beta + omega)
    rng = np.random.default_rng(77)
    n = 10 ** 6
    z = sample_killed_maximum(M, beta + omega, n, rng) + sample_killed_maximum(M, beta + omega, n, rng)
    marks = rng.poisson(th * z)
    hit = (marks == 1).astype(float)
    m, se = oracles.mean_se(hit)
    assert abs(m - delta_nk(M, 1, 2, th, beta + omega)) < 3 * se


@pytest.mark.parametrize("k", range(1, 7))
def test_delta_is_subprobability(k):
    for b in (0.2, 1.0, 3.0):
        d = [delta_nk(M, n, k, None, b) for n in range(k)]
        assert all(0 <= x <= 1 for x in d)
        assert sum(d) <= 1 + 1e-12


@pytest.mark.parametrize("c,kappa,k", [(0.5, 1.0, 0), (0.5, 1.0, 3), (2.0, 0.3, 2), (1.0, 4.0, 5)])
def test_marked_tail_identity(c, kappa, k):
    # int e^{-kx}(kx)^k/k! P(X > x) dx = (1 - sum_{n<=k} chi^(n)(kappa)(-kappa)^n/n!) / kappa
    lhs, _ = integrate.quad(lambda x: math.exp(-kappa * x) * (kappa * x) ** k / math.factorial(k)
                            * math.exp(-c * x), 0, np.inf)
    chi_n = lambda n: c * (-1) ** n * math.factorial(n) / (c + kappa) ** (n + 1)
    rhs = (1 - sum(chi_n(n) * (-kappa) ** n / math.factorial(n) for n in range(k + 1))) / kappa
    assert lhs == pytest.approx(rhs, abs=1e-8)


def test_context_theta_consistency():
    ctx = WhContext(M, 1.3)
    assert abs(ctx.theta - oracles.bisect_psi(M, 1.3)) < 1e-10
    with pytest.raises(ModelError):
        WhContext(M, 1.3, theta=ctx.theta + 1e-3)


def test_divided_difference():
    ctx = WhContext(M, 0.8)
    for k in (1, 3):
        a, c = 0.37, 1.91
        assert ctx.dd(a, c, k) == pytest.approx((ctx.xi(a) ** k - ctx.xi(c) ** k) / (a - c), rel=1e-12)
        assert ctx.dd(a, a, k) == pytest.approx(xi_k_deriv(M, k, 1, a, 0.8, eps=0), rel=1e-12)

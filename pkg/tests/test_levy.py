import math
import time

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from inspectruin import BASE_MODEL, LevyModel, ModelError, PoleError
from inspectruin.montecarlo import sample_increments

import oracles

M = BASE_MODEL


def test_phi_at_zero():
    assert M.phi(0.0) == 0.0


def test_phi_vanishes_at_reference_theta():
    assert abs(M.phi(-0.32875)) < 1e-4


def test_phi_rational_form():
    for a in (0.3, 1.7, -0.5, 2 + 1j):
        rational = a * (M.sigma2 * a * a + (M.mu * M.sigma2 + 2 * M.r) * a
                        + 2 * (M.r * M.mu - M.lam)) / (2 * (M.mu + a))
        assert abs(M.phi(a) - rational) < 1e-13


def test_phi_pole():
    with pytest.raises(PoleError):
        M.phi(-M.mu)


def test_phi_matches_simulated_exponent():
    rng = np.random.default_rng(11)
    y = sample_increments(M, 1.0, rng, n=10 ** 6)
    m, se = oracles.mean_se(np.exp(-y))
    target = math.exp(M.phi(1.0))
    assert abs(m - target) < 3 * se


def test_phi_prime():
    assert M.phi_prime(0.0) == pytest.approx(0.2, abs=1e-14)
    h = 1e-6
    fd = (M.phi(h) - M.phi(-h)) / (2 * h)
    assert abs(fd - M.phi_prime(0.0)) < 1e-8
    assert M.phi_prime(-M.theta_star()) < 0
    assert LevyModel(0.02, 1.2, 0.0, 2.0).phi_prime(0.0) == pytest.approx(1.2)


def test_psi_examples():
    assert M.psi(0.0) == 0.0
    assert abs(M.psi(1.0) - oracles.bisect_psi(M, 1.0)) < 1e-10
    assert abs(M.psi(M.phi(2.0)) - 2.0) < 1e-10


@given(st.floats(min_value=1e-6, max_value=100.0))
def test_psi_right_inverse(beta):
    a = M.psi(beta)
    assert a >= 0
    assert abs(M.phi(a) - beta) <= 1e-9 * max(1.0, beta)


def test_theta_star_reference_value():
    t0 = time.perf_counter()
    ts = M.theta_star()
    assert time.perf_counter() - t0 < 1e-3
    assert abs(ts - 0.32875) < 5e-5
    assert abs(M.phi(-ts)) < 1e-10
    assert 0 < ts < M.mu


def test_theta_star_against_bisection():
    m = LevyModel(1.0, 2.0, 1.0, 1.0)
    assert abs(m.theta_star() - oracles.bisect_theta_star(m)) < 1e-10


@given(st.floats(0.01, 2.0), st.floats(0.2, 3.0), st.floats(0.1, 3.0), st.floats(0.3, 4.0))
def test_theta_star_property(sigma2, r, lam, mu):
    try:
        m = LevyModel(sigma2, r, lam, mu)
    except ModelError:
        return
    if lam == 0:
        return
    ts = m.theta_star()
    assert 0 < ts < mu
    assert abs(m.phi(-ts)) < 1e-10 * (1 + m.r * ts)
    assert abs(ts - oracles.bisect_theta_star(m)) < 1e-9


def test_twist():
    q = M.twist()
    ts = M.theta_star()
    assert q.measure == "Q"
    assert abs(q.phi(ts)) < 1e-14
    for a in np.linspace(0.1, 2.0, 20):
        assert abs(q.phi(a) - M.phi(a - ts)) < 1e-12
    assert -q.phi_prime(0.0) > 0  # positive drift of Y under the twist


def test_psi_q_shift():
    q = M.twist()
    ts = M.theta_star()
    for b in (0.0, 0.1, 1.0, 10.0):
        assert abs(q.psi(b) - (M.psi(b) + ts)) < 1e-9


def test_convexity():
    rng = np.random.default_rng(5)
    h = 1e-4
    for a in rng.uniform(-M.mu + 0.05, 10.0, 100):
        d2 = M.phi(a + h) - 2 * M.phi(a) + M.phi(a - h)
        assert d2 > 0
        assert M.phi_second(a) > 0


@pytest.mark.parametrize("args", [
    (0.0, 1.2, 2.0, 2.0),      # sigma2 = 0 not supported
    (0.02, 0.9, 2.0, 2.0),     # net profit violated
    (0.02, -1.0, 2.0, 2.0),
    (0.02, 1.2, -1.0, 2.0),
    (0.02, 1.2, 2.0, 0.0),
    (float("nan"), 1.2, 2.0, 2.0),
])
def test_invalid_models(args):
    with pytest.raises(ModelError):
        LevyModel(*args)

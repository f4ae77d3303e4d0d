import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from inspectruin import (BASE_MODEL, LevyModel, ModelError, roots_erlang, roots_hyperexp,
                         roots_hypererlang, roots_rooteq_fit)
from inspectruin.rootfind import RES_TOL

import oracles

M = BASE_MODEL


def _certify(rs, expected):
    assert len(rs.roots) == expected == rs.expected_count
    r = np.asarray(rs.roots, complex)
    assert np.all(rs.residuals <= RES_TOL * (1 + np.abs(r)))
    nonreal = r[np.abs(r.imag) > 0]
    for z in nonreal:
        assert np.min(np.abs(r - z.conjugate())) <= 1e-9
    if len(r) > 1:
        d = np.abs(r[:, None] - r[None, :])
        np.fill_diagonal(d, np.inf)
        assert d.min() > 1e-7


def test_hyperexp_single():
    rs = roots_hyperexp(M, [1.0], [1.0], 0.5)
    assert rs.roots == pytest.approx([M.psi(0.5)], abs=1e-12)


def test_hyperexp_two_phase_bracketed():
    p, w, b = [0.85355, 0.14645], [1.70711, 0.29289], 0.3
    rs = roots_hyperexp(M, p, w, b)
    _certify(rs, 2)
    assert rs.is_real
    r = np.sort(rs.roots.real)
    assert abs(r[0] - M.psi(b)) < 1e-9
    # second root lies between psi(b + w_min) and psi(b + w_max)
    assert M.psi(b + min(w)) < r[1] < M.psi(b + max(w))
    f = lambda a: sum(pi * wi / (b + wi - oracles.phi(M, a)) for pi, wi in zip(p, w)) - 1
    from scipy.optimize import bisect
    ref = bisect(f, M.psi(b + min(w)) + 1e-9, M.psi(b + max(w)) - 1e-9, xtol=1e-14)
    assert abs(r[1] - ref) < 1e-9


def test_hyperexp_lumping():
    rs = roots_hyperexp(M, [0.5, 0.5], [1.0, 1.0], 1.0)
    assert len(rs.roots) == 1
    assert rs.roots[0] == pytest.approx(M.psi(1.0), abs=1e-12)


def test_hyperexp_rejects_bad_weights():
    with pytest.raises(ModelError):
        roots_hyperexp(M, [0.5, 0.6], [1.0, 2.0], 0.3)


def test_erlang_examples():
    rs = roots_erlang(M, 1, 1.0, 0.5)
    assert rs.roots == pytest.approx([M.psi(0.5)], abs=1e-12)
    rs = roots_erlang(M, 3, 1.0, 0.2)
    _certify(rs, 3)
    for a in rs.roots:
        lv = 0.2 + 1.0 - oracles.phi(M, a)
        assert abs((1.0 / lv) ** 3 - 1) < 1e-9
    assert np.min(np.abs(rs.roots - M.psi(0.2))) < 1e-12


def test_erlang_boundary_root():
    rs = roots_erlang(M, 2, 1.0, 0.0)
    assert len(rs.roots) == 2
    assert rs.boundary
    assert np.min(np.abs(rs.roots)) == 0.0


def test_hypererlang_examples():
    a = roots_hypererlang(M, [3], [1.0], 1.0, 0.4)
    b = roots_erlang(M, 3, 1.0, 0.4)
    assert oracles.match_roots(a.roots, b.roots) < 1e-14
    rs = roots_hypererlang(M, [1, 2], [0.5, 0.5], 1.0, 0.3)
    _certify(rs, 2)
    # substitution oracle: 0.5 y + 0.5 y^2 = 1 gives y in {1, -2}
    expected = []
    for y in (1.0, -2.0):
        expected += [x for x in np.roots(M.level_cubic(0.3 + 1.0 - 1.0 / y)) if x.real > 1e-9]
    assert oracles.match_roots(rs.roots, expected) < 1e-9
    _certify(roots_hypererlang(M, [2, 3], [0.4, 0.6], 2.0, 0.1), 3)


def test_rooteq_fit_examples():
    q = M.twist()
    rs = roots_rooteq_fit(q, 1, 1.0, 1.0)
    assert len(rs.roots) == 2
    assert np.min(np.abs(rs.roots - 0.32875)) < 5e-5
    rs = roots_rooteq_fit(q, 2, 0.5, 1.0)
    assert oracles.match_roots(rs.roots, oracles.direct_roots_rooteq(q, 2, 0.5, 1.0)) < 1e-8
    a = roots_rooteq_fit(q, 1, 0.0, 1.0)
    b = roots_erlang(q, 2, 1.0, 0.0)
    assert oracles.match_roots(a.roots, b.roots) < 1e-12


def test_twisted_counts():
    q = M.twist()
    for k in range(1, 6):
        rs = roots_erlang(q, k, 1.3, 0.0)
        _certify(rs, k)
        assert np.min(np.abs(rs.roots - M.theta_star())) < 1e-9
    _certify(roots_hyperexp(q, [0.3, 0.7], [0.4, 2.0], 0.0), 2)


models = st.builds(lambda s, r, l, mu: (s, r, l, mu), st.floats(0.01, 1.0), st.floats(0.5, 3.0),
                   st.floats(0.1, 2.0), st.floats(0.5, 3.0))


def _model(t):
    try:
        return LevyModel(*t)
    except ModelError:
        return None


@given(models, st.lists(st.floats(0.05, 1.0), min_size=1, max_size=4),
       st.lists(st.floats(0.1, 5.0), min_size=4, max_size=4), st.floats(0.01, 2.0))
def test_hyperexp_property(mt, praw, w, beta):
    m = _model(mt)
    if m is None:
        return
    d = len(praw)
    p = np.array(praw) / sum(praw)
    w = np.array(w[:d])
    if d > 1 and np.min(np.diff(np.sort(w))) < 1e-3:
        return
    rs = roots_hyperexp(m, p, w, beta)
    _certify(rs, d)
    assert rs.is_real
    assert abs(np.min(rs.roots) - m.psi(beta)) < 1e-9
    assert oracles.match_roots(rs.roots, oracles.direct_roots_hyperexp(m, p, w, beta)) < 1e-8


@given(models, st.integers(1, 4), st.floats(0.1, 5.0), st.floats(0.01, 2.0))
def test_erlang_property(mt, k, w, beta):
    m = _model(mt)
    if m is None:
        return
    rs = roots_erlang(m, k, w, beta)
    _certify(rs, k)
    assert oracles.match_roots(rs.roots, oracles.direct_roots_hypererlang(m, [k], [1.0], w, beta)) < 1e-8

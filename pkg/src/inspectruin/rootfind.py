"""Right half-plane roots of the characteristic equations.

Every family's equation depends on alpha only through phi(alpha), so roots are
found in two steps: first the admissible levels ``t = phi(alpha)`` (closed form
or a small polynomial), then for each level the cubic ``2 (mu + a)(phi(a) - t)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import ModelError, RootCountError, RootMultiplicityError
from .levy import LevyModel

RE_TOL = 1e-9
SEP_TOL = 1e-7
RES_TOL = 1e-9


@dataclass(frozen=True)
class RootSet:
    roots: np.ndarray
    residuals: np.ndarray
    expected_count: int
    # True when alpha = 0 sits in the set as the boundary (beta = 0) root
    boundary: bool = False
    levels: np.ndarray = field(default=None, repr=False)

    def __len__(self):
        return len(self.roots)

    @property
    def is_real(self):
        return bool(np.all(self.roots.imag == 0))


def lump(p, omega):
    """Merge equal rates, drop zero weights, sort rates ascending."""
    acc = {}
    for pi, wi in zip(p, omega):
        pi, wi = float(pi), float(wi)
        if wi <= 0:
            raise ModelError("rates must be > 0")
        if pi < 0:
            raise ModelError("weights must be >= 0")
        if pi > 0:
            acc[wi] = acc.get(wi, 0.0) + pi
    if not acc or abs(sum(acc.values()) - 1.0) > 1e-12:
        raise ModelError("weights must sum to 1")
    rates = np.array(sorted(acc))
    return np.array([acc[w] for w in rates]), rates


def reduce_erlang_mixture(k, p):
    """Drop zero-weight components of a hyper-Erlang mixture."""
    k = [int(x) for x in k]
    p = [float(x) for x in p]
    if any(b <= a for a, b in zip(k, k[1:])) or k[0] < 1:
        raise ModelError("shapes must be strictly increasing positive integers")
    if any(x < 0 for x in p) or abs(sum(p) - 1.0) > 1e-12:
        raise ModelError("weights must be >= 0 and sum to 1")
    keep = [(a, b) for a, b in zip(k, p) if b > 0]
    return np.array([a for a, _ in keep]), np.array([b for _, b in keep])


# -- step 2: levels to alphas ------------------------------------------------

def _polish(model: LevyModel, a, t, iters=4):
    for _ in range(iters):
        d = model.phi_prime(a)
        if d == 0:
            break
        step = (model.phi(a) - t) / d
        a = a - step
        if abs(step) <= 1e-16 * max(1.0, abs(a)):
            break
    return a


def alphas_for_level(model: LevyModel, t):
    """Roots of phi(a) = t with real part > RE_TOL; also reports a root at 0."""
    real_level = np.isreal(t)
    t = complex(t).real if real_level else complex(t)
    cand = np.roots(model.level_cubic(t))
    out, zero = [], False
    for a in cand:
        if real_level and abs(a.imag) <= 1e-9 * (1 + abs(a)):
            a = a.real
        a = _polish(model, a, t)
        if real_level and isinstance(a, complex) and abs(a.imag) <= 1e-12 * (1 + abs(a)):
            a = a.real
        if a.real > RE_TOL:
            out.append(a)
        elif abs(a) <= 1e-9:
            zero = True
    return out, zero


def _classify_levels(levels):
    """Split levels into real ones and upper-half-plane representatives of
    conjugate pairs."""
    reals, uppers = [], []
    for t in levels:
        if abs(t.imag) <= 1e-12 * (1 + abs(t)):
            reals.append(t.real)
        elif t.imag > 0:
            uppers.append(t)
    n_lower = sum(1 for t in levels if t.imag < -1e-12 * (1 + abs(t)))
    if n_lower != len(uppers):
        raise RootCountError("characteristic levels are not closed under conjugation")
    return reals, uppers


def _assemble(model, levels, residual_fn, expected, allow_boundary):
    reals, uppers = _classify_levels(np.asarray(levels, dtype=complex))
    roots, boundary = [], False
    for t in reals:
        found, zero = alphas_for_level(model, t)
        roots.extend(float(np.real(a)) for a in found)
        if zero and not found:
            boundary = True
    for t in uppers:
        found, _ = alphas_for_level(model, t)
        for a in found:
            a = complex(a)
            roots.append(a)
            roots.append(a.conjugate())
    if boundary:
        if allow_boundary and len(roots) == expected - 1:
            roots.append(0.0)
        else:
            boundary = False
    if len(roots) != expected:
        raise RootCountError(f"found {len(roots)} right half-plane roots, expected {expected}")
    arr = np.array(roots, dtype=complex)
    order = np.lexsort((arr.imag, arr.real))
    arr = arr[order]
    if len(arr) > 1:
        sep = np.abs(arr[:, None] - arr[None, :])
        np.fill_diagonal(sep, np.inf)
        if sep.min() < SEP_TOL:
            raise RootMultiplicityError(f"roots closer than {SEP_TOL}: separation {sep.min():.3g}")
    res = np.array([abs(residual_fn(a)) for a in arr])
    # judge the Newton step rather than the raw residual: near-coincident
    # rates make the equation steep, so exact roots can leave residuals ~1e-8
    h = 1e-6 * (1 + np.abs(arr))
    slope = np.array([abs(residual_fn(a + d) - residual_fn(a - d)) / (2 * d) for a, d in zip(arr, h)])
    with np.errstate(divide="ignore", invalid="ignore"):
        step = np.where(res == 0, 0.0, res / slope)
    bad = ~(step <= RES_TOL * (1 + np.abs(arr)))
    if np.any(bad):
        raise RootCountError(f"root residuals too large: {res[bad]}")
    return RootSet(arr, res, expected, boundary, np.asarray(levels))


def _real_if_possible(arr):
    arr = np.asarray(arr, dtype=complex)
    return arr.real.copy() if np.all(arr.imag == 0) else arr


def _finish(rs: RootSet):
    return RootSet(_real_if_possible(rs.roots), rs.residuals, rs.expected_count, rs.boundary, rs.levels)


def _check_beta(model, beta):
    beta = float(beta)
    if beta < 0:
        raise ModelError("beta must be >= 0")
    return beta


# -- families ------------------------------------------------------------------

def hyperexp_levels(p, omega):
    """Solutions c of sum p_i w_i / (w_i - c) = 1: zero plus one per gap."""
    p, w = np.asarray(p, float), np.asarray(omega, float)
    f = lambda c: np.sum(p * w / (w - c)) - 1.0
    levels = [0.0]
    for lo, hi in zip(w[:-1], w[1:]):
        # f runs from -inf just above lo to +inf just below hi
        a, b = np.nextafter(lo, hi), np.nextafter(hi, lo)
        levels.append(brentq(f, a, b, xtol=1e-15 * max(1.0, hi), rtol=1e-15, maxiter=500))
    return np.array(levels)


def roots_hyperexp(model: LevyModel, p, omega, beta: float) -> RootSet:
    """Roots of sum_i p_i w_i / (beta + w_i - phi(a)) = 1 with Re a > 0."""
    beta = _check_beta(model, beta)
    p, w = lump(p, omega)
    levels = beta + hyperexp_levels(p, w)

    def resid(a):
        return np.sum(p * w / (beta + w - model.phi(a))) - 1.0

    return _finish(_assemble(model, levels, resid, len(w), model.measure == "P" and beta == 0))


def erlang_levels(k: int, omega: float, beta: float):
    j = np.arange(k)
    lv = beta + omega - omega * np.exp(2j * np.pi * j / k)
    lv[0] = beta
    if k % 2 == 0:
        lv[k // 2] = beta + 2 * omega
    return lv


def roots_erlang(model: LevyModel, k: int, omega: float, beta: float) -> RootSet:
    """Roots of (w / (beta + w - phi(a)))^k = 1 with Re a > 0."""
    beta = _check_beta(model, beta)
    if int(k) != k or k < 1:
        raise ModelError("k must be a positive integer")
    k = int(k)
    levels = erlang_levels(k, omega, beta)

    def resid(a):
        return (omega / (beta + omega - model.phi(a))) ** k - 1.0

    return _finish(_assemble(model, levels, resid, k, model.measure == "P" and beta == 0))


def _polish_poly(coeffs, x, iters=3):
    dc = np.polyder(coeffs)
    for _ in range(iters):
        d = np.polyval(dc, x)
        if d == 0:
            break
        x = x - np.polyval(coeffs, x) / d
    return x


def mixture_levels(k, p, omega: float, beta: float):
    """Levels for sum_i p_i y^{k_i} = 1, y = w / (beta + w - phi).

    With x = 1/y the equation is the polynomial x^K = sum_i pbar_i x^{K - i}.
    """
    K = int(k[-1])
    pbar = np.zeros(K + 1)
    for ki, pi in zip(k, p):
        pbar[int(ki)] += pi
    coeffs = np.zeros(K + 1)
    coeffs[0] = 1.0
    for i in range(1, K + 1):
        coeffs[i] = -pbar[i]
    xs = np.roots(coeffs)
    xs = np.array([_polish_poly(coeffs, x) for x in xs])
    # exact conjugate pairing of the x roots
    xs = np.where(np.abs(xs.imag) <= 1e-12 * (1 + np.abs(xs)), xs.real, xs)
    return beta + omega - omega * xs


def roots_hypererlang(model: LevyModel, k, p, omega: float, beta: float) -> RootSet:
    """Roots of sum_i p_i (w / (beta + w - phi(a)))^{k_i} = 1 with Re a > 0."""
    beta = _check_beta(model, beta)
    k, p = reduce_erlang_mixture(k, p)
    if len(k) == 1:
        return roots_erlang(model, int(k[0]), omega, beta)
    levels = mixture_levels(k, p, omega, beta)

    def resid(a):
        y = omega / (beta + omega - model.phi(a))
        return np.sum(p * y ** k) - 1.0

    return _finish(_assemble(model, levels, resid, int(k[-1]), model.measure == "P" and beta == 0))


def roots_rooteq_fit(model_q: LevyModel, k: int, p: float, omega: float) -> RootSet:
    """Roots of 1 - ((w - phi(a)) / w)^{k+1} = p phi(a) / w under the twisted model.

    In x = (w - phi)/w this is x^{k+1} - p x - (1 - p) = 0; every one of its
    k + 1 solutions yields one right half-plane alpha, theta_star among them.
    """
    if model_q.measure != "Q":
        raise ModelError("roots_rooteq_fit expects a twisted model")
    k = int(k)
    if k < 1 or not (0 <= p <= 1):
        raise ModelError("need k >= 1 and 0 <= p <= 1")
    coeffs = np.zeros(k + 2)
    coeffs[0] = 1.0
    coeffs[-2] -= p
    coeffs[-1] -= 1 - p
    xs = np.roots(coeffs)
    xs = np.array([_polish_poly(coeffs, x) for x in xs])
    xs = np.where(np.abs(xs.imag) <= 1e-12 * (1 + np.abs(xs)), xs.real, xs)
    levels = omega - omega * xs

    def resid(a):
        ph = model_q.phi(a)
        return 1 - ((omega - ph) / omega) ** (k + 1) - p * ph / omega

    return _finish(_assemble(model_q, levels, resid, k + 1, False))

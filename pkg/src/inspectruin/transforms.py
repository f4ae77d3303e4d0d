"""Transforms pi(alpha, beta | Omega) of the finite-horizon bankruptcy probability.

``pi(alpha, beta | Omega) = int_0^inf e^{-alpha u} p(u, T_beta | Omega) du`` for
exponential, hyperexponential, Erlang and hyper-Erlang inspection.

The building blocks are shared with the overshoot transforms of the
asymptotics module.  There the process is the twisted one, nothing is killed
and a shift ``s = theta_star`` appears; here ``s = 0``.  Writing
``T = theta / (theta - s)`` and ``D(a, c)`` for divided differences of xi^k:

    F(a)      = T (D(theta, a) - D(s, a))
    I_k(a)    = -T^k [ D(s, a) + sum_{n<k} (theta - s)^n R_n(a) / (theta - a)^{n+1} ]

with ``R_n`` the Taylor remainder of xi^k at theta after order n.  The Erlang
equations are multiplied through by ``(theta - a)^K`` so that nothing in them
is singular at ``a = theta``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ModelError, NumericalError, SingularSystemError
from .laws import Erlang, Exponential, HyperErlang, Hyperexponential, Lognormal
from .levy import LevyModel
from .rootfind import (RootSet, lump, reduce_erlang_mixture, roots_erlang,
                       roots_hyperexp, roots_hypererlang)
from .wiener_hopf import K_MAX, WhContext, deltas

COND_MAX = 1e12
SING_TOL = 1e-8


@dataclass(frozen=True)
class TransformEval:
    value: float
    rho: float
    roots: RootSet
    z: np.ndarray
    condition: float = 1.0
    # right-hand side minus left-hand side of the z-system at each root
    residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))


# -- helpers -------------------------------------------------------------------

def eps_offset(alpha) -> float:
    return 1e-6 * max(1.0, abs(alpha))


def _near(alpha, points) -> bool:
    tol = SING_TOL * max(1.0, abs(alpha))
    return any(abs(alpha - p) < tol for p in points)


def _averaged(fn, alpha, points):
    """fn(alpha), or the two-sided eps-offset average if alpha is singular."""
    if _near(alpha, points):
        e = eps_offset(alpha)
        return 0.5 * (fn(alpha - e) + fn(alpha + e))
    return fn(alpha)


def solve_realified(A, b, roots):
    """Solve the complex system A z = b known to have a real solution.

    Rows of a conjugate root pair are replaced by the real and imaginary parts
    of one of them; then rows and columns are equilibrated before solving.
    Returns (z, condition).
    """
    A = np.asarray(A, dtype=complex)
    b = np.asarray(b, dtype=complex)
    rows, rhs = [], []
    for j, a in enumerate(roots):
        a = complex(a)
        if a.imag == 0:
            rows.append(A[j].real)
            rhs.append(b[j].real)
        elif a.imag > 0:
            rows += [A[j].real, A[j].imag]
            rhs += [b[j].real, b[j].imag]
    M = np.array(rows)
    v = np.array(rhs)
    if M.shape[0] != M.shape[1]:
        raise NumericalError("roots are not closed under conjugation")
    r = np.max(np.abs(M), axis=1)
    r[r == 0] = 1.0
    M = M / r[:, None]
    v = v / r
    c = np.max(np.abs(M), axis=0)
    c[c == 0] = 1.0
    M = M / c[None, :]
    cond = float(np.linalg.cond(M))
    if not np.isfinite(cond) or cond > COND_MAX:
        raise SingularSystemError(f"linear system condition {cond:.3g} exceeds {COND_MAX:.0e}", cond)
    z = np.linalg.solve(M, v) / c
    return z, cond


def _check_pos(**kw):
    bad = [k for k, v in kw.items() if not (np.isfinite(v) and v > 0)]
    if bad:
        raise ModelError("must be finite and > 0: " + ", ".join(bad))


# -- shared building blocks -----------------------------------------------------

def f_block(ctx: WhContext, s: float, a):
    """F(a) = theta/(theta - s) (D(theta, a) - D(s, a))."""
    th = ctx.theta
    return th / (th - s) * (ctx.dd(th, a) - ctx.dd(s, a))


class ErlangBlock:
    """Scaled Erlang pieces for a single shape k around a common theta."""

    def __init__(self, ctx: WhContext, k: int, s: float):
        if k > K_MAX:
            raise ModelError(f"Erlang shape {k} exceeds the derivative cap {K_MAX}")
        self.ctx, self.k, self.s = ctx, int(k), float(s)
        self.delta, self.coef = deltas(ctx, self.k)

    def scaled_i(self, a):
        """(theta - a)^k I(a)."""
        ctx, k, s = self.ctx, self.k, self.s
        th = ctx.theta
        T = th / (th - s)
        d = th - a
        xk = ctx.xi_k(a, k)
        acc = d ** k * ctx.dd(s, a, k)
        taylor = 0
        for n in range(k):
            taylor = taylor + self.coef[n] * (a - th) ** n
            acc = acc + (th - s) ** n * d ** (k - n - 1) * (xk - taylor)
        return -T ** k * acc

    def scaled_jbar(self, a):
        """[(theta - a)^k Jbar_i(a) for i = 0..k-1]."""
        k, th = self.k, self.ctx.theta
        d = th - a
        out = []
        for i in range(k):
            s = 0
            for n in range(i, k):
                s = s + self.delta[k - 1 - n] * th ** (n + 1) * d ** (k - n - 1)
            out.append(s * (a - th) ** i / math.factorial(i))
        return out


class ErlangMixture:
    """Linear system and transform for sum_i p_i Erlang(k_i, omega).

    ``ctx`` is killed at ``beta + omega`` (original measure, ``s = 0``) or at
    ``omega`` (twisted measure, ``s = theta_star``).  ``weights`` are the
    ``p_i (omega / (beta + omega))^{k_i}`` factors of the mixture equation.
    """

    def __init__(self, ctx: WhContext, ks, ps, omega, s, weights, roots: RootSet):
        self.ctx, self.omega, self.s = ctx, float(omega), float(s)
        self.ks, self.ps = [int(k) for k in ks], [float(p) for p in ps]
        self.K = self.ks[-1]
        self.weights = list(weights)
        self.blocks = {k: ErlangBlock(ctx, k, s) for k in self.ks}
        self.roots = roots
        A, b = [], []
        for a in roots.roots:
            row, rhs = self._row(a)
            A.append(row)
            b.append(rhs)
        self.A, self.b = np.array(A, dtype=complex), np.array(b, dtype=complex)
        self.z, self.condition = solve_realified(self.A, self.b, roots.roots)
        self.residuals = np.abs(self.A @ self.z - self.b)

    def _row(self, a):
        th, K = self.ctx.theta, self.K
        row = np.zeros(K, dtype=complex)
        rhs = 0
        for k, w in zip(self.ks, self.weights):
            blk = self.blocks[k]
            sc = w * (th - a) ** (K - k)
            rhs = rhs + sc * blk.scaled_i(a)
            row[:k] += sc * np.asarray(blk.scaled_jbar(a))
        return row, rhs

    def numerator(self, a):
        """(theta - a)^K sum_i w_i (I_i(a) - J_i(a))."""
        row, rhs = self._row(a)
        return rhs - row @ self.z

    def per_component(self, a):
        """[I_i(a) - J_i(a)] per component (unscaled; a must differ from theta)."""
        th = self.ctx.theta
        out = []
        for k in self.ks:
            blk = self.blocks[k]
            jb = np.asarray(blk.scaled_jbar(a))
            out.append((blk.scaled_i(a) - jb @ self.z[:k]) / (th - a) ** k)
        return out


def _mixture_denominator(ctx, ks, ps, omega, killing, a):
    """(theta - a)^K (1 - sum_i p_i (omega / (killing - phi(a)))^{k_i})."""
    th, K = ctx.theta, ks[-1]
    y = omega * th * ctx.xi(a) / killing  # = omega (theta - a) / (killing - phi(a))
    d = th - a
    return d ** K - sum(p * d ** (K - k) * y ** k for k, p in zip(ks, ps))


# -- public transforms -------------------------------------------------------------

def pi_exp(model: LevyModel, alpha: float, beta: float, omega: float) -> TransformEval:
    """Exponential inspection with rate omega, in closed form."""
    _check_pos(alpha=alpha, beta=beta, omega=omega)
    alpha, beta, omega = float(alpha), float(beta), float(omega)
    th = model.psi(beta + omega)
    pb = model.psi(beta)
    if _near(alpha, (th, pb)):
        rho = WhContext(model, beta).xi(alpha) / WhContext(model, beta + omega).xi(alpha)
        value = (1.0 - rho) / alpha
    else:
        ph = model.phi(alpha)
        num = omega * ph * (th - alpha) * pb + alpha * beta * (ph - beta - omega) * (th - pb)
        den = (ph - beta) * (beta + omega) * (th - alpha) * pb
        value = num / den / alpha
        rho = 1.0 - alpha * value
    xt = WhContext(model, beta + omega).xi(th)
    z_theta = (omega * pb * xt - beta * th + beta * pb) / (th * omega * pb * xt)
    roots = RootSet(np.array([pb]), np.array([0.0]), 1)
    return TransformEval(float(value), float(rho), roots, np.array([z_theta]))


def pi_exp_product(model: LevyModel, alpha, beta, omega):
    """rho via the four-factor product; used as an independent check."""
    pb, th = model.psi(beta), model.psi(beta + omega)
    ph = model.phi(alpha)
    return ((alpha - pb) / (ph - beta) * beta / pb
            * (ph - beta - omega) / (alpha - th) * th / (beta + omega))


class HyperexpSystem:
    """z-system for hyperexponential inspection (original or twisted measure)."""

    def __init__(self, model: LevyModel, p, omega, beta: float, s: float):
        self.model, self.beta, self.s = model, float(beta), float(s)
        self.p, self.w = lump(p, omega)
        self.ctx = [WhContext(model, beta + wi) for wi in self.w]
        self.theta = np.array([c.theta for c in self.ctx])
        self.scale = self.p * self.w / (beta + self.w)
        self.xtheta = np.array([c.xi(c.theta) for c in self.ctx])
        self.roots = roots_hyperexp(model, self.p, self.w, beta)
        A, b = [], []
        for a in self.roots.roots:
            row, rhs = self._row(a)
            A.append(row)
            b.append(rhs)
        self.A, self.b = np.array(A, dtype=complex), np.array(b, dtype=complex)
        self.z, self.condition = solve_realified(self.A, self.b, self.roots.roots)
        self.residuals = np.abs(self.A @ self.z - self.b)

    def gbar(self, a):
        return self.theta * self.xtheta / (self.theta - a)

    def f(self, a):
        return np.array([f_block(c, self.s, a) for c in self.ctx])

    def _row(self, a):
        return self.scale * self.gbar(a), np.sum(self.scale * self.f(a))

    def numerator(self, a):
        return np.sum(self.scale * (self.f(a) - self.gbar(a) * self.z))

    def denominator(self, a):
        return 1.0 - np.sum(self.p * self.w / (self.beta + self.w - self.model.phi(a)))


def pi_hyperexp(model: LevyModel, alpha: float, beta: float, p, omega) -> TransformEval:
    """Hyperexponential inspection: weights p, rates omega."""
    _check_pos(alpha=alpha, beta=beta)
    if any(not (w > 0) for w in omega):
        raise ModelError("rates must be > 0")
    sysm = HyperexpSystem(model, p, omega, beta, 0.0)
    sing = list(sysm.theta) + [complex(r) for r in sysm.roots.roots]
    value = _averaged(lambda a: sysm.numerator(a) / sysm.denominator(a), float(alpha), sing)
    value = float(np.real(value))
    return TransformEval(value, 1.0 - alpha * value, sysm.roots, sysm.z, sysm.condition, sysm.residuals)


def _pi_mixture(model, alpha, beta, ks, ps, omega):
    _check_pos(alpha=alpha, beta=beta, omega=omega)
    ks, ps = reduce_erlang_mixture(ks, ps)
    ks, ps = [int(k) for k in ks], [float(p) for p in ps]
    if ks[-1] > K_MAX:
        raise ModelError(f"Erlang shape {ks[-1]} exceeds the derivative cap {K_MAX}")
    killing = beta + omega
    ctx = WhContext(model, killing)
    roots = roots_hypererlang(model, ks, ps, omega, beta)
    weights = [p * (omega / killing) ** k for k, p in zip(ks, ps)]
    mix = ErlangMixture(ctx, ks, ps, omega, 0.0, weights, roots)

    def ratio(a):
        return mix.numerator(a) / _mixture_denominator(ctx, ks, ps, omega, killing, a)

    value = float(np.real(_averaged(ratio, float(alpha), [complex(r) for r in roots.roots])))
    return TransformEval(value, 1.0 - alpha * value, roots, mix.z, mix.condition, mix.residuals)


def pi_erlang(model: LevyModel, alpha: float, beta: float, k: int, omega: float) -> TransformEval:
    """Erlang(k, omega) inspection."""
    if int(k) != k or k < 1:
        raise ModelError("k must be a positive integer")
    return _pi_mixture(model, alpha, beta, [int(k)], [1.0], omega)


def pi_hypererlang(model: LevyModel, alpha: float, beta: float, k, p, omega: float) -> TransformEval:
    """Mixture of Erlang(k_i, omega) with weights p_i (common scale omega)."""
    return _pi_mixture(model, alpha, beta, k, p, omega)


def pi(model: LevyModel, alpha: float, beta: float, law) -> TransformEval:
    """Dispatch on the inspection law."""
    if isinstance(law, Exponential):
        return pi_exp(model, alpha, beta, law.rate)
    if isinstance(law, Hyperexponential):
        return pi_hyperexp(model, alpha, beta, law.p, law.rates)
    if isinstance(law, Erlang):
        return pi_erlang(model, alpha, beta, law.k, law.rate)
    if isinstance(law, HyperErlang):
        return pi_hypererlang(model, alpha, beta, law.k, law.p, law.rate)
    if isinstance(law, Lognormal):
        raise ModelError("no exact transform for lognormal inspection; use simulation")
    raise ModelError(f"unsupported inspection law {law!r}")

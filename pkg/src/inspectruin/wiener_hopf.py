"""Wiener-Hopf factor of the running maximum at an exponential killing time.

For killing rate ``b`` and ``theta = psi(b)``,

    xi(a, b) = E exp(-a sup_{s <= T_b} Y(s)) = ((a - theta) / (phi(a) - b)) * (b / theta).

Clearing the denominator of phi, ``2 (mu + a) (phi(a) - b)`` is a cubic with
root ``theta``; dividing that root out leaves a quadratic ``q`` and

    xi(a, b) = 2 b (mu + a) / (theta q(a)).

This form has no removable singularity at ``a = theta``, so values, divided
differences and Taylor coefficients are all computed exactly from polynomials.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ModelError
from .levy import LevyModel

K_MAX = 12


def default_eps(alpha) -> float:
    return 1e-6 * max(1.0, abs(alpha))


@dataclass(frozen=True)
class WhContext:
    """Wiener-Hopf factor of ``model`` killed at rate ``killing``."""

    model: LevyModel
    killing: float
    theta: float = field(default=None)

    def __post_init__(self):
        if not self.killing > 0:
            raise ModelError("killing rate must be > 0")
        th = self.model.psi(self.killing)
        if self.theta is not None and abs(self.theta - th) > 1e-10 * max(1.0, th):
            raise ModelError(f"theta {self.theta} inconsistent with psi(killing) = {th}")
        m = self.model
        object.__setattr__(self, "theta", th)
        # q(a) = s2 a^2 + q1 a + q0, from dividing out (a - theta)
        object.__setattr__(self, "_q1", m.mu * m.sigma2 + 2 * m.r + th * m.sigma2)
        object.__setattr__(self, "_q0", 2 * self.killing * m.mu / th)
        object.__setattr__(self, "_c", 2 * self.killing / th)

    # -- basic pieces -------------------------------------------------------

    def q(self, a):
        return (self.model.sigma2 * a + self._q1) * a + self._q0

    def xi(self, a):
        """xi(a, killing); real or complex, scalar or array."""
        return self._c * (self.model.mu + a) / self.q(a)

    def xi_k(self, a, k: int):
        return self.xi(a) ** k

    def dd(self, a, c, k: int = 1):
        """Divided difference (xi^k(a) - xi^k(c)) / (a - c), exact also at a = c."""
        qa, qc = self.q(a), self.q(c)
        ddq = self.model.sigma2 * (a + c) + self._q1
        d1 = self._c * (qc - (self.model.mu + c) * ddq) / (qa * qc)
        if k == 1:
            return d1
        xa, xc = self._c * (self.model.mu + a) / qa, self._c * (self.model.mu + c) / qc
        s = 0
        for j in range(k):
            s = s + xa ** j * xc ** (k - 1 - j)
        return d1 * s

    def taylor(self, a0, order: int, k: int = 1):
        """Coefficients ``c_n = (d/da)^n xi^k (a0) / n!`` for n = 0..order.

        Leibniz recursion on ``xi^k (theta q)^k = (2 b (mu + a))^k``, expanded
        around ``a0``: plain power-series division.
        """
        m = self.model
        dtype = complex if np.iscomplexobj(a0) else float
        # series in x = a - a0 (ascending powers)
        num = np.array([self._c * (m.mu + a0), self._c], dtype=dtype)
        den = np.array([self.q(a0), 2 * m.sigma2 * a0 + self._q1, m.sigma2], dtype=dtype)
        numk = np.array([1.0], dtype=dtype)
        denk = np.array([1.0], dtype=dtype)
        for _ in range(k):
            numk = np.convolve(numk, num)
            denk = np.convolve(denk, den)
        n_len = order + 1
        numk = np.concatenate([numk, np.zeros(max(0, n_len - len(numk)), dtype=dtype)])[:n_len]
        denk = np.concatenate([denk, np.zeros(max(0, n_len - len(denk)), dtype=dtype)])[:n_len]
        out = np.zeros(n_len, dtype=dtype)
        d0 = denk[0]
        for n in range(n_len):
            acc = numk[n]
            for j in range(1, n + 1):
                acc -= out[n - j] * denk[j]
            out[n] = acc / d0
        return out


def xi(model: LevyModel, alpha, beta: float):
    """Wiener-Hopf factor xi(alpha, beta)."""
    if not beta > 0:
        raise ModelError("xi needs beta > 0")
    return WhContext(model, beta).xi(alpha)


def xi_k_deriv(model: LevyModel, k: int, n: int, alpha: float, beta: float,
               eps: float | None = None, k_max: int = K_MAX) -> float:
    """n-th alpha-derivative of xi(alpha, beta)^k.

    The Taylor coefficients come from the Leibniz recursion; with ``eps > 0``
    the result is the average of the recursion evaluated at ``alpha +- eps``.
    ``eps=None`` picks ``1e-6 max(1, |alpha|)``; ``eps=0`` evaluates at alpha.
    """
    if k < 1:
        raise ModelError("k must be >= 1")
    if n < 0 or n > k_max:
        raise ModelError(f"derivative order {n} outside [0, {k_max}]")
    ctx = WhContext(model, beta)
    if eps is None:
        eps = default_eps(alpha)
    fact = math.factorial(n)
    if eps == 0:
        return ctx.taylor(alpha, n, k)[n] * fact
    lo = ctx.taylor(alpha - eps, n, k)[n]
    hi = ctx.taylor(alpha + eps, n, k)[n]
    return 0.5 * (lo + hi) * fact


def delta_nk(model: LevyModel, n: int, k: int, theta: float | None, beta_plus_omega: float) -> float:
    """``(-theta)^n / n! * xi_k^(n)(theta, beta + omega)``.

    The probability that the k-fold running-maximum sum carries exactly n
    marks of an independent Poisson(theta) process.
    """
    if not (0 <= n <= k - 1):
        raise ModelError(f"delta_nk needs 0 <= n <= k-1, got n={n}, k={k}")
    ctx = WhContext(model, beta_plus_omega, theta)
    c = ctx.taylor(ctx.theta, n, k)
    return float((-ctx.theta) ** n * c[n])


def deltas(ctx: WhContext, k: int):
    """All ``delta_{n,k}`` for n = 0..k-1, plus the Taylor coefficients used."""
    c = ctx.taylor(ctx.theta, k - 1, k)
    powers = (-ctx.theta) ** np.arange(k)
    return powers * c, c

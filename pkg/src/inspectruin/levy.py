"""Brownian motion plus compound Poisson net cumulative claim process.

The net claim process is ``Y(t) = -r t + sigma B(t) + sum of Exp(mu) claims``
arriving at rate ``lam``.  Its Laplace exponent

    phi(a) = log E exp(-a Y(1)) = sigma2 a^2 / 2 + r a - lam a / (mu + a)

is rational, which is what makes exact polynomial root finding possible
downstream.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ModelError, NumericalError, PoleError

POLE_TOL = 1e-12


@dataclass(frozen=True)
class LevyModel:
    sigma2: float
    r: float
    lam: float
    mu: float
    # "P" for the original measure, "Q" for the exponentially twisted one.
    measure: str = "P"

    def __post_init__(self):
        for name in ("sigma2", "r", "lam", "mu"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ModelError(f"{name} must be finite, got {v!r}")
        if self.sigma2 <= 0:
            raise ModelError("sigma2 must be > 0 (the sigma2 = 0 limit is not supported)")
        if self.mu <= 0:
            raise ModelError("mu must be > 0")
        if self.lam < 0:
            raise ModelError("lam must be >= 0")
        if self.measure not in ("P", "Q"):
            raise ModelError(f"measure must be 'P' or 'Q', got {self.measure!r}")
        if self.measure == "P":
            if self.r <= 0:
                raise ModelError("premium rate r must be > 0")
            if self.r - self.lam / self.mu <= 0:
                raise ModelError(
                    f"net profit condition violated: r - lam/mu = {self.r - self.lam / self.mu:.6g} <= 0"
                )
            if self._discriminant() < 0:
                raise ModelError("no light-tail root: discriminant is negative")

    # -- Laplace exponent -------------------------------------------------

    def _check_pole(self, alpha):
        if np.any(np.abs(np.asarray(alpha) + self.mu) < POLE_TOL):
            raise PoleError(f"alpha = -mu = {-self.mu} is a pole of phi")

    def phi(self, alpha):
        """Laplace exponent; accepts real or complex scalars and arrays."""
        self._check_pole(alpha)
        return 0.5 * self.sigma2 * alpha * alpha + self.r * alpha - self.lam * alpha / (self.mu + alpha)

    def phi_prime(self, alpha):
        self._check_pole(alpha)
        return self.sigma2 * alpha + self.r - self.lam * self.mu / (self.mu + alpha) ** 2

    def phi_second(self, alpha):
        self._check_pole(alpha)
        return self.sigma2 + 2.0 * self.lam * self.mu / (self.mu + alpha) ** 3

    def level_cubic(self, t):
        """Coefficients (highest first) of ``2 (mu + a) (phi(a) - t)``.

        Its zeros are exactly the solutions of ``phi(a) = t``; ``t`` may be complex.
        """
        s2, r, lam, mu = self.sigma2, self.r, self.lam, self.mu
        return np.array([s2, mu * s2 + 2 * r, 2 * (r * mu - lam) - 2 * t, -2 * t * mu],
                        dtype=complex if np.iscomplexobj(t) else float)

    # -- right inverse ----------------------------------------------------

    def _increasing_from(self):
        """Left end of the branch on which phi increases to +infinity."""
        if self.phi_prime(0.0) >= 0:
            return 0.0
        lo, hi = 0.0, 1.0
        while self.phi_prime(hi) < 0:
            hi *= 2.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.phi_prime(mid) < 0:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-15 * hi:
                break
        return hi

    def psi(self, beta: float) -> float:
        """Right inverse: the largest real solution of ``phi(a) = beta``.

        For a model with positive drift (the twisted measure) this is the root
        on the increasing branch, so ``psi_Q(0) = theta_star``.
        """
        beta = float(beta)
        if beta < 0:
            raise ModelError("psi needs beta >= 0")
        lo = self._increasing_from()
        if lo == 0.0 and beta == 0.0:
            return 0.0
        hi = max(1.0, 2.0 * lo)
        while self.phi(hi) < beta:
            hi *= 2.0
        x = hi
        tol = 1e-12
        for _ in range(200):
            f = self.phi(x) - beta
            if f > 0:
                hi = x
            else:
                lo = x
            step = f / self.phi_prime(x)
            x_new = x - step
            if not (lo < x_new < hi):
                x_new = 0.5 * (lo + hi)
            if abs(x_new - x) <= tol * max(1.0, abs(x_new)) or hi - lo <= 1e-15 * max(1.0, hi):
                x = x_new
                break
            x = x_new
        # final Newton polish; phi is smooth and strictly increasing here
        for _ in range(2):
            d = self.phi_prime(x)
            if d > 0:
                x -= (self.phi(x) - beta) / d
        return x

    # -- Lundberg exponent and twist -------------------------------------

    def _discriminant(self) -> float:
        s2, r, lam, mu = self.sigma2, self.r, self.lam, self.mu
        return (mu * s2 + 2 * r) ** 2 - 8 * s2 * (r * mu - lam)

    def theta_star(self) -> float:
        """Positive solution of ``phi(-theta) = 0`` lying in ``(0, mu)``."""
        if self.measure != "P":
            raise ModelError("theta_star is defined for the original measure only")
        disc = self._discriminant()
        if disc < 0:
            raise ModelError("no light-tail root: discriminant is negative")
        s2, r, lam, mu = self.sigma2, self.r, self.lam, self.mu
        b = mu * s2 + 2 * r
        # smaller root of s2 x^2 - b x + 2 (r mu - lam), written without cancellation
        theta = 4.0 * (r * mu - lam) / (b + math.sqrt(disc))
        if not (0.0 < theta < mu):
            raise ModelError(f"light-tail root {theta} not in (0, mu)")
        if abs(self.phi(-theta)) > 1e-10:
            raise NumericalError(f"phi(-theta_star) = {self.phi(-theta)!r}")
        return theta

    def twist(self) -> LevyModel:
        """The model under the exponentially twisted measure Q.

        Brownian part unchanged, drift ``r - theta sigma2``, claim rate
        ``lam mu / (mu - theta)``, claim sizes Exp(``mu - theta``).
        """
        theta = self.theta_star()
        if theta >= self.mu:
            raise ModelError("invalid twist: theta_star >= mu")
        return LevyModel(
            sigma2=self.sigma2,
            r=self.r - theta * self.sigma2,
            lam=self.lam * self.mu / (self.mu - theta),
            mu=self.mu - theta,
            measure="Q",
        )

    @property
    def drift(self) -> float:
        """E Y(1) = -phi'(0)."""
        return -self.phi_prime(0.0)

    def as_tuple(self):
        return (self.sigma2, self.r, self.lam, self.mu)


BASE_MODEL = LevyModel(sigma2=0.02, r=1.2, lam=2.0, mu=2.0)

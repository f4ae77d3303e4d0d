"""Inter-inspection time laws.

Four phase-type families admit exact transforms; the lognormal is carried for
simulation only.  Every law has a compact text form used by the CLI, e.g.
``exp:1``, ``hyperexp:0.85,0.15;1.7,0.29``, ``erlang:3,3``,
``hypererlang:2,3;0.6,0.4;2.4`` and ``lognormal:1,3``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import integrate, stats

from .errors import ModelError

PROB_TOL = 1e-12


def _check_probs(p):
    p = tuple(float(x) for x in p)
    if not p:
        raise ModelError("empty probability vector")
    if any((not math.isfinite(x)) or x < 0 for x in p):
        raise ModelError(f"probabilities must be finite and >= 0, got {p}")
    if abs(math.fsum(p) - 1.0) > PROB_TOL:
        raise ModelError(f"probabilities must sum to 1, got sum {math.fsum(p)!r}")
    return p


def _check_rate(w, name="rate"):
    w = float(w)
    if not (math.isfinite(w) and w > 0):
        raise ModelError(f"{name} must be finite and > 0, got {w!r}")
    return w


@dataclass(frozen=True)
class Exponential:
    rate: float

    family = "exp"

    def __post_init__(self):
        object.__setattr__(self, "rate", _check_rate(self.rate))

    def mean(self):
        return 1.0 / self.rate

    def variance(self):
        return 1.0 / self.rate ** 2

    def mgf(self, s):
        """E exp(s Omega) for s < rate."""
        return self.rate / (self.rate - s)

    def cdf(self, t):
        return -np.expm1(-self.rate * np.asarray(t, dtype=float))

    def spec(self):
        return f"exp:{self.rate!r}"


@dataclass(frozen=True)
class Hyperexponential:
    p: Tuple[float, ...]
    rates: Tuple[float, ...]

    family = "hyperexp"

    def __post_init__(self):
        p = _check_probs(self.p)
        rates = tuple(_check_rate(w) for w in self.rates)
        if len(p) != len(rates):
            raise ModelError("hyperexp: p and rates differ in length")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "rates", rates)

    def mean(self):
        return math.fsum(pi / wi for pi, wi in zip(self.p, self.rates))

    def variance(self):
        m2 = math.fsum(2 * pi / wi ** 2 for pi, wi in zip(self.p, self.rates))
        return m2 - self.mean() ** 2

    def mgf(self, s):
        return sum(pi * wi / (wi - s) for pi, wi in zip(self.p, self.rates))

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        return sum(pi * -np.expm1(-wi * t) for pi, wi in zip(self.p, self.rates))

    def lumped(self):
        """Equivalent law with distinct rates (ascending) and zero weights dropped."""
        acc = {}
        for pi, wi in zip(self.p, self.rates):
            if pi > 0:
                acc[wi] = acc.get(wi, 0.0) + pi
        rates = sorted(acc)
        return tuple(acc[w] for w in rates), tuple(rates)

    def spec(self):
        return "hyperexp:" + ",".join(map(repr, self.p)) + ";" + ",".join(map(repr, self.rates))


@dataclass(frozen=True)
class Erlang:
    k: int
    rate: float

    family = "erlang"

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ModelError(f"Erlang shape must be a positive integer, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "rate", _check_rate(self.rate))

    def mean(self):
        return self.k / self.rate

    def variance(self):
        return self.k / self.rate ** 2

    def mgf(self, s):
        return (self.rate / (self.rate - s)) ** self.k

    def cdf(self, t):
        return stats.gamma.cdf(t, self.k, scale=1.0 / self.rate)

    def spec(self):
        return f"erlang:{self.k},{self.rate!r}"


@dataclass(frozen=True)
class HyperErlang:
    k: Tuple[int, ...]
    p: Tuple[float, ...]
    rate: float

    family = "hypererlang"

    def __post_init__(self):
        ks = tuple(int(x) for x in self.k)
        if any(kk != x for kk, x in zip(ks, self.k)) or any(kk < 1 for kk in ks):
            raise ModelError(f"hyper-Erlang shapes must be positive integers, got {self.k!r}")
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise ModelError(f"hyper-Erlang shapes must be strictly increasing, got {ks}")
        p = _check_probs(self.p)
        if len(p) != len(ks):
            raise ModelError("hypererlang: k and p differ in length")
        object.__setattr__(self, "k", ks)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "rate", _check_rate(self.rate))

    def mean(self):
        return math.fsum(pi * ki for pi, ki in zip(self.p, self.k)) / self.rate

    def variance(self):
        m2 = math.fsum(pi * ki * (ki + 1) for pi, ki in zip(self.p, self.k)) / self.rate ** 2
        return m2 - self.mean() ** 2

    def mgf(self, s):
        y = self.rate / (self.rate - s)
        return sum(pi * y ** ki for pi, ki in zip(self.p, self.k))

    def cdf(self, t):
        return sum(pi * stats.gamma.cdf(t, ki, scale=1.0 / self.rate) for pi, ki in zip(self.p, self.k))

    def reduced(self):
        """Components with positive weight only."""
        keep = [(ki, pi) for ki, pi in zip(self.k, self.p) if pi > 0]
        return tuple(ki for ki, _ in keep), tuple(pi for _, pi in keep)

    def spec(self):
        return ("hypererlang:" + ",".join(map(str, self.k)) + ";"
                + ",".join(map(repr, self.p)) + ";" + repr(self.rate))


def lognormal_params(mean: float, variance: float):
    """(mu_ln, sigma2_ln) of the lognormal law with the given mean and variance."""
    mean, variance = float(mean), float(variance)
    if not (mean > 0 and variance > 0):
        raise ModelError("lognormal mean and variance must be > 0")
    s2 = math.log1p(variance / mean ** 2)
    return math.log(mean) - 0.5 * s2, s2


@dataclass(frozen=True)
class Lognormal:
    mean_: float
    variance_: float

    family = "lognormal"

    def __post_init__(self):
        lognormal_params(self.mean_, self.variance_)
        object.__setattr__(self, "mean_", float(self.mean_))
        object.__setattr__(self, "variance_", float(self.variance_))

    @property
    def params(self):
        return lognormal_params(self.mean_, self.variance_)

    def mean(self):
        return self.mean_

    def variance(self):
        return self.variance_

    def mgf(self, s):
        """E exp(s Omega); finite only for s <= 0."""
        if s > 0:
            return math.inf
        m, s2 = self.params
        sd = math.sqrt(s2)
        # integrate over the log-scale variable against the normal density
        # the normal weight is below 1e-300 outside |z| < 38
        f = lambda z: math.exp(s * math.exp(m + sd * z) - 0.5 * z * z)
        val, _ = integrate.quad(f, -38.0, 38.0, epsabs=1e-14, epsrel=1e-12, limit=400)
        return val / math.sqrt(2 * math.pi)

    def cdf(self, t):
        m, s2 = self.params
        return stats.lognorm.cdf(t, math.sqrt(s2), scale=math.exp(m))

    def spec(self):
        return f"lognormal:{self.mean_!r},{self.variance_!r}"


InspectionLaw = (Exponential, Hyperexponential, Erlang, HyperErlang, Lognormal)


def _floats(s):
    return [float(x) for x in s.split(",") if x.strip()]


def parse_law(text: str):
    """Parse ``family:params`` into an inspection law."""
    if ":" not in text:
        raise ModelError(f"inspection spec {text!r} lacks 'family:params'")
    fam, rest = text.split(":", 1)
    fam = fam.strip().lower()
    parts = [s.strip() for s in rest.split(";")]
    try:
        if fam in ("exp", "exponential"):
            (w,) = _floats(parts[0])
            return Exponential(w)
        if fam in ("hyperexp", "hyperexponential"):
            return Hyperexponential(tuple(_floats(parts[0])), tuple(_floats(parts[1])))
        if fam == "erlang":
            k, w = _floats(parts[0])
            return Erlang(int(k) if k == int(k) else k, w)
        if fam in ("hypererlang", "hyper-erlang"):
            ks = _floats(parts[0])
            if any(k != int(k) for k in ks):
                raise ModelError(f"non-integer shape in {text!r}")
            (w,) = _floats(parts[2])
            return HyperErlang(tuple(int(k) for k in ks), tuple(_floats(parts[1])), w)
        if fam == "lognormal":
            m, v = _floats(parts[0])
            return Lognormal(m, v)
    except (ValueError, IndexError) as exc:
        if isinstance(exc, ModelError):
            raise
        raise ModelError(f"cannot parse inspection spec {text!r}: {exc}") from None
    raise ModelError(f"unknown inspection family {fam!r}")

"""Two-moment phase-type fits of an inter-inspection law.

CV^2 > 1 gives a two-phase hyperexponential with balanced means
(p1/w1 = p2/w2).  CV^2 <= 1 gives p Erlang(k, w) + (1 - p) Erlang(k + 1, w)
with 1/(k+1) <= CV^2 <= 1/k; at the endpoints one component has zero weight
and is dropped, so the result is a plain Erlang law there.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ModelError
from .laws import Erlang, Exponential, HyperErlang, Hyperexponential


@dataclass(frozen=True)
class PhaseFit:
    target_mean: float
    target_variance: float
    result: object
    branch: str

    @property
    def cv2(self):
        return self.target_variance / self.target_mean ** 2


def _hyperexp(mean, c2):
    p1 = 0.5 * (1.0 + math.sqrt((c2 - 1.0) / (c2 + 1.0)))
    p2 = 1.0 - p1
    return Hyperexponential((p1, p2), (2.0 * p1 / mean, 2.0 * p2 / mean))


def _erlang_mix(mean, c2):
    k = int(math.floor(1.0 / c2))
    kk = k + 1
    # weight on Erlang(k); root of the moment quadratic that lies in [0, 1]
    p = (kk * c2 - math.sqrt(max(kk * (1.0 - k * c2), 0.0))) / (1.0 + c2)
    p = min(max(p, 0.0), 1.0)
    rate = (kk - p) / mean
    if p == 1.0:
        return Erlang(k, rate)
    if p == 0.0:
        return Erlang(kk, rate)
    return HyperErlang((k, kk), (p, 1.0 - p), rate)


def fit_two_moment(mean: float, variance: float) -> PhaseFit:
    """Phase-type law matching the given mean and variance."""
    if not (math.isfinite(mean) and math.isfinite(variance) and mean > 0 and variance > 0):
        raise ModelError("mean and variance must be finite and > 0")
    c2 = variance / mean ** 2
    if c2 == 1.0:
        return PhaseFit(mean, variance, Exponential(1.0 / mean), "exp")
    if c2 > 1.0:
        return PhaseFit(mean, variance, _hyperexp(mean, c2), "hyperexp")
    law = _erlang_mix(mean, c2)
    return PhaseFit(mean, variance, law, "erlang" if isinstance(law, Erlang) else "hypererlang")

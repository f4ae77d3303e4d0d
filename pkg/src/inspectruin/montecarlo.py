"""Exact simulation of the inspected surplus process.

Between inspections the net claim increment is sampled exactly (Brownian part
plus a Gamma-distributed sum of a Poisson number of Exp(mu) claims), so there
is no time discretisation anywhere.

Every run draws from its own Philox stream keyed by ``(seed, run index)``.
Results therefore do not depend on how runs are spread over threads, and
per-run values are summed in run order with compensated summation.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ModelError, NumericalError
from .laws import (Erlang, Exponential, HyperErlang, Hyperexponential, Lognormal,
                   lognormal_params)
from .levy import LevyModel

__all__ = ["ISEstimate", "KilledEstimate", "SimConfig", "crude_bankruptcy", "crude_killed",
           "is_bankruptcy", "is_weights", "simulate",
           "lognormal_params", "run_stream", "sample_increment", "sample_increments",
           "sample_inspection", "sample_killed_maximum", "sample_twisted_increments"]

CRUDE_CAP = 1_000_000
IS_CAP = 100_000_000
MODES = ("is", "crude-killed", "gamma_u")


def run_stream(seed: int, index: int) -> np.random.Philox:
    """Independent bit generator for run ``index`` of a campaign."""
    seed = int(seed)
    if not 0 <= seed < 2 ** 64:
        raise ModelError("seed must be a 64-bit unsigned integer")
    return np.random.Philox(key=seed + (int(index) << 64))


def _threads(requested=None) -> int:
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get("INSPECTRUIN_THREADS")
    if env:
        return max(1, int(env))
    return max(1, min(8, os.cpu_count() or 1))


# -- inspection laws in kernel form ---------------------------------------------------

@dataclass(frozen=True)
class _LawArrays:
    cum_p: np.ndarray
    shape: np.ndarray
    rate: np.ndarray
    lognormal: int = 0
    ln_m: float = 0.0
    ln_s: float = 0.0


def _law_arrays(law) -> _LawArrays:
    if isinstance(law, Exponential):
        comps = [(1.0, 1, law.rate)]
    elif isinstance(law, Hyperexponential):
        comps = [(p, 1, w) for p, w in zip(law.p, law.rates) if p > 0]
    elif isinstance(law, Erlang):
        comps = [(1.0, law.k, law.rate)]
    elif isinstance(law, HyperErlang):
        comps = [(p, k, law.rate) for k, p in zip(law.k, law.p) if p > 0]
    elif isinstance(law, Lognormal):
        m, s2 = law.params
        one = np.ones(1)
        return _LawArrays(one, one, one, 1, m, math.sqrt(s2))
    else:
        raise ModelError(f"unsupported inspection law {law!r}")
    p = np.array([c[0] for c in comps])
    cum = np.cumsum(p)
    cum[-1] = 1.0
    return _LawArrays(cum, np.array([float(c[1]) for c in comps]), np.array([float(c[2]) for c in comps]))


def sample_inspection(law, n: int, rng: np.random.Generator) -> np.ndarray:
    """n independent inter-inspection times (vectorised)."""
    la = _law_arrays(law)
    if la.lognormal:
        return np.exp(la.ln_m + la.ln_s * rng.standard_normal(n))
    if len(la.cum_p) == 1:
        idx = np.zeros(n, dtype=int)
    else:
        idx = np.searchsorted(la.cum_p, rng.random(n), side="right")
        idx = np.minimum(idx, len(la.cum_p) - 1)
    return rng.standard_gamma(la.shape[idx]) / la.rate[idx]


# -- increments ---------------------------------------------------------------------

def sample_increment(model: LevyModel, dt: float, rng: np.random.Generator) -> float:
    """One exact draw of Y(dt)."""
    if not dt > 0:
        raise ModelError("dt must be > 0")
    g = rng.standard_normal()
    n = int(rng.poisson(model.lam * dt))
    z = -model.r * dt + math.sqrt(model.sigma2 * dt) * g
    if n > 0:
        z += rng.standard_gamma(float(n)) / model.mu
    return z


def sample_increments(model: LevyModel, dt, rng: np.random.Generator, n: int | None = None) -> np.ndarray:
    """Vectorised exact draws of Y(dt) for an array of (or a single repeated) dt."""
    dt = np.asarray(dt, dtype=float)
    if n is not None:
        dt = np.broadcast_to(dt, (n,))
    g = rng.standard_normal(dt.shape)
    k = rng.poisson(model.lam * dt)
    claims = np.where(k > 0, rng.standard_gamma(np.maximum(k, 1)) / model.mu, 0.0)
    return -model.r * dt + np.sqrt(model.sigma2 * dt) * g + claims


def sample_twisted_increments(model: LevyModel, law, n: int, rng: np.random.Generator) -> np.ndarray:
    """Inter-inspection increments Z under the twisted measure."""
    q = model.twist()
    return sample_increments(q, sample_inspection(law, n, rng), rng)


def sample_killed_maximum(model: LevyModel, beta: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Exact draws of sup_{s <= T_beta} Y(s), T_beta ~ Exp(beta) independent.

    Walks from jump to jump; on each Brownian-with-drift stretch of length h the
    endpoint X ~ N(-r h, sigma2 h) is drawn first and then the stretch maximum
    from the bridge law, M = (X + sqrt(X^2 - 2 sigma2 h log U)) / 2.
    """
    if not beta > 0:
        raise ModelError("beta must be > 0")
    lam, s2, r, mu = model.lam, model.sigma2, model.r, model.mu
    level = np.zeros(n)
    best = np.zeros(n)
    alive = np.arange(n)
    total = lam + beta
    while alive.size:
        m = alive.size
        h = rng.exponential(1.0 / total, m)
        x = -r * h + np.sqrt(s2 * h) * rng.standard_normal(m)
        u = rng.random(m)
        peak = level[alive] + 0.5 * (x + np.sqrt(x * x - 2 * s2 * h * np.log1p(-u)))
        best[alive] = np.maximum(best[alive], peak)
        level[alive] += x
        killed = rng.random(m) < beta / total
        jump = rng.exponential(1.0 / mu, m)
        survivors = alive[~killed]
        level[survivors] += jump[~killed]
        best[survivors] = np.maximum(best[survivors], level[survivors])
        alive = survivors
    return best


# -- campaigns ---------------------------------------------------------------------

@dataclass(frozen=True)
class SimConfig:
    model: LevyModel
    inspection: object
    u: float = 0.0
    runs: int = 10_000
    seed: int = 0
    mode: str = "is"
    alpha: float | None = None
    beta: float | None = None
    threads: int | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ModelError(f"mode must be one of {MODES}")
        if self.mode == "crude-killed" and not (
                self.alpha is not None and self.alpha > 0 and self.beta is not None and self.beta > 0):
            raise ModelError("crude-killed mode needs alpha > 0 and beta > 0")
        if int(self.runs) != self.runs or self.runs < 2:
            raise ModelError("runs must be an integer >= 2")
        if not (self.u >= 0 and math.isfinite(self.u)):
            raise ModelError("u must be finite and >= 0")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ModelError("seed must be a 64-bit unsigned integer")
        _law_arrays(self.inspection)


@dataclass(frozen=True)
class ISEstimate:
    p_hat: float
    std_err: float
    runs: int
    seed: int
    gamma_u: float
    max_weight: float
    theta_star: float
    u: float
    mean_steps: float


@dataclass(frozen=True)
class KilledEstimate:
    estimate: float
    std_err: float
    runs: int
    seed: int
    capped: int


def _mean_se(values: np.ndarray):
    n = len(values)
    mean = math.fsum(values) / n
    var = math.fsum((values - mean) ** 2) / (n - 1)
    return mean, math.sqrt(var / n)


def _map_runs(task, runs: int, threads: int | None):
    """Evaluate task(i) for every run index, in parallel chunks, in run order."""
    nthreads = min(_threads(threads), runs)
    if nthreads <= 1:
        return [task(i) for i in range(runs)]
    bounds = np.linspace(0, runs, nthreads + 1).astype(int)

    def chunk(j):
        return [task(i) for i in range(bounds[j], bounds[j + 1])]

    with ThreadPoolExecutor(nthreads) as ex:
        parts = list(ex.map(chunk, range(nthreads)))
    return [x for part in parts for x in part]


def is_bankruptcy(config: SimConfig, walk=None) -> ISEstimate:
    """Importance-sampling estimate of p(u | Omega).

    Simulates the twisted walk until it first exceeds u at an inspection and
    averages exp(-theta_star W) over runs, W being the position at crossing.
    """
    model = config.model
    ts = model.theta_star()
    q = model.twist()
    la = _law_arrays(config.inspection)
    walk = walk or kernels.walk
    u = float(config.u)

    def task(i):
        status, w, steps = walk(run_stream(config.seed, i), q.sigma2, q.r, q.lam, q.mu,
                                la.cum_p, la.shape, la.rate, la.lognormal, la.ln_m, la.ln_s,
                                u, math.inf, IS_CAP)
        if status != 1:
            raise NumericalError(f"run {i} did not cross level {u} within {IS_CAP} inspections")
        return w, steps

    out = _map_runs(task, int(config.runs), config.threads)
    pos = np.array([o[0] for o in out])
    steps = np.array([o[1] for o in out])
    weights = np.exp(-ts * pos)
    bound = math.exp(-ts * u)
    if np.any(pos <= u) or np.any(weights > bound):
        raise NumericalError("a weight exceeds the Lundberg bound")
    p_hat, se = _mean_se(weights)
    return ISEstimate(p_hat, se, int(config.runs), int(config.seed), p_hat * math.exp(ts * u),
                      float(weights.max()), ts, u, float(steps.mean()))


def is_weights(config: SimConfig, walk=None) -> np.ndarray:
    """Per-run weights of :func:`is_bankruptcy` (for diagnostics and tests)."""
    model = config.model
    ts = model.theta_star()
    q = model.twist()
    la = _law_arrays(config.inspection)
    walk = walk or kernels.walk

    def task(i):
        return walk(run_stream(config.seed, i), q.sigma2, q.r, q.lam, q.mu, la.cum_p, la.shape,
                    la.rate, la.lognormal, la.ln_m, la.ln_s, float(config.u), math.inf, IS_CAP)[1]

    return np.exp(-ts * np.array(_map_runs(task, int(config.runs), config.threads)))


def crude_killed(config: SimConfig, alpha: float | None = None, beta: float | None = None,
                 walk=None, cap: int = CRUDE_CAP) -> KilledEstimate:
    """Crude estimate of P(bankruptcy before T_beta) with surplus U ~ Exp(alpha).

    This equals alpha * pi(alpha, beta | Omega).  Paths still running after
    ``cap`` inspections count as survivals and are reported.
    """
    alpha = config.alpha if alpha is None else alpha
    beta = config.beta if beta is None else beta
    if alpha is None or beta is None or not (alpha > 0 and beta > 0):
        raise ModelError("alpha and beta must be > 0")
    m = config.model
    la = _law_arrays(config.inspection)
    walk = walk or kernels.walk

    def task(i):
        bg = run_stream(config.seed, i)
        g = np.random.Generator(bg)
        u = g.standard_exponential() / alpha
        t_kill = g.standard_exponential() / beta
        status, _, _ = walk(bg, m.sigma2, m.r, m.lam, m.mu, la.cum_p, la.shape, la.rate,
                            la.lognormal, la.ln_m, la.ln_s, u, t_kill, cap)
        return status

    status = np.array(_map_runs(task, int(config.runs), config.threads))
    hits = (status == 1).astype(float)
    est, se = _mean_se(hits)
    return KilledEstimate(est, se, int(config.runs), int(config.seed), int(np.sum(status == 2)))


def simulate(config: SimConfig, walk=None):
    """Run the campaign selected by ``config.mode``."""
    if config.mode == "crude-killed":
        return crude_killed(config, walk=walk)
    return is_bankruptcy(config, walk=walk)


def crude_bankruptcy(config: SimConfig, horizon_steps: int = 100_000, walk=None) -> KilledEstimate:
    """Crude estimate of p(u | Omega) under the original measure (small u only).

    Paths are followed for at most ``horizon_steps`` inspections.
    """
    m = config.model
    la = _law_arrays(config.inspection)
    walk = walk or kernels.walk

    def task(i):
        return walk(run_stream(config.seed, i), m.sigma2, m.r, m.lam, m.mu, la.cum_p, la.shape,
                    la.rate, la.lognormal, la.ln_m, la.ln_s, float(config.u), math.inf,
                    horizon_steps)[0]

    status = np.array(_map_runs(task, int(config.runs), config.threads))
    est, se = _mean_se((status == 1).astype(float))
    return KilledEstimate(est, se, int(config.runs), int(config.seed), int(np.sum(status == 2)))

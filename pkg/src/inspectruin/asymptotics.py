"""Cramer-Lundberg prefactors gamma[Omega] in p(u | Omega) ~ gamma e^{-theta_star u}.

gamma is ``lim_{a -> 0} a pi_o(a)``, where pi_o is the transform of the
expected discounted overshoot ``E_Q exp(-theta_star R(u))`` under the twisted
measure.  pi_o solves the same kind of equation as the finite-horizon
transforms, with the twisted exponent, no killing and a shift theta_star; see
:mod:`inspectruin.transforms` for the shared blocks.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ModelError, NumericalError
from .laws import Erlang, Exponential, HyperErlang, Hyperexponential, Lognormal
from .levy import LevyModel
from .rootfind import RootSet, reduce_erlang_mixture, roots_hypererlang
from .transforms import ErlangMixture, HyperexpSystem, f_block
from .wiener_hopf import K_MAX, WhContext


@dataclass(frozen=True)
class AsymptoticsResult:
    theta_star: float
    gamma: float
    family: str
    roots: RootSet = None
    z: np.ndarray = field(default_factory=lambda: np.zeros(0))
    condition: float = 1.0
    intermediates: dict = field(default_factory=dict)


def _check_gamma(g, family):
    if not np.isfinite(g) or not (0 < g <= 1 + 1e-12):
        raise NumericalError(f"{family}: prefactor {g!r} outside (0, 1]")
    return float(min(g, 1.0))


def permanent_limit(model: LevyModel) -> float:
    """-phi'(0) / phi_Q'(0): the prefactor under continuous inspection."""
    ts = model.theta_star()
    return -model.phi_prime(0.0) / model.phi_prime(-ts)


# -- exponential ---------------------------------------------------------------

def gamma_exp(model: LevyModel, omega: float) -> AsymptoticsResult:
    if not omega > 0:
        raise ModelError("omega must be > 0")
    ts = model.theta_star()
    pw = model.psi(omega)
    g = permanent_limit(model) * pw / (pw + ts)
    return AsymptoticsResult(ts, _check_gamma(g, "exp"), "exp",
                             intermediates={"psi_omega": pw, "theta": pw + ts})


def picirc_exp(model: LevyModel, alpha, omega: float):
    """Overshoot transform pi_o(alpha | T_omega) for exponential inspection."""
    ts = model.theta_star()
    mq = model.twist()
    ctx = WhContext(mq, omega)
    th = ctx.theta
    f_star = f_block(ctx, ts, ts)
    xt = ctx.xi(th)
    pi_th = (th - ts) / th * f_star / xt
    return ((th - alpha) * f_block(ctx, ts, alpha) - th * pi_th * xt) / (th - alpha - th * ctx.xi(alpha))


# -- hyperexponential -------------------------------------------------------------

def gamma_hyperexp(model: LevyModel, p, omega) -> AsymptoticsResult:
    ts = model.theta_star()
    mq = model.twist()
    sysm = HyperexpSystem(mq, p, omega, 0.0, ts)
    k0 = float(np.real(sysm.numerator(0.0)))
    dphi = mq.phi_prime(0.0)
    denom = -dphi * float(np.sum(sysm.p / sysm.w))
    g = k0 / denom
    # product-form denominator, kept for diagnostics
    w = sysm.w
    big_phi = float(np.prod(w))
    big_phi_p = sum(-dphi * float(np.prod(np.delete(w, i))) for i in range(len(w)))
    dphi_i = []
    for i in range(len(w)):
        rest = np.delete(w, i)
        dphi_i.append(sum(-dphi * float(np.prod(np.delete(rest, j))) for j in range(len(rest))))
    product_denom = big_phi_p - float(np.sum(sysm.p * np.array(dphi_i) * w))
    inter = {"K0": k0, "Phi0": big_phi, "Phi_prime0": big_phi_p, "Phi_i_prime0": dphi_i,
             "product_gamma": big_phi * k0 / product_denom if product_denom else np.nan,
             "theta": sysm.theta}
    return AsymptoticsResult(ts, _check_gamma(g, "hyperexp"), "hyperexp", sysm.roots, sysm.z,
                             sysm.condition, inter)


# -- Erlang mixtures ------------------------------------------------------------------

def _gamma_mixture(model: LevyModel, ks, ps, omega: float, family: str) -> AsymptoticsResult:
    if not omega > 0:
        raise ModelError("omega must be > 0")
    ks, ps = reduce_erlang_mixture(ks, ps)
    ks, ps = [int(k) for k in ks], [float(p) for p in ps]
    if ks[-1] > K_MAX:
        raise ModelError(f"Erlang shape {ks[-1]} exceeds the derivative cap {K_MAX}")
    ts = model.theta_star()
    mq = model.twist()
    ctx = WhContext(mq, omega)
    roots = roots_hypererlang(mq, ks, ps, omega, 0.0)
    mix = ErlangMixture(ctx, ks, ps, omega, ts, ps, roots)
    comps = mix.per_component(0.0)
    num = float(np.real(sum(p * c for p, c in zip(ps, comps))))
    denom = -sum(p * k for p, k in zip(ps, ks)) * model.phi_prime(-ts) / omega
    g = num / denom
    inter = {"numerator": num, "denominator": denom, "theta": ctx.theta,
             "residuals": mix.residuals}
    return AsymptoticsResult(ts, _check_gamma(g, family), family, roots, mix.z, mix.condition, inter)


def gamma_erlang(model: LevyModel, k: int, omega: float) -> AsymptoticsResult:
    if int(k) != k or k < 1:
        raise ModelError("k must be a positive integer")
    return _gamma_mixture(model, [int(k)], [1.0], omega, "erlang")


def gamma_hypererlang(model: LevyModel, k, p, omega: float) -> AsymptoticsResult:
    return _gamma_mixture(model, k, p, omega, "hypererlang")


def gamma(model: LevyModel, law) -> AsymptoticsResult:
    if isinstance(law, Exponential):
        return gamma_exp(model, law.rate)
    if isinstance(law, Hyperexponential):
        return gamma_hyperexp(model, law.p, law.rates)
    if isinstance(law, Erlang):
        return gamma_erlang(model, law.k, law.rate)
    if isinstance(law, HyperErlang):
        return gamma_hypererlang(model, law.k, law.p, law.rate)
    if isinstance(law, Lognormal):
        raise ModelError("no exact prefactor for lognormal inspection; use simulation")
    raise ModelError(f"unsupported inspection law {law!r}")

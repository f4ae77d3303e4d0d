"""Bankruptcy probabilities of a Levy surplus process inspected at random times.

The claim process is Brownian motion with drift plus compound Poisson
exponential claims.  Bankruptcy is only checked at inspection epochs whose
inter-inspection times follow an exponential, hyperexponential, Erlang,
hyper-Erlang or lognormal law.
"""
__version__ = "0.1.0"

from .errors import (InspectRuinError, ModelError, NumericalError, PoleError, RootCountError,
                     RootMultiplicityError, SingularSystemError)
from .levy import BASE_MODEL, LevyModel
from .laws import (Erlang, Exponential, HyperErlang, Hyperexponential, Lognormal,
                   lognormal_params, parse_law)
from .wiener_hopf import delta_nk, xi, xi_k_deriv
from .rootfind import (RootSet, roots_erlang, roots_hyperexp, roots_hypererlang,
                       roots_rooteq_fit)
from .transforms import (TransformEval, pi, pi_erlang, pi_exp, pi_exp_product, pi_hyperexp,
                         pi_hypererlang)
from .asymptotics import (AsymptoticsResult, gamma, gamma_erlang, gamma_exp, gamma_hyperexp,
                          gamma_hypererlang, permanent_limit, picirc_exp)
from .montecarlo import (ISEstimate, KilledEstimate, SimConfig, crude_killed, is_bankruptcy,
                         sample_increment)
from .phasefit import PhaseFit, fit_two_moment
from .kernels import BACKEND

__all__ = [n for n in dir() if not n.startswith("_")]

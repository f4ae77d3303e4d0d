import math
import os
import subprocess
import sys

import pytest

from inspectruin import BASE_MODEL, Erlang, Exponential, HyperErlang, Hyperexponential, Lognormal
from inspectruin import kernels
from inspectruin.montecarlo import SimConfig, _law_arrays, crude_killed, is_bankruptcy, run_stream

needs_compiled = pytest.mark.skipif(kernels.compiled_walk is None, reason="extension not built")

LAWS = [Exponential(1.0), Hyperexponential((0.3, 0.7), (0.5, 2.0)), Erlang(3, 3.0),
        HyperErlang((2, 3), (0.4, 0.6), 2.6), Lognormal(1.0, 2.0)]


@needs_compiled
@pytest.mark.parametrize("law", LAWS, ids=lambda l: l.family)
def test_backends_agree_bit_for_bit(law):
    q = BASE_MODEL.twist()
    la = _law_arrays(law)
    for i in range(50):
        args = (q.sigma2, q.r, q.lam, q.mu, la.cum_p, la.shape, la.rate, la.lognormal, la.ln_m,
                la.ln_s, 10.0, math.inf, 10 ** 6)
        assert kernels.python_walk(run_stream(5, i), *args) == kernels.compiled_walk(run_stream(5, i), *args)


@needs_compiled
def test_estimates_agree_across_backends():
    cfg = SimConfig(BASE_MODEL, Erlang(2, 2.0), 5.0, 200, 3)
    assert is_bankruptcy(cfg, kernels.python_walk) == is_bankruptcy(cfg, kernels.compiled_walk)
    k = SimConfig(BASE_MODEL, Exponential(1.0), 0.0, 200, 3, "crude-killed", 0.4, 0.25)
    assert crude_killed(k, walk=kernels.python_walk) == crude_killed(k, walk=kernels.compiled_walk)


def test_horizon_and_cap_statuses():
    m = BASE_MODEL
    la = _law_arrays(Exponential(1.0))
    args = (m.sigma2, m.r, m.lam, m.mu, la.cum_p, la.shape, la.rate, la.lognormal, la.ln_m, la.ln_s)
    status, _, steps = kernels.walk(run_stream(1, 0), *args, 1e9, math.inf, 5)
    assert (status, steps) == (2, 5)
    status, _, _ = kernels.walk(run_stream(1, 0), *args, 1e9, 1e-12, 10 ** 6)
    assert status == 0


@pytest.mark.parametrize("env,expected", [("python", "python"), ("", None)])
def test_backend_selection(env, expected):
    r = subprocess.run([sys.executable, "-c", "from inspectruin import kernels; print(kernels.BACKEND)"],
                       capture_output=True, text=True, check=True,
                       env={**os.environ, "INSPECTRUIN_BACKEND": env})
    want = expected or ("cython" if kernels.compiled_walk is not None else "python")
    assert r.stdout.strip() == want

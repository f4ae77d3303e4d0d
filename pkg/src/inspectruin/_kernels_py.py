"""Pure-Python twin of the compiled kernel (same draws, same order)."""
import math

import numpy as np

BACKEND = "python"


def walk(bitgen, sigma2, r, lam, mu, cum_p, shape, rate, lognormal, ln_m, ln_s,
         level, horizon, max_steps):
    g = np.random.Generator(bitgen)
    ncomp = len(cum_p)
    cum_p = [float(x) for x in cum_p]
    shape = [float(x) for x in shape]
    rate = [float(x) for x in rate]
    normal, expo, gamma, unif, poisson = (g.standard_normal, g.standard_exponential,
                                          g.standard_gamma, g.random, g.poisson)
    t = 0.0
    s = 0.0
    steps = 0
    status = 2
    while steps < max_steps:
        if lognormal:
            dt = math.exp(ln_m + ln_s * normal())
        else:
            i = 0
            if ncomp > 1:
                u = unif()
                while i < ncomp - 1 and u >= cum_p[i]:
                    i += 1
            if shape[i] == 1.0:
                dt = expo() / rate[i]
            else:
                dt = gamma(shape[i]) / rate[i]
        t += dt
        if t > horizon:
            status = 0
            break
        gn = normal()
        n = int(poisson(lam * dt))
        z = -r * dt + math.sqrt(sigma2 * dt) * gn
        if n > 0:
            z += gamma(float(n)) / mu
        s += z
        steps += 1
        if s > level:
            status = 1
            break
    return status, s, steps

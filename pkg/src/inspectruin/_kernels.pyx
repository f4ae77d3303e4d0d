# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled random-walk kernel.

Draws go through numpy's own C distribution functions on the bit generator
passed in, in the same order as the pure-Python twin in ``_kernels_py``, so
both backends produce identical paths.
"""
from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport sqrt, exp, INFINITY
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport (
    random_standard_normal, random_standard_exponential, random_standard_gamma,
    random_standard_uniform, random_poisson)

BACKEND = "cython"


cdef inline double _omega(bitgen_t *bg, const double[:] cum_p, const double[:] shape,
                          const double[:] rate, int ncomp, int lognormal,
                          double ln_m, double ln_s) noexcept nogil:
    cdef int i = 0
    cdef double u
    if lognormal:
        return exp(ln_m + ln_s * random_standard_normal(bg))
    if ncomp > 1:
        u = random_standard_uniform(bg)
        while i < ncomp - 1 and u >= cum_p[i]:
            i += 1
    if shape[i] == 1.0:
        return random_standard_exponential(bg) / rate[i]
    return random_standard_gamma(bg, shape[i]) / rate[i]


cdef inline double _increment(bitgen_t *bg, double dt, double sigma2, double r,
                              double lam, double mu) noexcept nogil:
    cdef double g = random_standard_normal(bg)
    cdef long n = random_poisson(bg, lam * dt)
    cdef double z = -r * dt + sqrt(sigma2 * dt) * g
    if n > 0:
        z += random_standard_gamma(bg, <double>n) / mu
    return z


def walk(object bitgen, double sigma2, double r, double lam, double mu,
         const double[:] cum_p, const double[:] shape, const double[:] rate,
         int lognormal, double ln_m, double ln_s,
         double level, double horizon, long max_steps):
    """Run the inspected walk until it exceeds ``level`` (status 1), the clock
    passes ``horizon`` (status 0) or ``max_steps`` inspections happen (status 2).

    Returns (status, position, inspections).
    """
    cdef bitgen_t *bg = <bitgen_t *> PyCapsule_GetPointer(bitgen.capsule, "BitGenerator")
    cdef int ncomp = cum_p.shape[0]
    cdef double t = 0.0, s = 0.0, dt
    cdef long steps = 0
    cdef int status = 2
    with bitgen.lock:
        with nogil:
            while steps < max_steps:
                dt = _omega(bg, cum_p, shape, rate, ncomp, lognormal, ln_m, ln_s)
                t += dt
                if t > horizon:
                    status = 0
                    break
                s += _increment(bg, dt, sigma2, r, lam, mu)
                steps += 1
                if s > level:
                    status = 1
                    break
    return status, s, steps

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled chain kernel (hot loop of the uniform-on-ball sampler).

Must stay operation-for-operation identical to ``_chain_py`` so both
backends produce bit-identical chains from the same uniform block.
"""

from libc.math cimport pow, sinh, expm1, log1p, sqrt, fabs

BACKEND_NAME = "cython"

cdef int _EVEN_POW = 0
cdef int _ABS_POW = 1
cdef int _COSH = 2
cdef int _EXP_POW = 3


cdef inline double _eval_sum(double a, long[::1] kinds, double[::1] coefs,
                             double[::1] params, Py_ssize_t nterms) noexcept nogil:
    cdef double tot = 0.0
    cdef double s
    cdef Py_ssize_t k
    cdef long kind
    for k in range(nterms):
        kind = kinds[k]
        if kind == 0 or kind == 1:
            tot += coefs[k] * pow(a, params[k])
        elif kind == 2:
            s = sinh(0.5 * a)
            tot += coefs[k] * (2.0 * s * s)
        else:
            tot += coefs[k] * expm1(pow(a, params[k]))
    return tot


cdef inline double _inverse(double y, long[::1] kinds, double[::1] coefs,
                            double[::1] params, Py_ssize_t nterms) noexcept nogil:
    cdef double hi, lo, mid, d
    cdef int it
    if y <= 0.0:
        return 0.0
    if nterms == 1:
        if kinds[0] == 0 or kinds[0] == 1:
            return pow(y / coefs[0], 1.0 / params[0])
        if kinds[0] == 2:
            d = y / coefs[0]
            return log1p(d + sqrt(d * (d + 2.0)))
        return pow(log1p(y / coefs[0]), 1.0 / params[0])
    hi = 1.0
    for it in range(200):
        if _eval_sum(hi, kinds, coefs, params, nterms) >= y:
            break
        hi *= 2.0
    lo = 0.0
    for it in range(100):
        mid = 0.5 * (lo + hi)
        if _eval_sum(mid, kinds, coefs, params, nterms) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def advance(double[::1] x, double n_radius, long sweeps, double[::1] uniforms,
            long[::1] kinds, double[::1] coefs, double[::1] params):
    """Advance the chain by ``sweeps`` full sweeps in place; consumes
    2 * sweeps * len(x) uniforms (coordinate pick, resampled position)."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t nterms = kinds.shape[0]
    cdef Py_ssize_t j = 0, k, i, sweep, step
    cdef double total, u1, u2, vi, slack, xm, xi
    with nogil:
        for sweep in range(sweeps):
            total = 0.0
            for k in range(n):
                total += _eval_sum(fabs(x[k]), kinds, coefs, params, nterms)
            for step in range(n):
                u1 = uniforms[j]
                j += 1
                i = <Py_ssize_t>(u1 * n)
                if i >= n:
                    i = n - 1
                vi = _eval_sum(fabs(x[i]), kinds, coefs, params, nterms)
                slack = n_radius - (total - vi)
                if slack < 0.0:
                    slack = 0.0
                xm = _inverse(slack, kinds, coefs, params, nterms)
                u2 = uniforms[j]
                j += 1
                xi = (2.0 * u2 - 1.0) * xm
                total = total - vi + _eval_sum(fabs(xi), kinds, coefs, params, nterms)
                x[i] = xi

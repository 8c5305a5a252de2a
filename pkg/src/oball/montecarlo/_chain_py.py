"""Pure-Python chain kernel; mirror of the Cython kernel operation by
operation so both backends produce bit-identical chains from the same
uniform block (both use libm pow/cosh/expm1 through the math module / C).
"""

from __future__ import annotations

import math

BACKEND_NAME = "python"

_EVEN_POW = 0
_ABS_POW = 1
_COSH = 2
_EXP_POW = 3


def _eval_sum(a, kinds, coefs, params) -> float:
    tot = 0.0
    for k in range(len(kinds)):
        kind = kinds[k]
        if kind == _EVEN_POW or kind == _ABS_POW:
            tot += coefs[k] * math.pow(a, params[k])
        elif kind == _COSH:
            s = math.sinh(0.5 * a)
            tot += coefs[k] * (2.0 * s * s)
        else:
            tot += coefs[k] * math.expm1(math.pow(a, params[k]))
    return tot


def _inverse(y, kinds, coefs, params) -> float:
    if y <= 0.0:
        return 0.0
    if len(kinds) == 1:
        kind = kinds[0]
        if kind == _EVEN_POW or kind == _ABS_POW:
            return math.pow(y / coefs[0], 1.0 / params[0])
        if kind == _COSH:
            d = y / coefs[0]
            return math.log1p(d + math.sqrt(d * (d + 2.0)))
        return math.pow(math.log1p(y / coefs[0]), 1.0 / params[0])
    hi = 1.0
    for _ in range(200):
        if _eval_sum(hi, kinds, coefs, params) >= y:
            break
        hi *= 2.0
    lo = 0.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if _eval_sum(mid, kinds, coefs, params) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def advance(x, n_radius, sweeps, uniforms, kinds, coefs, params) -> None:
    """Advance the coordinate chain by ``sweeps`` full sweeps in place.

    ``uniforms`` must hold exactly 2 * sweeps * len(x) variates; each step
    consumes one for the coordinate pick and one for the resampled position.
    The running budget is recomputed exactly at the start of every sweep so
    floating-point drift cannot accumulate.
    """
    n = len(x)
    kinds = list(kinds)
    coefs = list(coefs)
    params = list(params)
    j = 0
    for _ in range(sweeps):
        total = 0.0
        for k in range(n):
            total += _eval_sum(abs(x[k]), kinds, coefs, params)
        for _ in range(n):
            u1 = uniforms[j]
            j += 1
            i = int(u1 * n)
            if i >= n:
                i = n - 1
            vi = _eval_sum(abs(x[i]), kinds, coefs, params)
            slack = n_radius - (total - vi)
            if slack < 0.0:
                slack = 0.0
            xm = _inverse(slack, kinds, coefs, params)
            u2 = uniforms[j]
            j += 1
            xi = (2.0 * u2 - 1.0) * xm
            total = total - vi + _eval_sum(abs(xi), kinds, coefs, params)
            x[i] = xi

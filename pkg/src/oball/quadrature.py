"""Adaptive quadrature over the real line for tilted even integrands.

The integrands of interest look like ``weight(x) * exp(alpha*v(x) + beta*w(x))``
with even v, w.  Everything is reduced to [0, T] with a principled truncation
point: T is found by doubling until the integrand has decayed below
``tail_cutoff_ratio`` times its sampled peak (with a polynomial-weight safety
margin), and a sustained rise instead of decay raises
:class:`NonIntegrableError` - that failure mode doubles as the domain probe
used by the Gibbs layer.

The exponent is evaluated with its sampled maximum subtracted, so strongly
tilted densities neither overflow nor underflow; results carry an
authoritative ``log_value``.  The finite-interval work is delegated to
scipy's adaptive Gauss-Kronrod integrator (an embedded higher/lower-order
rule pair) with the functions' breakpoints inserted as mandatory subdivision
nodes so no panel straddles a kink.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import NonIntegrableError, ToleranceNotMetError
from .orlicz import OrliczFunction

__all__ = ["QuadratureSpec", "QuadResult", "Weight", "integrate_symmetric", "tilted_moment"]

_LOG_RISE_MARGIN = 50.0  # nats above the running peak that flags divergence
_MAX_DOUBLINGS = 500  # T <= 2^500, the overflow-guarded search bound


@dataclass(frozen=True)
class QuadratureSpec:
    """Accuracy/effort contract for one integral."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-300
    max_subdivisions: int = 2000
    tail_cutoff_ratio: float = 1e-16

    def __post_init__(self):
        if not (0.0 < self.rel_tol <= 1e-4):
            raise ValueError("rel_tol must lie in (0, 1e-4]")
        if self.max_subdivisions < 50:
            raise ValueError("max_subdivisions must be at least 50")


@dataclass(frozen=True)
class QuadResult:
    """Value of 2 * integral over [0, T] plus diagnostics.

    ``log_value`` is authoritative when the linear value over/underflows.
    """

    value: float
    est_error: float
    truncation_point: float
    subdivisions_used: int
    log_value: float = math.nan


class Weight(Enum):
    ONE = "one"
    V = "V"
    W = "W"
    V2 = "V^2"
    W2 = "W^2"
    VW = "V*W"


def _scan(ln_f: Callable[[float], float], cutoff_ratio: float) -> tuple[float, float]:
    """Truncation search: (T, peak of ln_f) by doubling from 1.

    Stops at the first doubling point that has decayed ``cutoff_ratio`` below
    the running peak; a climb of more than ``_LOG_RISE_MARGIN`` nats above the
    peak is classified as non-integrable.
    """
    peak = max(float(ln_f(x)) for x in np.linspace(0.0, 1.0, 33))
    cut = math.log(cutoff_ratio)
    t = 1.0
    if float(ln_f(t)) - peak < cut:
        # already decayed at 1: halve to the smallest point past the cutoff,
        # so narrow spikes keep a truncation matched to their scale
        for _ in range(_MAX_DOUBLINGS):
            if t <= 1e-120 or float(ln_f(0.5 * t)) - peak >= cut:
                return t, peak
            t *= 0.5
        return t, peak
    for _ in range(_MAX_DOUBLINGS):
        val = float(ln_f(t))
        if val > peak + _LOG_RISE_MARGIN:
            raise NonIntegrableError(
                f"integrand rises through x = {t:g} ({val - peak:.1f} nats above peak)"
            )
        peak = max(peak, val)
        if val - peak < cut:
            return t, peak
        t *= 2.0
    raise NonIntegrableError(f"integrand failed to decay below cutoff by x = {t:g}")


def _finite_quad(
    f: Callable[[float], float],
    hi: float,
    spec: QuadratureSpec,
    interior_points: Sequence[float],
) -> tuple[float, float, int]:
    pts = sorted({p for p in interior_points if 0.0 < p < hi})
    out = integrate.quad(
        f,
        0.0,
        hi,
        epsabs=spec.abs_tol,
        epsrel=max(spec.rel_tol * 0.25, 5e-14),
        limit=spec.max_subdivisions,
        points=pts or None,
        full_output=True,
    )
    val, err, info = out[0], out[1], out[2]
    return val, err, int(info["last"])


def integrate_symmetric(
    g: Callable[[float], float],
    spec: QuadratureSpec = QuadratureSpec(),
    breakpoints: Sequence[float] = (),
) -> QuadResult:
    """2 * integral of an even, eventually-decaying integrand over [0, inf).

    The caller guarantees integrability up to the decay probe: a persistent
    rise raises :class:`NonIntegrableError`; an exhausted subdivision budget
    raises :class:`ToleranceNotMetError`.
    """

    def ln_g(x: float) -> float:
        v = abs(float(g(x)))
        return math.log(v) if v > 0.0 else -math.inf

    t, _ = _scan(ln_g, spec.tail_cutoff_ratio)
    val, err, used = _finite_quad(lambda x: float(g(x)), t, spec, breakpoints)
    val *= 2.0
    err *= 2.0
    if err > max(spec.abs_tol, spec.rel_tol * abs(val)):
        raise ToleranceNotMetError(
            f"estimated error {err:g} exceeds tolerance for value {val:g}"
        )
    return QuadResult(
        value=val,
        est_error=err,
        truncation_point=t,
        subdivisions_used=used,
        log_value=math.log(val) if val > 0 else -math.inf,
    )


def _weight_fn(v: OrliczFunction, w: OrliczFunction, weight: Weight):
    if weight is Weight.ONE:
        return lambda x: 1.0
    if weight is Weight.V:
        return lambda x: float(v(x))
    if weight is Weight.W:
        return lambda x: float(w(x))
    if weight is Weight.V2:
        return lambda x: float(v(x)) ** 2
    if weight is Weight.W2:
        return lambda x: float(w(x)) ** 2
    return lambda x: float(v(x)) * float(w(x))


def _poly_margin(v: OrliczFunction, w: OrliczFunction, x: float) -> float:
    """Upper bound for ln of any admissible weight at x (for the tail cut)."""
    if x <= 0.0:
        return 0.0
    lv = float(v.log_eval(x))
    lw = float(w.log_eval(x))
    return 2.0 * max(0.0, lv, lw)


def tilted_moment(
    v: OrliczFunction,
    w: OrliczFunction,
    alpha: float,
    beta: float,
    weight: Weight = Weight.ONE,
    spec: QuadratureSpec = QuadratureSpec(),
) -> QuadResult:
    """Unnormalized moment: integral of weight(x) * exp(alpha v(x) + beta w(x)).

    Integrability is decided by the integrator itself; a rising exponent
    raises :class:`NonIntegrableError`, which is exactly the membership probe
    the Gibbs layer relies on.
    """
    return tilted_integral(v, w, alpha, beta, _weight_fn(v, w, weight), spec)


def tilted_integral(
    v: OrliczFunction,
    w: OrliczFunction,
    alpha: float,
    beta: float,
    fn: Callable[[float], float],
    spec: QuadratureSpec = QuadratureSpec(),
) -> QuadResult:
    """Like :func:`tilted_moment` for an arbitrary nonnegative even weight."""

    def ln_core(x: float) -> float:
        return alpha * float(v(x)) + beta * float(w(x))

    def ln_with_margin(x: float) -> float:
        return ln_core(x) + _poly_margin(v, w, x)

    t, _ = _scan(ln_with_margin, spec.tail_cutoff_ratio)

    # peak of the bare exponent on [0, t], to a few nats, for stable exp()
    grid = np.unique(np.concatenate([np.linspace(0.0, t, 257), np.geomspace(min(1e-6, t), t, 65)]))
    vals = alpha * np.asarray(v(grid), dtype=float) + beta * np.asarray(w(grid), dtype=float)
    k = int(np.argmax(vals))
    fine = np.linspace(grid[max(0, k - 1)], grid[min(len(grid) - 1, k + 1)], 65)
    fvals = alpha * np.asarray(v(fine), dtype=float) + beta * np.asarray(w(fine), dtype=float)
    m = float(max(vals[k], fvals.max()))
    x_peak = float(fine[int(np.argmax(fvals))])

    def f(x: float) -> float:
        return float(fn(x)) * math.exp(min(ln_core(x) - m, 700.0))

    pts = list(v.breakpoints) + list(w.breakpoints) + [x_peak]
    val, err, used = _finite_quad(f, t, spec, pts)
    val = max(val, 0.0)
    if err > max(spec.abs_tol, spec.rel_tol * abs(val)):
        raise ToleranceNotMetError(
            f"estimated error {err:g} exceeds tolerance (value {val:g}, exp peak {m:g})"
        )
    log_value = m + math.log(2.0 * val) if val > 0.0 else -math.inf
    lin = math.exp(log_value) if log_value < 709.0 else math.inf
    scale = math.exp(min(m, 709.0))
    return QuadResult(
        value=lin,
        est_error=min(err * 2.0 * scale, math.inf),
        truncation_point=t,
        subdivisions_used=used,
        log_value=log_value,
    )

"""Tilt equation solvers.

Three related problems, in increasing generality:

* ``solve_alpha_star``: the one-parameter tilt with mean_v = R (the typical
  tilt of the ball itself).  The mean is strictly increasing in alpha, so a
  log-scale bracket plus safeguarded Newton (exact derivative: var_v) is
  globally reliable.
* ``solve_tilt``: the two-parameter system mean vector = (R, t).  Damped
  Newton with the exact Jacobian - the covariance matrix, positive definite
  whenever v, w are linearly independent - and a line search that halves the
  step until the residual decreases and the iterate stays inside the
  finite-mass region.  Reachability of t is discovered, not assumed:
  exhausting the iteration or halving budget raises
  :class:`NoSolutionError` carrying the last in-domain iterate.
* ``beta_curve``: the constraint curve beta(alpha) with mean_v pinned at R,
  one monotone 1-D root-find per grid alpha; unreachable grid points are
  recorded as gaps rather than raised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BracketFailureError, DomainError, NoSolutionError
from .gibbs import GibbsSummary, TiltParams, summarize
from .orlicz import Assumption, OrliczFunction, classify_assumptions, inverse_nonneg
from .quadrature import QuadratureSpec

__all__ = [
    "Target",
    "TiltSolution",
    "BetaCurvePoint",
    "solve_alpha_star",
    "critical_m",
    "solve_tilt",
    "beta_curve",
    "t_max",
]

_MAX_NEWTON_ITERATIONS = 60
_MAX_STEP_HALVINGS = 40
_RESIDUAL_REL = 1e-10
_TYPICAL_LEVEL_REL_TOL = 1e-12  # |t - m| below this short-circuits to beta = 0

_SOLVER_SPEC = QuadratureSpec(rel_tol=1e-12)


@dataclass(frozen=True)
class Target:
    """Radius of the constraint ball and the requested statistic level."""

    radius: float
    level: float

    def __post_init__(self):
        if self.radius <= 0.0 or self.level <= 0.0:
            raise ValueError("radius and level must be positive")


@dataclass(frozen=True)
class TiltSolution:
    """Solved tilt with residual diagnostics.

    ``residual`` is the max-norm of (mean_v - R, mean_w - t) at the returned
    point; on success it is at most 1e-10 * max(R, t).
    """

    params: TiltParams
    summary: GibbsSummary
    residual: float
    iterations: int


def _summary_or_none(v, w, alpha, beta, spec):
    try:
        return summarize(v, w, TiltParams(alpha, beta), spec)
    except DomainError:
        return None


def solve_alpha_star(
    v: OrliczFunction,
    radius: float,
    spec: QuadratureSpec = _SOLVER_SPEC,
    w: OrliczFunction | None = None,
) -> float:
    """The negative tilt alpha* with mean of v equal to ``radius``.

    Bracketing over alpha in [-1e12, -1e-12] (log-scaled bisection) followed
    by Newton steps using the exact derivative var_v.  Raises
    :class:`BracketFailureError` when the mean cannot straddle the radius in
    that window, which signals a degenerate v.
    """
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    w_probe = w if w is not None else v

    def mean_v(alpha: float) -> float | None:
        s = _summary_or_none(v, w_probe, alpha, 0.0, spec)
        return None if s is None else s.mean_v

    lo_u, hi_u = math.log(1e-12), math.log(1e12)  # u = log(-alpha)
    m_lo = mean_v(-math.exp(lo_u))
    m_hi = mean_v(-math.exp(hi_u))
    if m_lo is None or m_hi is None or not (m_hi < radius < m_lo):
        raise BracketFailureError(
            f"mean of {v.label!r} cannot straddle {radius:g} for alpha in [-1e12, -1e-12]"
        )
    for _ in range(60):
        mid = 0.5 * (lo_u + hi_u)
        m_mid = mean_v(-math.exp(mid))
        if m_mid is None or m_mid < radius:
            hi_u = mid
        else:
            lo_u = mid
    alpha = -math.exp(0.5 * (lo_u + hi_u))
    for _ in range(40):
        s = _summary_or_none(v, w_probe, alpha, 0.0, spec)
        if s is None:
            break
        err = s.mean_v - radius
        if abs(err) <= _RESIDUAL_REL * radius * 0.5:
            return alpha
        step = err / s.var_v
        trial = alpha - step
        if trial >= 0.0:
            trial = alpha * 0.5
        alpha = trial
    return alpha


def critical_m(
    v: OrliczFunction,
    w: OrliczFunction,
    radius: float,
    spec: QuadratureSpec = _SOLVER_SPEC,
) -> float:
    """Typical level of w under the one-parameter ball tilt (mean_w at
    (alpha*, 0)); raises :class:`DomainError` if w is not integrable there."""
    alpha_star = solve_alpha_star(v, radius, spec, w=w)
    return summarize(v, w, TiltParams(alpha_star, 0.0), spec).mean_w


def solve_tilt(
    v: OrliczFunction,
    w: OrliczFunction,
    target: Target,
    spec: QuadratureSpec = _SOLVER_SPEC,
) -> TiltSolution:
    """Solve mean vector = (radius, level) by damped Newton from (alpha*, 0).

    At level = m (within 1e-12 relative) the one-parameter solution with
    beta = 0 exactly is returned.  The branch sign pattern (beta > 0 above m,
    beta < 0 below) emerges from the monotonicity of the mean map; it is
    asserted by tests, not forced here.
    """
    radius, level = target.radius, target.level
    alpha_star = solve_alpha_star(v, radius, spec, w=w)
    star = summarize(v, w, TiltParams(alpha_star, 0.0), spec)
    m = star.mean_w
    if abs(level - m) <= _TYPICAL_LEVEL_REL_TOL * max(1.0, abs(m)):
        res = max(abs(star.mean_v - radius), abs(star.mean_w - level))
        return TiltSolution(TiltParams(alpha_star, 0.0), star, res, 0)

    scale = max(radius, level)
    alpha, beta, summ = alpha_star, 0.0, star
    resid = max(abs(summ.mean_v - radius), abs(summ.mean_w - level))
    for iteration in range(1, _MAX_NEWTON_ITERATIONS + 1):
        f_vec = np.array([summ.mean_v - radius, summ.mean_w - level])
        norm = float(np.linalg.norm(f_vec))
        step = np.linalg.solve(summ.cov, f_vec)
        lam = 1.0
        moved = False
        for _ in range(_MAX_STEP_HALVINGS):
            cand_a = alpha - lam * float(step[0])
            cand_b = beta - lam * float(step[1])
            cand = _summary_or_none(v, w, cand_a, cand_b, spec)
            if cand is not None:
                cand_f = np.array([cand.mean_v - radius, cand.mean_w - level])
                if float(np.linalg.norm(cand_f)) < norm:
                    alpha, beta, summ = cand_a, cand_b, cand
                    moved = True
                    break
            lam *= 0.5
        if not moved:
            raise NoSolutionError(
                f"step halvings exhausted at level {level:g} "
                f"(iterates escape the finite-mass region)",
                last_params=TiltParams(alpha, beta),
                last_residual=resid,
            )
        resid = max(abs(summ.mean_v - radius), abs(summ.mean_w - level))
        if resid <= _RESIDUAL_REL * scale:
            return TiltSolution(TiltParams(alpha, beta), summ, resid, iteration)
    raise NoSolutionError(
        f"no convergence to level {level:g} after {_MAX_NEWTON_ITERATIONS} iterations",
        last_params=TiltParams(alpha, beta),
        last_residual=resid,
    )


@dataclass(frozen=True)
class BetaCurvePoint:
    """One point of the constraint curve; ``beta``/``mean_w`` are None when
    the grid alpha admits no solution (a recorded gap, not an error)."""

    alpha: float
    beta: float | None
    mean_w: float | None
    note: str = ""


def beta_curve(
    v: OrliczFunction,
    w: OrliczFunction,
    radius: float,
    alpha_grid,
    spec: QuadratureSpec = _SOLVER_SPEC,
) -> list[BetaCurvePoint]:
    """For each grid alpha < 0, find beta with mean_v = radius.

    mean_v is strictly increasing in beta, so each solve is a monotone 1-D
    root-find; the search expands downward freely and upward only while the
    tilt stays integrable.  Grid points whose supremum of mean_v stays below
    the radius are reported as gaps.
    """
    out: list[BetaCurvePoint] = []
    for alpha in alpha_grid:
        if alpha >= 0.0:
            out.append(BetaCurvePoint(alpha, None, None, "alpha must be negative"))
            continue
        out.append(_beta_for_alpha(v, w, alpha, radius, spec))
    return out


def _beta_for_alpha(v, w, alpha, radius, spec) -> BetaCurvePoint:
    s0 = _summary_or_none(v, w, alpha, 0.0, spec)
    if s0 is None:
        return BetaCurvePoint(alpha, None, None, "tilt not integrable at beta = 0")

    # bracket in beta: mean_v increasing in beta
    lo, hi = 0.0, 0.0
    s_lo = s_hi = s0
    if s0.mean_v < radius:
        # expand upward, stopping at the integrability edge
        step = max(0.25, abs(alpha) * 0.25)
        reached = False
        for _ in range(200):
            cand = hi + step
            s_cand = _summary_or_none(v, w, alpha, cand, spec)
            if s_cand is None:
                step *= 0.5
                if step < 1e-13 * max(1.0, abs(hi)):
                    break
                continue
            hi, s_hi = cand, s_cand
            if s_hi.mean_v >= radius:
                reached = True
                break
        if not reached:
            return BetaCurvePoint(
                alpha, None, None,
                f"supremum of mean_v along beta is {s_hi.mean_v:g} < {radius:g}",
            )
    else:
        step = max(0.25, abs(alpha) * 0.25)
        for _ in range(200):
            lo -= step
            s_lo = _summary_or_none(v, w, alpha, lo, spec)
            if s_lo is not None and s_lo.mean_v <= radius:
                break
            step *= 2.0
        else:
            return BetaCurvePoint(alpha, None, None, "downward bracket failed")

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        s_mid = _summary_or_none(v, w, alpha, mid, spec)
        if s_mid is None or s_mid.mean_v >= radius:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-13 * max(1.0, abs(mid)):
            break
    beta = 0.5 * (lo + hi)
    s = _summary_or_none(v, w, alpha, beta, spec)
    if s is None or abs(s.mean_v - radius) > 1e-8 * radius:
        return BetaCurvePoint(alpha, None, None, "root polish failed")
    return BetaCurvePoint(alpha, beta, s.mean_w)


def t_max(
    v: OrliczFunction,
    w: OrliczFunction,
    radius: float,
) -> tuple[float, str | None]:
    """Admissible-endpoint level w(v^{-1}(radius)).

    Returns (value, warning); the warning is set when the pair is not
    classified as growth-dominated (verdict B), in which case the endpoint is
    still computed but is only an upper landmark, not a guarantee.
    """
    value = float(w(inverse_nonneg(v, radius)))
    verdict = classify_assumptions(v, w)
    warning = None
    if verdict.verdict is not Assumption.B:
        warning = (
            "pair is not growth-dominated (verdict "
            f"{verdict.verdict.value}); endpoint is advisory only"
        )
    return value, warning

"""Gibbs-measure summaries for two-function exponential tilts.

For a tilt point (alpha, beta) the measure has density
``exp(alpha*v(x) + beta*w(x)) / Z`` on the line.  This module computes the
partition function Z, its log, the mean vector of (v(X), w(X)) and its 2x2
covariance - which is simultaneously the Hessian of log Z in (alpha, beta) -
together with a numerical membership probe for the finite-mass region and a
characteristic-function modulus used to check the Cramer condition.

Membership is decided by direct integrability probing rather than by the
analytic growth-comparison condition: the sufficient condition (beta below
|alpha| times the liminf of v/w) is reported in the diagnostic string, but
the probe decides exactly the cases the solvers need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, NonIntegrableError
from .orlicz import OrliczFunction, classify_assumptions
from .quadrature import QuadratureSpec, Weight, tilted_integral, tilted_moment

__all__ = [
    "TiltParams",
    "GibbsSummary",
    "in_domain",
    "summarize",
    "char_modulus",
    "cramer_probe_grid",
    "cramer_probe",
]


@dataclass(frozen=True)
class TiltParams:
    """A tilt point; membership in the finite-mass region is a checked
    property, not a constructor guarantee."""

    alpha: float
    beta: float


@dataclass(frozen=True)
class GibbsSummary:
    """Partition function, log-Laplace value, mean vector and covariance.

    ``cov`` is symmetric 2x2 with rows/columns ordered (v, w); it equals the
    Hessian of the log partition function at the tilt point and is positive
    definite whenever v and w are linearly independent.
    """

    z: float
    phi: float
    mean_v: float
    mean_w: float
    cov: np.ndarray

    @property
    def var_v(self) -> float:
        return float(self.cov[0, 0])

    @property
    def var_w(self) -> float:
        return float(self.cov[1, 1])

    @property
    def cov_vw(self) -> float:
        return float(self.cov[0, 1])

    @property
    def det_cov(self) -> float:
        return self.var_v * self.var_w - self.cov_vw**2


def in_domain(
    v: OrliczFunction,
    w: OrliczFunction,
    params: TiltParams,
    spec: QuadratureSpec = QuadratureSpec(),
) -> tuple[bool, str]:
    """Probe whether the tilt has a finite partition function.

    Returns (ok, diagnostic); the diagnostic also reports whether the
    sufficient growth-comparison condition held, for context.
    """
    try:
        tilted_moment(v, w, params.alpha, params.beta, Weight.ONE, spec)
        ok = True
        note = "partition integral converges"
    except NonIntegrableError as exc:
        ok = False
        note = f"partition integral diverges: {exc}"
    verdict = classify_assumptions(v, w)
    liminf = verdict.liminf_estimate
    sufficient = params.alpha < 0.0 and (
        math.isinf(liminf) or params.beta < abs(params.alpha) * liminf
    )
    cond = (
        f"sufficient condition beta < |alpha|*liminf(v/w) "
        f"{'held' if sufficient else 'did not hold'} (liminf ~ {liminf:g})"
    )
    return ok, f"{note}; {cond}"


def summarize(
    v: OrliczFunction,
    w: OrliczFunction,
    params: TiltParams,
    spec: QuadratureSpec = QuadratureSpec(),
) -> GibbsSummary:
    """Partition function, means and covariance of (v(X), w(X)) at a tilt.

    Covariances come from raw second moments; when the correlation is
    extreme (>0.999) they are recomputed with mean-shifted weights to avoid
    catastrophic cancellation.  Raises :class:`DomainError` if any component
    integral diverges.
    """
    a, b = params.alpha, params.beta
    try:
        l1 = tilted_moment(v, w, a, b, Weight.ONE, spec).log_value
        lv = tilted_moment(v, w, a, b, Weight.V, spec).log_value
        lw = tilted_moment(v, w, a, b, Weight.W, spec).log_value
        lv2 = tilted_moment(v, w, a, b, Weight.V2, spec).log_value
        lw2 = tilted_moment(v, w, a, b, Weight.W2, spec).log_value
        lvw = tilted_moment(v, w, a, b, Weight.VW, spec).log_value
    except NonIntegrableError as exc:
        raise DomainError(f"tilt ({a:g}, {b:g}) outside the finite-mass region") from exc

    mean_v = math.exp(lv - l1)
    mean_w = math.exp(lw - l1)
    s11 = math.exp(lv2 - l1) - mean_v**2
    s22 = math.exp(lw2 - l1) - mean_w**2
    s12 = math.exp(lvw - l1) - mean_v * mean_w

    degenerate = s11 <= 0.0 or s22 <= 0.0
    if degenerate or s12 * s12 > 0.999 * s11 * s22:
        # compensated two-pass: integrate the centered weights directly
        def c11(x):
            return (float(v(x)) - mean_v) ** 2

        def c22(x):
            return (float(w(x)) - mean_w) ** 2

        def cvv(x):
            d = (float(v(x)) - mean_v) * (float(w(x)) - mean_w)
            return d

        s11 = math.exp(tilted_integral(v, w, a, b, c11, spec).log_value - l1)
        s22 = math.exp(tilted_integral(v, w, a, b, c22, spec).log_value - l1)
        # the cross weight changes sign; split into positive and negative parts
        pos = tilted_integral(v, w, a, b, lambda x: max(cvv(x), 0.0), spec).log_value
        neg = tilted_integral(v, w, a, b, lambda x: max(-cvv(x), 0.0), spec).log_value
        s12 = math.exp(pos - l1) - math.exp(neg - l1)

    cov = np.array([[s11, s12], [s12, s22]], dtype=float)
    return GibbsSummary(
        z=math.exp(l1) if l1 < 709.0 else math.inf,
        phi=l1,
        mean_v=mean_v,
        mean_w=mean_w,
        cov=cov,
    )


# ---------------------------------------------------------------------------
# Characteristic-function modulus (Cramer-condition probe)
# ---------------------------------------------------------------------------


def _critical_points(
    v: OrliczFunction, w: OrliczFunction, t: float, s: float, hi: float
) -> list[float]:
    """Zeros of d/dx [t v + s w] on (0, hi); empty when t, s share a sign."""
    if t * s >= 0.0:
        return []
    xs = np.unique(
        np.concatenate([np.geomspace(max(hi * 1e-12, 1e-12), hi, 2049), np.linspace(0.0, hi, 1025)[1:]])
    )
    dv = np.asarray(v.deriv1(xs), dtype=float)
    dw = np.asarray(w.deriv1(xs), dtype=float)
    h1 = t * dv + s * dw
    sign = np.sign(h1)
    idx = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    roots = []
    for i in idx:
        lo_x, hi_x = xs[i], xs[i + 1]
        for _ in range(80):
            mid = 0.5 * (lo_x + hi_x)
            val = t * float(v.deriv1(mid)) + s * float(w.deriv1(mid))
            if val == 0.0:
                break
            if (val > 0) == (h1[i] > 0):
                lo_x = mid
            else:
                hi_x = mid
        roots.append(0.5 * (lo_x + hi_x))
    return roots


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)


def _panel_sums(
    edges: np.ndarray,
    amp_exponent,
    phase,
    block: int = 100_000,
) -> tuple[float, float, float]:
    """Accumulate (integral of A cos h, A sin h, A) over consecutive panels."""
    c_tot = s_tot = n_tot = 0.0
    for start in range(0, len(edges) - 1, block):
        lo = edges[start : min(start + block, len(edges) - 1)]
        hi = edges[start + 1 : min(start + block, len(edges) - 1) + 1]
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        nodes = mid[:, None] + half[:, None] * _GL_NODES[None, :]
        amp = np.exp(amp_exponent(nodes))
        ph = phase(nodes)
        wgt = half[:, None] * _GL_WEIGHTS[None, :]
        c_tot += float(np.sum(wgt * amp * np.cos(ph)))
        s_tot += float(np.sum(wgt * amp * np.sin(ph)))
        n_tot += float(np.sum(wgt * amp))
    return c_tot, s_tot, n_tot


def char_modulus(
    v: OrliczFunction,
    w: OrliczFunction,
    params: TiltParams,
    t: float,
    s: float,
    spec: QuadratureSpec = QuadratureSpec(),
) -> float:
    """|E exp(i(t v(X) + s w(X)))| under the tilted measure, in [0, 1].

    Oscillation is controlled by splitting at the phase's critical points
    (present only for mixed-sign t, s) and then bounding each quadrature
    panel to at most pi of phase advance; amplitude variation is bounded by a
    graded base grid.  Target accuracy is 1e-6 absolute.
    """
    if t == 0.0 and s == 0.0:
        return 1.0
    a, b = params.alpha, params.beta

    def ln_amp(x):
        return a * v(x) + b * w(x)

    def ph(x):
        return t * v(x) + s * w(x)

    try:
        hi, m = _scan_amplitude(v, w, a, b, spec)
    except NonIntegrableError as exc:
        raise DomainError(f"tilt ({a:g}, {b:g}) outside the finite-mass region") from exc

    # truncate the panel range where the amplitude is numerically dead
    # (below e^-32 of peak the remaining contribution is ~1e-13 absolute)
    probe = np.linspace(0.0, hi, 1025)
    ln_probe = a * np.asarray(v(probe), dtype=float) + b * np.asarray(w(probe), dtype=float)
    alive = np.nonzero(ln_probe - m >= -32.0)[0]
    if len(alive) and alive[-1] + 1 < len(probe):
        hi = float(probe[alive[-1] + 1])

    # base edges: graded amplitude grid + segment splits at phase criticals
    base = np.unique(
        np.concatenate(
            [
                np.linspace(0.0, hi, 257),
                np.geomspace(max(hi * 1e-9, 1e-9), hi, 129),
                np.array([p for p in v.breakpoints + w.breakpoints if 0.0 < p < hi]),
                np.array(_critical_points(v, w, t, s, hi)),
            ]
        )
    )
    base = base[(base >= 0.0) & (base <= hi)]
    if base[0] > 0.0:
        base = np.concatenate([[0.0], base])
    if base[-1] < hi:
        base = np.concatenate([base, [hi]])

    # within each base cell, insert enough phase-equidistributed edges to cap
    # the per-panel phase advance at pi (phase is monotone inside a cell)
    edges_parts = []
    ph_base = np.asarray(ph(base), dtype=float)
    for i in range(len(base) - 1):
        lo_x, hi_x = float(base[i]), float(base[i + 1])
        dphi = abs(ph_base[i + 1] - ph_base[i])
        k = int(dphi / math.pi)
        if k >= 1:
            targets = ph_base[i] + (ph_base[i + 1] - ph_base[i]) * (
                np.arange(1, k + 1) / (k + 1)
            )
            # vectorized bisection for ph(x) = target on the monotone cell;
            # edges only bound panel oscillation, so coarse placement is fine
            lo_arr = np.full(k, lo_x)
            hi_arr = np.full(k, hi_x)
            increasing = ph_base[i + 1] > ph_base[i]
            for _ in range(18):
                mid = 0.5 * (lo_arr + hi_arr)
                val = np.asarray(ph(mid), dtype=float)
                go_right = (val < targets) == increasing
                lo_arr = np.where(go_right, mid, lo_arr)
                hi_arr = np.where(go_right, hi_arr, mid)
            edges_parts.append(np.concatenate([[lo_x], 0.5 * (lo_arr + hi_arr)]))
        else:
            edges_parts.append(np.array([lo_x]))
    edges_parts.append(np.array([float(base[-1])]))
    edges = np.concatenate(edges_parts)

    c_tot, s_tot, n_tot = _panel_sums(edges, lambda x: ln_amp(x) - m, ph)
    if n_tot <= 0.0:
        raise DomainError("vanishing normalization in characteristic-function probe")
    return float(math.hypot(c_tot, s_tot) / n_tot)


def _scan_amplitude(
    v: OrliczFunction, w: OrliczFunction, a: float, b: float, spec: QuadratureSpec
) -> tuple[float, float]:
    """Truncation point and exponent peak for the amplitude exp(a v + b w)."""
    from .quadrature import _scan  # same tail rule as the quadrature engine

    def ln_core(x: float) -> float:
        return a * float(v(x)) + b * float(w(x))

    hi, peak = _scan(ln_core, spec.tail_cutoff_ratio)
    return hi, peak


def cramer_probe_grid(
    magnitudes: Sequence[float] = (10.0, 10.0**1.5, 100.0, 10.0**2.5, 1000.0),
) -> list[tuple[float, float]]:
    """The documented (t, s) probe grid: geometric magnitudes along the four
    direction classes (1,0), (0,1), (1,1), (1,-1); sign flips are redundant
    because the modulus is invariant under joint negation."""
    grid = []
    for mag in magnitudes:
        for dt, ds in ((1, 0), (0, 1), (1, 1), (1, -1)):
            grid.append((mag * dt, mag * ds))
    return grid


def cramer_probe(
    v: OrliczFunction,
    w: OrliczFunction,
    params: TiltParams,
    spec: QuadratureSpec = QuadratureSpec(),
    grid: Iterable[tuple[float, float]] | None = None,
) -> float:
    """Max characteristic modulus over the documented probe grid."""
    pts = list(grid) if grid is not None else cramer_probe_grid()
    return max(char_modulus(v, w, params, t, s, spec) for t, s in pts)

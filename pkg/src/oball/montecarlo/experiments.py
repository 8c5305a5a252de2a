"""Law-of-large-numbers, CLT and median experiments on ball samples.

These are the stochastic ends of the cross-validation suite: they consume
hit-and-run points and compare empirical laws against the closed-form
predictions (typical level, limiting normal variance, the one-half limit of
the median split).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.stats import norm

from ..asymptotics import clt_sigma
from ..orlicz import OrliczFunction
from ..quadrature import QuadratureSpec
from ..tilt import critical_m
from .hitandrun import (
    DEFAULT_BURN_IN,
    DEFAULT_THIN,
    chain_statistic_sums,
    chain_statistic_sums_by_stream,
)
from .importance import EstimatorResult
from .rng import ROLE_CHAIN, RngSpec, substream
from ._backend import advance

__all__ = [
    "kolmogorov_distance",
    "two_sample_kolmogorov",
    "clt_experiment",
    "slln_trajectory",
    "corollary_check",
]

_SPEC = QuadratureSpec(rel_tol=1e-12)


def kolmogorov_distance(samples: np.ndarray, cdf) -> float:
    """sup-norm distance between the empirical CDF of ``samples`` and a CDF."""
    s = np.sort(np.asarray(samples, dtype=float))
    n = len(s)
    f = np.asarray(cdf(s), dtype=float)
    grid = np.arange(n, dtype=float)
    return float(max(np.max(f - grid / n), np.max((grid + 1.0) / n - f)))


def two_sample_kolmogorov(a: np.ndarray, b: np.ndarray) -> float:
    """sup-norm distance between two empirical CDFs (0 for identical samples)."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    both = np.concatenate([a, b])
    fa = np.searchsorted(a, both, side="right") / len(a)
    fb = np.searchsorted(b, both, side="right") / len(b)
    return float(np.max(np.abs(fa - fb)))


def clt_experiment(
    v: OrliczFunction,
    w: OrliczFunction,
    radius: float,
    n: int,
    n_points: int,
    rng: RngSpec,
    burn_in: int = DEFAULT_BURN_IN,
    thin: int = DEFAULT_THIN,
    workers: int = 1,
    spec: QuadratureSpec = _SPEC,
) -> float:
    """Kolmogorov distance between the law of the centered, sqrt(n)-scaled
    w-statistic over ball points and its predicted limiting normal."""
    if n < 2:
        raise ValueError("dimension must be at least 2")
    m = critical_m(v, w, radius, spec)
    sigma2 = clt_sigma(v, w, radius, spec)
    sums = chain_statistic_sums(
        v, w, radius, n, n_points, rng, burn_in=burn_in, thin=thin, workers=workers
    )
    scaled = (sums - n * m) / math.sqrt(n)
    return kolmogorov_distance(scaled, lambda x: norm.cdf(x, scale=math.sqrt(sigma2)))


def slln_trajectory(
    v: OrliczFunction,
    w: OrliczFunction,
    radius: float,
    n_grid,
    rng: RngSpec,
    burn_in: int = DEFAULT_BURN_IN,
    thin: int = DEFAULT_THIN,
) -> list[tuple[int, float]]:
    """One ball point per grid dimension; returns (n, (1/n) sum w(coords))
    pairs for inspecting the almost-sure convergence to the typical level."""
    out = []
    kinds, coefs, params = v.packed()
    for idx, n in enumerate(n_grid):
        gen = substream(rng, idx, ROLE_CHAIN)
        x = np.zeros(int(n), dtype=float)
        sweeps = burn_in + thin
        advance(x, n * radius, sweeps, gen.random(2 * sweeps * int(n)), kinds, coefs, params)
        out.append((int(n), float(np.sum(w(x)) / n)))
    return out


def corollary_check(
    v: OrliczFunction,
    w: OrliczFunction,
    radius: float,
    n: int,
    n_points: int,
    rng: RngSpec,
    threshold: float | None = None,
    burn_in: int = DEFAULT_BURN_IN,
    thin: int = DEFAULT_THIN,
    workers: int = 1,
    spec: QuadratureSpec = _SPEC,
) -> EstimatorResult:
    """Fraction of ball points with (1/n) sum w(coords) <= threshold.

    The threshold defaults to the typical level, where the fraction tends
    to one half; the standard error comes from per-stream batch means, which
    absorbs residual chain correlation.
    """
    if n < 1:
        raise ValueError("dimension must be at least 1")
    if threshold is None:
        threshold = critical_m(v, w, radius, spec)
    batches = chain_statistic_sums_by_stream(
        v, w, radius, n, n_points, rng, burn_in=burn_in, thin=thin, workers=workers
    )
    fractions = np.array([float(np.mean(b <= n * threshold)) for b in batches])
    counts = np.array([len(b) for b in batches], dtype=float)
    estimate = float(np.average(fractions, weights=counts))
    if len(fractions) > 1:
        stderr = math.sqrt(
            float(np.average((fractions - estimate) ** 2, weights=counts))
            / (len(fractions) - 1)
        )
    else:
        stderr = math.inf
    return EstimatorResult(
        estimate=estimate,
        stderr=stderr,
        n_samples=n_points,
        log_estimate=math.log(estimate) if estimate > 0 else -math.inf,
        seed=rng,
        hits=int(round(estimate * n_points)),
    )

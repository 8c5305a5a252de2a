"""Stochastic oracles: exact ball sampling, tilted iid sampling,
importance-sampling tail estimators and distributional experiments."""

from ._backend import backend_name
from .experiments import (
    clt_experiment,
    corollary_check,
    kolmogorov_distance,
    slln_trajectory,
    two_sample_kolmogorov,
)
from .gibbs1d import GibbsSampler1D, sample_gibbs_1d
from .hitandrun import BallPoint, sample_ball_hitandrun
from .importance import EstimatorResult, estimate_tail_is
from .rng import RngSpec

__all__ = [
    "backend_name",
    "BallPoint",
    "EstimatorResult",
    "GibbsSampler1D",
    "RngSpec",
    "clt_experiment",
    "corollary_check",
    "estimate_tail_is",
    "kolmogorov_distance",
    "sample_ball_hitandrun",
    "sample_gibbs_1d",
    "slln_trajectory",
    "two_sample_kolmogorov",
]

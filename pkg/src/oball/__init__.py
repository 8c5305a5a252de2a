"""oball: sharp concentration asymptotics for high-dimensional Orlicz balls.

The package evaluates the closed-form deviation, thin-shell, volume and CLT
predictions for the uniform law on balls {x : sum_i V(x_i) <= n R}, and ships
independent Monte Carlo oracles (exact hit-and-run ball sampling, exponential
tilting importance sampling) that cross-validate every formula at desk scale.
"""

from .asymptotics import (
    FormulaPrediction,
    RateEvaluation,
    clt_sigma,
    deviation_formula,
    rate,
    thin_shell_formula,
    volume_asymptotic,
)
from .errors import (
    BracketFailureError,
    BranchError,
    DegenerateError,
    DegenerateEstimateError,
    DomainError,
    ExpressionError,
    NonIntegrableError,
    NoSolutionError,
    NotConvexError,
    OballError,
    ToleranceNotMetError,
)
from .gibbs import (
    GibbsSummary,
    TiltParams,
    char_modulus,
    cramer_probe,
    cramer_probe_grid,
    in_domain,
    summarize,
)
from .orlicz import (
    Assumption,
    AssumptionVerdict,
    OrliczFunction,
    ValidationReport,
    classify_assumptions,
    inverse_nonneg,
    parse_orlicz,
    validate_orlicz,
)
from .quadrature import QuadratureSpec, QuadResult, Weight, integrate_symmetric, tilted_moment
from .tilt import (
    BetaCurvePoint,
    Target,
    TiltSolution,
    beta_curve,
    critical_m,
    solve_alpha_star,
    solve_tilt,
    t_max,
)

__version__ = "0.1.0"

"""Orlicz functions: parsing, exact derivatives, inversion, validation.

An admissible function here is symmetric, vanishes only at the origin, is
strictly increasing on [0, inf), and is twice continuously differentiable
outside a finite list of breakpoints.  Convexity is required unless the
caller opts into generalized mode, which admits concave power atoms
``|x|^p`` with ``p in (0,1)``.

The expression grammar is a sum of closed-form atoms::

    expr  := term ("+" term)*
    term  := [coef "*"] basis
    basis := "x^" <even integer>
           | "|x|^" <positive real>
           | "cosh(x)-1"
           | "exp(|x|^" <positive real> ")-1"
    coef  := positive real

Whitespace is insignificant.  Restricting to this grammar keeps first and
second derivatives exact, which the tilt solvers rely on.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum
import numpy as np

from .errors import ExpressionError, NotConvexError

__all__ = [
    "OrliczFunction",
    "AssumptionVerdict",
    "Assumption",
    "ValidationReport",
    "parse_orlicz",
    "inverse_nonneg",
    "validate_orlicz",
    "classify_assumptions",
]


# ---------------------------------------------------------------------------
# Term atoms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Term:
    kind: str  # "even_pow" | "abs_pow" | "cosh" | "exp_pow"
    coef: float
    param: float  # exponent for the power kinds; unused for cosh

    def eval(self, a):
        """Value at |x| = a >= 0 (array-friendly)."""
        if self.kind == "even_pow" or self.kind == "abs_pow":
            return self.coef * a**self.param
        if self.kind == "cosh":
            # cosh(a) - 1 written cancellation-free
            s = np.sinh(0.5 * a)
            return self.coef * (2.0 * s * s)
        return self.coef * np.expm1(a**self.param)

    def deriv1(self, a):
        p = self.param
        if self.kind == "even_pow" or self.kind == "abs_pow":
            return self.coef * p * a ** (p - 1.0)
        if self.kind == "cosh":
            return self.coef * np.sinh(a)
        return self.coef * p * a ** (p - 1.0) * np.exp(a**p)

    def deriv2(self, a):
        p = self.param
        if self.kind == "even_pow" or self.kind == "abs_pow":
            return self.coef * p * (p - 1.0) * a ** (p - 2.0)
        if self.kind == "cosh":
            return self.coef * np.cosh(a)
        return self.coef * p * np.exp(a**p) * (
            (p - 1.0) * a ** (p - 2.0) + p * a ** (2.0 * p - 2.0)
        )

    def log_eval(self, a):
        """log(term value) at |x| = a > 0, safe against overflow at large a."""
        lc = math.log(self.coef)
        if self.kind == "even_pow" or self.kind == "abs_pow":
            return lc + self.param * np.log(a)
        if self.kind == "cosh":
            # cosh a - 1 = 2 sinh^2(a/2); for large a switch to the
            # overflow-free expansion around e^a / 2
            small = a < 300.0
            return lc + np.where(
                small,
                math.log(2.0) + 2.0 * np.log(np.abs(np.sinh(0.5 * np.minimum(a, 300.0))) + 1e-300),
                a - math.log(2.0) + np.log1p(np.exp(-2.0 * np.maximum(a, 1.0)) - 2.0 * np.exp(-np.maximum(a, 1.0))),
            )
        ap = a**self.param
        # exp(ap) - 1; for large ap the log is just ap
        small = ap < 30.0
        return lc + np.where(
            small,
            np.log(np.maximum(np.expm1(np.minimum(ap, 30.0)), 1e-300)),
            ap + np.log1p(-np.exp(-np.minimum(ap, 700.0))),
        )

    @property
    def is_convex(self) -> bool:
        if self.kind in ("even_pow", "cosh"):
            return True
        if self.kind == "abs_pow":
            return self.param >= 1.0
        # exp(|x|^p)-1 has second derivative ~ p(p-1) x^{p-2} near zero
        return self.param >= 1.0

    @property
    def breakpoints(self) -> tuple[float, ...]:
        # the second derivative of a power-type atom fails to extend
        # continuously through 0 exactly when the exponent is below 2
        if self.kind in ("abs_pow", "exp_pow") and self.param < 2.0:
            return (0.0,)
        return ()

    def canonical(self) -> str:
        if self.kind == "even_pow":
            body = f"x^{int(self.param)}"
        elif self.kind == "abs_pow":
            body = f"|x|^{_fmt(self.param)}"
        elif self.kind == "cosh":
            body = "cosh(x)-1"
        else:
            body = f"exp(|x|^{_fmt(self.param)})-1"
        return body if self.coef == 1.0 else f"{_fmt(self.coef)}*{body}"


def _fmt(v: float) -> str:
    return repr(int(v)) if float(v).is_integer() and abs(v) < 1e15 else repr(v)


# ---------------------------------------------------------------------------
# The function object
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrliczFunction:
    """Symmetric nonnegative sum of grammar atoms, with exact derivatives.

    Instances are immutable and safe to share across threads; every method
    is pure.  ``eval``/``deriv1``/``deriv2`` accept scalars or arrays.
    """

    label: str
    terms: tuple[_Term, ...]
    breakpoints: tuple[float, ...]
    generalized: bool
    convex: bool

    def __call__(self, x):
        a = np.abs(x)
        out = self.terms[0].eval(a)
        for t in self.terms[1:]:
            out = out + t.eval(a)
        return out

    eval = __call__

    def deriv1(self, x):
        """First derivative for x > 0 (odd extension gives x < 0)."""
        a = np.abs(x)
        out = self.terms[0].deriv1(a)
        for t in self.terms[1:]:
            out = out + t.deriv1(a)
        return out

    def deriv2(self, x):
        """Second derivative away from breakpoints."""
        a = np.abs(x)
        out = self.terms[0].deriv2(a)
        for t in self.terms[1:]:
            out = out + t.deriv2(a)
        return out

    def log_eval(self, x):
        """log f(x) for x != 0, stable where f overflows a double."""
        a = np.asarray(np.abs(x), dtype=float)
        logs = np.stack([t.log_eval(a) for t in self.terms])
        m = logs.max(axis=0)
        return m + np.log(np.exp(logs - m).sum(axis=0))

    def inverse(self, y: float, *, abs_tol: float = 1e-12, rel_tol: float = 1e-12) -> float:
        return inverse_nonneg(self, y, abs_tol=abs_tol, rel_tol=rel_tol)

    # -- kernel packing -----------------------------------------------------

    _KIND_CODES = {"even_pow": 0, "abs_pow": 1, "cosh": 2, "exp_pow": 3}

    def packed(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(kinds, coefs, params) arrays for the compiled chain kernel."""
        kinds = np.array([self._KIND_CODES[t.kind] for t in self.terms], dtype=np.int64)
        coefs = np.array([t.coef for t in self.terms], dtype=float)
        params = np.array([t.param for t in self.terms], dtype=float)
        return kinds, coefs, params

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"OrliczFunction({self.label!r})"


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_NUM = re.compile(r"[0-9]+(?:\.[0-9]*)?(?:[eE][+-]?[0-9]+)?|\.[0-9]+(?:[eE][+-]?[0-9]+)?")


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def eof(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def match(self, literal: str) -> bool:
        self.skip_ws()
        if self.text.startswith(literal, self.pos):
            self.pos += len(literal)
            return True
        return False

    def expect(self, literal: str):
        if not self.match(literal):
            raise ExpressionError(f"expected {literal!r}", self.pos)

    def number(self) -> float:
        self.skip_ws()
        m = _NUM.match(self.text, self.pos)
        if not m:
            raise ExpressionError("expected a number", self.pos)
        self.pos = m.end()
        return float(m.group())


def _parse_term(sc: _Scanner) -> _Term:
    sc.skip_ws()
    start = sc.pos
    coef = 1.0
    ch = sc.text[sc.pos] if sc.pos < len(sc.text) else ""
    if ch.isdigit() or ch == ".":
        coef = sc.number()
        sc.expect("*")
        if coef <= 0.0:
            raise ExpressionError("not an Orlicz function: coefficient must be > 0", start)

    if sc.match("cosh(x)-1"):
        return _Term("cosh", coef, 0.0)
    if sc.match("exp(|x|^"):
        p = sc.number()
        sc.expect(")-1")
        if p <= 0.0:
            raise ExpressionError("not an Orlicz function: exponent must be > 0", start)
        return _Term("exp_pow", coef, p)
    if sc.match("|x|^"):
        p = sc.number()
        if p <= 0.0:
            raise ExpressionError("not an Orlicz function: exponent must be > 0", start)
        return _Term("abs_pow", coef, p)
    if sc.match("x^"):
        at = sc.pos
        p = sc.number()
        if p != int(p) or int(p) % 2 != 0:
            raise ExpressionError("x^k requires an even integer k (use |x|^p otherwise)", at)
        if p < 2:
            raise ExpressionError("not an Orlicz function: x^0 does not vanish at 0", at)
        return _Term("even_pow", coef, float(int(p)))
    raise ExpressionError("expected an atom: x^k, |x|^p, cosh(x)-1 or exp(|x|^p)-1", sc.pos)


def parse_orlicz(expr: str, allow_generalized: bool = False) -> OrliczFunction:
    """Parse an expression into an :class:`OrliczFunction`.

    Raises :class:`ExpressionError` with the byte offset on syntax errors,
    and :class:`NotConvexError` when a concave atom appears while
    ``allow_generalized`` is False.
    """
    sc = _Scanner(expr)
    terms = [_parse_term(sc)]
    while not sc.eof():
        sc.expect("+")
        terms.append(_parse_term(sc))

    convex = all(t.is_convex for t in terms)
    if not convex and not allow_generalized:
        bad = next(t for t in terms if not t.is_convex)
        raise NotConvexError(f"not convex: atom {bad.canonical()!r} has exponent < 1")

    bps = sorted({b for t in terms for b in t.breakpoints})
    label = " + ".join(t.canonical() for t in terms)
    return OrliczFunction(
        label=label,
        terms=tuple(terms),
        breakpoints=tuple(bps),
        generalized=not convex,
        convex=convex,
    )


# ---------------------------------------------------------------------------
# Inversion on the nonnegative half line
# ---------------------------------------------------------------------------


def inverse_nonneg(
    f: OrliczFunction, y: float, *, abs_tol: float = 1e-12, rel_tol: float = 1e-12
) -> float:
    """Unique x >= 0 with f(x) = y, by bracket doubling plus bisection.

    Strict monotonicity on [0, inf) guarantees existence and uniqueness;
    y = 0 returns 0 exactly.
    """
    if y < 0:
        raise ValueError(f"inverse requested for negative value {y}")
    if y == 0.0:
        return 0.0
    hi = 1.0
    for _ in range(4200):
        if float(f(hi)) >= y:
            break
        hi *= 2.0
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if float(f(mid)) < y:
            lo = mid
        else:
            hi = mid
        if hi - lo <= max(abs_tol, rel_tol * mid):
            break
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of the admissibility checks; empty ``violations`` means pass."""

    label: str
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_orlicz(
    f: OrliczFunction, grid_max: float = 1e3, grid_points: int = 256
) -> ValidationReport:
    """Check symmetry, f(0)=0, strict monotonicity and (if claimed) convexity.

    Predicates are evaluated on a geometric grid in (0, grid_max]; every
    violated predicate is reported with a witness point.  Returns a failing
    report rather than raising so callers decide severity.
    """
    if grid_max <= 0:
        raise ValueError("grid_max must be positive")
    if grid_points < 16:
        raise ValueError("grid_points must be at least 16")
    bad: list[str] = []
    xs = np.geomspace(1e-4, grid_max, grid_points)

    fx = np.asarray(f(xs), dtype=float)
    fneg = np.asarray(f(-xs), dtype=float)
    if not np.array_equal(fx, fneg):
        i = int(np.nonzero(fx != fneg)[0][0])
        bad.append(f"symmetry: f({xs[i]!r}) != f({-xs[i]!r})")
    if float(f(0.0)) != 0.0:
        bad.append(f"origin: f(0) = {float(f(0.0))!r} != 0")
    if np.any(fx <= 0.0):
        i = int(np.nonzero(fx <= 0.0)[0][0])
        bad.append(f"positivity: f({xs[i]!r}) <= 0")
    with np.errstate(over="ignore"):
        diffs = np.diff(fx)
    if np.any(diffs <= 0.0) and not np.any(np.isinf(fx[:-1])):
        i = int(np.nonzero(diffs <= 0.0)[0][0])
        bad.append(f"monotonicity: f not increasing at x = {xs[i]!r}")
    if not f.generalized:
        mask = ~np.isin(xs, f.breakpoints)
        d2 = np.asarray(f.deriv2(xs[mask]), dtype=float)
        ok = np.isinf(d2) | (d2 >= -1e-12)
        if not np.all(ok):
            i = int(np.nonzero(~ok)[0][0])
            bad.append(f"convexity: f''({xs[mask][i]!r}) < 0")
        # midpoint convexity on consecutive grid pairs
        mid = 0.5 * (xs[:-1] + xs[1:])
        fm = np.asarray(f(mid), dtype=float)
        viol = fm > 0.5 * (fx[:-1] + fx[1:]) * (1.0 + 1e-12) + 1e-300
        viol &= np.isfinite(fx[1:])
        if np.any(viol):
            i = int(np.nonzero(viol)[0][0])
            bad.append(f"convexity: midpoint rule fails on [{xs[i]!r}, {xs[i+1]!r}]")
    return ValidationReport(label=f.label, violations=tuple(bad))


# ---------------------------------------------------------------------------
# Growth-comparison classification
# ---------------------------------------------------------------------------


class Assumption(Enum):
    A_ONLY = "A_only"  # ratio bounded below away from zero
    B = "B"  # ratio diverges (implies A)
    NEITHER = "neither"


@dataclass(frozen=True)
class AssumptionVerdict:
    """Advisory classification of liminf_{x->inf} v(x)/w(x).

    The verdict is numeric and advisory only: solvers detect domain failures
    directly instead of trusting an asymptotic extrapolation.  By convention
    ``liminf_estimate`` is ``inf`` for verdict B and ``0.0`` for NEITHER.
    """

    verdict: Assumption
    liminf_estimate: float
    probe_grid: tuple[float, ...] = field(repr=False, default=())


def classify_assumptions(
    v: OrliczFunction, w: OrliczFunction, x_max: float = 1e5
) -> AssumptionVerdict:
    """Probe r(x) = v(x)/w(x) on a geometric grid up to ``x_max``.

    Verdict B requires r increasing over the top decade with
    r(x_max)/r(x_max/10) > 2 and r(x_max) > 1e6; verdict A_ONLY requires the
    top-decade minimum to exceed 1e-9; otherwise NEITHER.
    """
    if x_max < 1e3:
        raise ValueError("x_max must be at least 1e3")
    xs = np.geomspace(1.0, x_max, 512)
    log_r = np.asarray(v.log_eval(xs) - w.log_eval(xs), dtype=float)
    top = xs >= x_max / 10.0
    log_r_top = log_r[top]
    with np.errstate(over="ignore"):
        liminf = float(np.exp(log_r_top.min()))
        ratio_ok = log_r_top[-1] - log_r[np.searchsorted(xs, x_max / 10.0) - 1] > math.log(2.0)
        increasing = bool(np.all(np.diff(log_r_top) > 0.0))
        big = log_r_top[-1] > math.log(1e6)
    if increasing and ratio_ok and big:
        return AssumptionVerdict(Assumption.B, math.inf, tuple(xs))
    if liminf > 1e-9:
        return AssumptionVerdict(Assumption.A_ONLY, liminf, tuple(xs))
    return AssumptionVerdict(Assumption.NEITHER, 0.0, tuple(xs))

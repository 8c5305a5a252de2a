"""Command-line front end.

Subcommands wrap the library layers one-to-one: ``solve``/``rate`` expose
the tilt solvers, ``predict`` the closed-form asymptotics, ``verify`` the
formula-versus-Monte-Carlo comparisons with a PASS/FAIL verdict at the
3-standard-error criterion, ``sample``/``clt``/``trace-beta``/``volume``
the sampling and reporting utilities.

Output formats: human table (default), JSON (schema_version 1, with the
effective config echoed for provenance), CSV with 17-significant-digit
decimals.  Same argv + same seed produce byte-identical output.

Exit codes: 0 success, 2 validation error, 3 solver found no solution,
4 Monte Carlo verification FAIL.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Sequence

from . import asymptotics, montecarlo, orlicz, tilt
from .errors import NoSolutionError, OballError
from .quadrature import QuadratureSpec

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NO_SOLUTION = 3
EXIT_VERIFY_FAIL = 4

_SCHEMA_VERSION = 1

# defaults applied after merging config-file values under explicit flags
_DEFAULTS = {
    "format": "table",
    "seed": 0,
    "samples": 100_000,
    "streams": 8,
    "workers": max(1, os.cpu_count() or 1),  # sampling parallelism only
    "burn_in": 50,
    "thin": 5,
    "rel_tol": 1e-10,
    "max_subdivisions": 2000,
}


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _read_config(path: str) -> dict:
    """Flat KEY=VALUE file mirroring flag names (dashes or underscores)."""
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected KEY=VALUE")
            key, value = line.split("=", 1)
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _merge_option(args, config: dict, name: str, cast, default):
    """flags override config-file values override built-in defaults."""
    flag_val = getattr(args, name, None)
    if flag_val is not None:
        return flag_val
    if name in config:
        return cast(config[name])
    return default


class _Runtime:
    """Effective per-invocation settings after config merging."""

    def __init__(self, args):
        config = _read_config(args.config) if getattr(args, "config", None) else {}
        self.format = _merge_option(args, config, "format", str, _DEFAULTS["format"])
        self.out = getattr(args, "out", None)
        self.seed = _merge_option(args, config, "seed", int, _DEFAULTS["seed"])
        self.samples = _merge_option(args, config, "samples", int, _DEFAULTS["samples"])
        self.streams = _merge_option(args, config, "streams", int, _DEFAULTS["streams"])
        self.workers = _merge_option(args, config, "workers", int, _DEFAULTS["workers"])
        self.burn_in = _merge_option(args, config, "burn_in", int, _DEFAULTS["burn_in"])
        self.thin = _merge_option(args, config, "thin", int, _DEFAULTS["thin"])
        rel_tol = _merge_option(args, config, "rel_tol", float, _DEFAULTS["rel_tol"])
        max_sub = _merge_option(
            args, config, "max_subdivisions", int, _DEFAULTS["max_subdivisions"]
        )
        self.quad_spec = QuadratureSpec(rel_tol=rel_tol, max_subdivisions=max_sub)
        self.effective = {
            "format": self.format,
            "seed": self.seed,
            "samples": self.samples,
            "streams": self.streams,
            "workers": self.workers,
            "burn_in": self.burn_in,
            "thin": self.thin,
            "rel_tol": rel_tol,
            "max_subdivisions": max_sub,
        }

    def rng(self) -> montecarlo.RngSpec:
        return montecarlo.RngSpec(seed=self.seed, stream_count=self.streams)


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render(command: str, rt: _Runtime, result: dict, rows: tuple[list, list] | None = None):
    """Render ``result`` per the requested format.

    ``rows`` = (header, row_lists) supplies the CSV/tabular body for
    commands whose natural output is a table of rows.
    """
    if rt.format == "json":
        payload = {
            "schema_version": _SCHEMA_VERSION,
            "command": command,
            "effective_config": rt.effective,
            "result": result,
        }
        if rows is not None:
            header, data = rows
            payload["rows"] = {"header": header, "data": data}
        _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", rt.out)
        return
    if rt.format == "csv":
        if rows is not None:
            header, data = rows
            lines = [",".join(header)]
            lines += [",".join(_fmt(c) if isinstance(c, float) else str(c) for c in row) for row in data]
        else:
            lines = ["key,value"]
            lines += [f"{k},{_fmt(v) if isinstance(v, float) else v}" for k, v in result.items()]
        _emit("\n".join(lines) + "\n", rt.out)
        return
    # table
    lines = [f"[{command}]"]
    width = max((len(k) for k in result), default=0)
    for k, v in result.items():
        sval = _fmt(v) if isinstance(v, float) else str(v)
        lines.append(f"  {k:<{width}}  {sval}")
    if rows is not None:
        header, data = rows
        lines.append("  " + " ".join(header))
        for row in data:
            lines.append(
                "  " + " ".join(_fmt(c) if isinstance(c, float) else str(c) for c in row)
            )
    _emit("\n".join(lines) + "\n", rt.out)


def _parse_pair(args, generalized_ok: bool = True):
    v = orlicz.parse_orlicz(args.V, allow_generalized=generalized_ok)
    w = orlicz.parse_orlicz(args.W, allow_generalized=generalized_ok)
    return v, w


# ---------------------------------------------------------------------------
# command handlers
# ---------------------------------------------------------------------------


def _cmd_solve(args, rt: _Runtime) -> int:
    v, w = _parse_pair(args)
    sol = tilt.solve_tilt(v, w, tilt.Target(args.R, args.t), rt.quad_spec)
    s = sol.summary
    _render(
        "solve",
        rt,
        {
            "alpha": sol.params.alpha,
            "beta": sol.params.beta,
            "residual": sol.residual,
            "iterations": sol.iterations,
            "mean_v": s.mean_v,
            "mean_w": s.mean_w,
            "log_partition": s.phi,
            "var_v": s.var_v,
            "cov_vw": s.cov_vw,
            "var_w": s.var_w,
        },
    )
    return EXIT_OK


def _cmd_rate(args, rt: _Runtime) -> int:
    v, w = _parse_pair(args)
    ev = asymptotics.rate(v, w, args.R, args.t, rt.quad_spec)
    _render(
        "rate",
        rt,
        {
            "effective_rate": ev.effective_rate,
            "rate_level": ev.rate_level,
            "rate_typical": ev.rate_typical,
            "prefactor": ev.prefactor,
            "alpha": ev.tilt.params.alpha,
            "beta": ev.tilt.params.beta,
            "alpha_star": ev.alpha_star,
            "typical_level": ev.typical_level,
        },
    )
    return EXIT_OK


def _flatten_components(components: dict, prefix: str = "") -> dict:
    flat = {}
    for k, v in components.items():
        if isinstance(v, dict):
            flat.update(_flatten_components(v, prefix=f"{prefix}{k}."))
        else:
            flat[f"{prefix}{k}"] = v
    return flat


def _cmd_predict(args, rt: _Runtime) -> int:
    if args.kind == "volume":
        v = orlicz.parse_orlicz(args.V, allow_generalized=True)
        pred = asymptotics.volume_asymptotic(v, args.R, args.n, rt.quad_spec)
    else:
        v, w = _parse_pair(args)
        if args.kind == "deviation":
            if args.t is None:
                raise ValueError("predict deviation requires --t")
            pred = asymptotics.deviation_formula(v, w, args.R, args.t, args.n, rt.quad_spec)
        else:
            if args.delta is None:
                raise ValueError("predict thinshell requires --delta")
            pred = asymptotics.thin_shell_formula(
                v, w, args.R, args.delta, args.n, rt.quad_spec
            )
    result = {"n": pred.n, "exponent": pred.exponent, "log_value": pred.log_value,
              "value": pred.value}
    result.update(_flatten_components(pred.components))
    _render(f"predict {args.kind}", rt, result)
    return EXIT_OK


def _two_sided_mc(v, w, radius, delta, n, samples, rng, spec):
    m = tilt.critical_m(v, w, radius, spec)
    up = montecarlo.estimate_tail_is(
        v, w, radius, m + delta, n, samples, rng, side="upper", spec=spec
    )
    dn = montecarlo.estimate_tail_is(
        v, w, radius, m - delta, n, samples, rng, side="lower", spec=spec
    )
    return up, dn


def _cmd_verify(args, rt: _Runtime) -> int:
    v, w = _parse_pair(args)
    rng = rt.rng()
    if args.kind == "deviation":
        if args.t is None:
            raise ValueError("verify deviation requires --t")
        pred = asymptotics.deviation_formula(v, w, args.R, args.t, args.n, rt.quad_spec)
        mc = montecarlo.estimate_tail_is(
            v, w, args.R, args.t, args.n, rt.samples, rng, spec=rt.quad_spec
        )
        gap = abs(pred.value - mc.estimate)
        ok = gap <= 3.0 * mc.stderr
        result = {
            "prediction": pred.value,
            "mc_estimate": mc.estimate,
            "mc_stderr": mc.stderr,
            "gap_in_stderr": gap / mc.stderr if mc.stderr > 0 else math.inf,
            "verdict": "PASS" if ok else "FAIL",
        }
    elif args.kind == "thinshell":
        if args.delta is None:
            raise ValueError("verify thinshell requires --delta")
        pred = asymptotics.thin_shell_formula(
            v, w, args.R, args.delta, args.n, rt.quad_spec
        )
        up, dn = _two_sided_mc(
            v, w, args.R, args.delta, args.n, rt.samples, rng, rt.quad_spec
        )
        mc_total = up.estimate + dn.estimate
        stderr = math.hypot(up.stderr, dn.stderr)
        gap = abs(pred.value - mc_total)
        ok = gap <= 3.0 * stderr
        result = {
            "prediction": pred.value,
            "dominant_side": pred.components["dominant_side"],
            "mc_upper": up.estimate,
            "mc_lower": dn.estimate,
            "mc_total": mc_total,
            "mc_stderr": stderr,
            "gap_in_stderr": gap / stderr if stderr > 0 else math.inf,
            "verdict": "PASS" if ok else "FAIL",
        }
    else:  # corollary
        res = montecarlo.corollary_check(
            v, w, args.R, args.n, rt.samples, rng,
            burn_in=rt.burn_in, thin=rt.thin, workers=rt.workers, spec=rt.quad_spec,
        )
        gap = abs(res.estimate - 0.5)
        ok = gap <= 3.0 * res.stderr
        result = {
            "target": 0.5,
            "mc_estimate": res.estimate,
            "mc_stderr": res.stderr,
            "gap_in_stderr": gap / res.stderr if res.stderr > 0 else math.inf,
            "verdict": "PASS" if ok else "FAIL",
        }
    _render(f"verify {args.kind}", rt, result)
    return EXIT_OK if result["verdict"] == "PASS" else EXIT_VERIFY_FAIL


def _cmd_sample(args, rt: _Runtime) -> int:
    v = orlicz.parse_orlicz(args.V, allow_generalized=True)
    pts = montecarlo.sample_ball_hitandrun(
        v, args.R, args.n,
        burn_in=rt.burn_in, thin=rt.thin, count=args.count,
        rng=rt.rng(), workers=rt.workers,
    )
    header = [f"x{i+1}" for i in range(args.n)] + ["v_budget"]
    data = [list(map(float, p.coords)) + [p.v_budget_used] for p in pts]
    if rt.format == "table":
        rt.format = "csv"  # row data: CSV is the natural rendering
    _render("sample", rt, {"count": len(pts), "n": args.n}, rows=(header, data))
    return EXIT_OK


def _cmd_clt(args, rt: _Runtime) -> int:
    v, w = _parse_pair(args)
    d = montecarlo.clt_experiment(
        v, w, args.R, args.n, args.points, rt.rng(),
        burn_in=rt.burn_in, thin=rt.thin, workers=rt.workers, spec=rt.quad_spec,
    )
    _render("clt", rt, {"n": args.n, "points": args.points, "d_kol": d})
    return EXIT_OK


def _cmd_trace_beta(args, rt: _Runtime) -> int:
    v, w = _parse_pair(args)
    if not (args.alpha_min < args.alpha_max < 0):
        raise ValueError("need alpha_min < alpha_max < 0")
    grid = [
        args.alpha_min + (args.alpha_max - args.alpha_min) * i / (args.steps - 1)
        for i in range(args.steps)
    ]
    curve = tilt.beta_curve(v, w, args.R, grid, rt.quad_spec)
    header = ["alpha", "beta", "mean_w", "note"]
    data = [
        [p.alpha, p.beta if p.beta is not None else math.nan,
         p.mean_w if p.mean_w is not None else math.nan, p.note]
        for p in curve
    ]
    if args.plot:
        _plot_beta_curve(curve, args.plot)
    if rt.format == "table":
        rt.format = "csv"
    _render("trace-beta", rt, {"radius": args.R, "points": len(curve)}, rows=(header, data))
    return EXIT_OK


def _plot_beta_curve(curve, path: str):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "oball"
    xs = [p.alpha for p in curve if p.beta is not None]
    ys = [p.beta for p in curve if p.beta is not None]
    ws = [p.mean_w for p in curve if p.beta is not None]
    fig, ax1 = plt.subplots(figsize=(6.0, 4.0))
    ax1.plot(xs, ys, "-o", markersize=2.5, label="beta(alpha)")
    ax1.set_xlabel("alpha")
    ax1.set_ylabel("beta")
    ax2 = ax1.twinx()
    ax2.plot(xs, ws, "-s", markersize=2.5, color="tab:red", label="mean_w")
    ax2.set_ylabel("mean_w")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _cmd_volume(args, rt: _Runtime) -> int:
    v = orlicz.parse_orlicz(args.V, allow_generalized=True)
    pred = asymptotics.volume_asymptotic(v, args.R, args.n, rt.quad_spec)
    _render(
        "volume",
        rt,
        {
            "n": args.n,
            "log_volume": pred.log_value,
            "volume": pred.value if math.isfinite(pred.value) else math.inf,
            "alpha_star": pred.components["alpha_star"],
        },
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser, mc: bool = False):
    p.add_argument("--format", choices=("table", "json", "csv"), default=None,
                   help="output format (default: table)")
    p.add_argument("--out", default=None, metavar="PATH",
                   help="write output to PATH instead of stdout")
    p.add_argument("--config", default=None, metavar="PATH",
                   help="flat KEY=VALUE config file; flags override its values")
    p.add_argument("--rel-tol", dest="rel_tol", type=float, default=None,
                   help="quadrature relative tolerance (dimensionless, default 1e-10)")
    p.add_argument("--max-subdivisions", dest="max_subdivisions", type=int, default=None,
                   help="quadrature subdivision budget (count, default 2000)")
    if mc:
        p.add_argument("--seed", type=int, default=None,
                       help="RNG seed (64-bit integer, default 0)")
        p.add_argument("--streams", type=int, default=None,
                       help="independent RNG streams (count, default 8)")
        p.add_argument("--workers", type=int, default=None,
                       help="worker threads across streams (count, default: logical cores)")
        p.add_argument("--burn-in", dest="burn_in", type=int, default=None,
                       help="chain burn-in (full sweeps, default 50)")
        p.add_argument("--thin", type=int, default=None,
                       help="chain thinning (full sweeps per kept point, default 5)")


def _add_vw(p, w_required=True):
    p.add_argument("--V", required=True, metavar="EXPR",
                   help="ball function expression, e.g. 'x^2' or 'x^4 + x^2'")
    if w_required:
        p.add_argument("--W", required=True, metavar="EXPR",
                       help="statistic function expression, e.g. 'x^4'")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="oball",
        description="Sharp concentration asymptotics for high-dimensional "
        "Orlicz balls, with Monte Carlo cross-checks.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve the two-parameter tilt for (R, t)")
    _add_vw(p)
    p.add_argument("--R", type=float, required=True, help="ball radius parameter (> 0)")
    p.add_argument("--t", type=float, required=True, help="statistic level (> 0)")
    _add_common(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("rate", help="effective deviation rate at (R, t)")
    _add_vw(p)
    p.add_argument("--R", type=float, required=True, help="ball radius parameter (> 0)")
    p.add_argument("--t", type=float, required=True, help="statistic level (> 0)")
    _add_common(p)
    p.set_defaults(func=_cmd_rate)

    p = sub.add_parser("predict", help="evaluate a closed-form asymptotic prediction")
    p.add_argument("kind", choices=("deviation", "thinshell", "volume"))
    p.add_argument("--V", required=True, metavar="EXPR", help="ball function expression")
    p.add_argument("--W", metavar="EXPR", help="statistic expression (not for volume)")
    p.add_argument("--R", type=float, required=True, help="ball radius parameter (> 0)")
    p.add_argument("--t", type=float, default=None, help="statistic level (deviation)")
    p.add_argument("--delta", type=float, default=None, help="shell half-width (thinshell)")
    p.add_argument("--n", type=int, required=True, help="dimension (count)")
    _add_common(p)
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser(
        "verify", help="formula vs Monte Carlo, PASS/FAIL at 3 standard errors"
    )
    p.add_argument("kind", choices=("deviation", "thinshell", "corollary"))
    _add_vw(p)
    p.add_argument("--R", type=float, required=True, help="ball radius parameter (> 0)")
    p.add_argument("--t", type=float, default=None, help="statistic level (deviation)")
    p.add_argument("--delta", type=float, default=None, help="shell half-width (thinshell)")
    p.add_argument("--n", type=int, required=True, help="dimension (count)")
    p.add_argument("--samples", type=int, default=None,
                   help="Monte Carlo sample budget (count, default 100000)")
    _add_common(p, mc=True)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("sample", help="uniform ball points as CSV rows")
    p.add_argument("--V", required=True, metavar="EXPR", help="ball function expression")
    p.add_argument("--R", type=float, required=True, help="ball radius parameter (> 0)")
    p.add_argument("--n", type=int, required=True, help="dimension (count)")
    p.add_argument("--count", type=int, required=True, help="points to keep (count)")
    _add_common(p, mc=True)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("clt", help="Kolmogorov distance of the scaled statistic")
    _add_vw(p)
    p.add_argument("--R", type=float, required=True, help="ball radius parameter (> 0)")
    p.add_argument("--n", type=int, required=True, help="dimension (count)")
    p.add_argument("--points", type=int, required=True, help="ball points (count)")
    _add_common(p, mc=True)
    p.set_defaults(func=_cmd_clt)

    p = sub.add_parser("trace-beta", help="constraint curve beta(alpha) as CSV")
    _add_vw(p)
    p.add_argument("--R", type=float, required=True, help="ball radius parameter (> 0)")
    p.add_argument("--alpha-min", dest="alpha_min", type=float, required=True,
                   help="left end of the alpha grid (< 0)")
    p.add_argument("--alpha-max", dest="alpha_max", type=float, required=True,
                   help="right end of the alpha grid (< 0)")
    p.add_argument("--steps", type=int, required=True, help="grid points (count >= 2)")
    p.add_argument("--plot", default=None, metavar="FILE.svg",
                   help="write a static SVG line plot of the curve")
    _add_common(p)
    p.set_defaults(func=_cmd_trace_beta)

    p = sub.add_parser("volume", help="log-volume of the n-dimensional ball")
    p.add_argument("--V", required=True, metavar="EXPR", help="ball function expression")
    p.add_argument("--R", type=float, required=True, help="ball radius parameter (> 0)")
    p.add_argument("--n", type=int, required=True, help="dimension (count)")
    _add_common(p)
    p.set_defaults(func=_cmd_volume)

    return ap


def run(argv: Sequence[str]) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help
        return int(exc.code or 0)
    try:
        rt = _Runtime(args)
        return args.func(args, rt)
    except NoSolutionError as exc:
        print(f"oball {args.command}: no solution: {exc}", file=sys.stderr)
        return EXIT_NO_SOLUTION
    except (OballError, ValueError, OSError) as exc:
        print(f"oball {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def main() -> None:
    raise SystemExit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

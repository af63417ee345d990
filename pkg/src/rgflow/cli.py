"""Command-line front end: rgflow run | compare | pade.

Reads a JSON theory configuration, evaluates the running coupling across a
mu**2 grid with the requested methods, and writes machine-readable reports
(CSV with a fixed column order, or JSON).  Exit codes: 0 success, 2 config
or flag validation error, 3 numerical failure (partial output suppressed).

Environment: RGFLOW_KMAX and RGFLOW_TOL override the series truncation
defaults; explicit flags override both.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import warnings
from datetime import datetime, timezone

from . import __version__
from .errors import RgflowError
from .inversion import K_MAX_DEFAULT, TAU_TERM
from .pade import pade_for_loop_order
from .running import (
    METHOD_ODE,
    METHOD_ROOT,
    BetaFunction,
    ScaleSpec,
    available_methods,
    flow_logform,
    lambda_from_reference,
    solve_with_diagnostics,
)

CSV_COLUMNS = ("mu_sq", "method", "x", "residual", "kmax", "branch", "warnings")


class ConfigError(ValueError):
    pass


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    if "beta0" not in raw or "c" not in raw:
        raise ConfigError("config needs 'beta0' and 'c'")
    if "c0" in raw and raw["c0"] != 1:
        raise ConfigError("invariant violated: c0 must equal 1 when present")
    c = raw["c"]
    if not isinstance(c, list) or not all(isinstance(v, (int, float)) for v in c):
        raise ConfigError("'c' must be a list of numbers (c1..cN)")
    has_ref = "reference" in raw
    has_lam = "lambda_sq" in raw
    if has_ref == has_lam:
        raise ConfigError("exactly one of 'reference' and 'lambda_sq' required")
    if has_ref:
        ref = raw["reference"]
        if (not isinstance(ref, dict) or "mu0_sq" not in ref or "x0" not in ref
                or ref["mu0_sq"] <= 0 or ref["x0"] <= 0):
            raise ConfigError("'reference' needs positive mu0_sq and x0")
    else:
        if raw["lambda_sq"] <= 0:
            raise ConfigError("'lambda_sq' must be positive")
    try:
        BetaFunction(float(raw["beta0"]), (1.0, *map(float, c)))
    except ValueError as exc:
        raise ConfigError(str(exc))
    return raw


def config_beta(cfg: dict) -> BetaFunction:
    return BetaFunction(float(cfg["beta0"]), (1.0, *map(float, cfg["c"])))


def config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def make_grid(mu_min: float, mu_max: float, points: int, spacing: str) -> list:
    if mu_min <= 0 or mu_max <= 0 or mu_min >= mu_max:
        raise ConfigError("need 0 < mu-min < mu-max")
    if points < 1:
        raise ConfigError("points must be >= 1")
    if points == 1:
        return [mu_min]
    if spacing == "log":
        lo, hi = math.log(mu_min), math.log(mu_max)
        return [math.exp(lo + (hi - lo) * i / (points - 1)) for i in range(points)]
    return [mu_min + (mu_max - mu_min) * i / (points - 1) for i in range(points)]


def _parse_methods(spec: str, beta: BetaFunction) -> list:
    allc = available_methods(beta)
    if spec == "all":
        return allc
    out = []
    for name in spec.split(","):
        name = name.strip()
        if not name:
            continue
        if name not in allc:
            raise ConfigError(
                f"method {name!r} unknown or unavailable at {beta.loops} loops "
                f"(have: {', '.join(allc)})"
            )
        out.append(name)
    if not out:
        raise ConfigError("empty method list")
    return out


def _resolve_lambda(beta: BetaFunction, cfg: dict, method: str) -> float:
    """Per-method Lambda**2: the operational reference fit, or the shared
    config value when the config pins lambda_sq directly."""
    if "lambda_sq" in cfg:
        return float(cfg["lambda_sq"])
    ref = cfg["reference"]
    mu0, x0 = float(ref["mu0_sq"]), float(ref["x0"])
    if method.startswith("iterative("):
        order = int(method[10:-1])
        return lambda_from_reference(beta, mu0, x0, order, method="iterative")
    if method == METHOD_ODE:
        return float("nan")  # the ODE oracle runs straight off the reference
    if method == METHOD_ROOT:
        return lambda_from_reference(beta, mu0, x0, beta.loops)
    order = {"oneLoop": 1, "twoLoopW": 2, "threeLoopW": 3,
             "fourLoopSeries": 4}.get(method, beta.loops)
    return lambda_from_reference(beta, mu0, x0, order)


def _reference_point(beta: BetaFunction, cfg: dict, grid) -> tuple:
    if "reference" in cfg:
        ref = cfg["reference"]
        return float(ref["mu0_sq"]), float(ref["x0"])
    # lambda-only config: seed the ODE oracle from the full-order closed
    # form at the weak end of the grid
    lam = float(cfg["lambda_sq"])
    mu0 = max(grid)
    from .running import _solve_closed  # local import to keep the CLI thin

    x0 = _solve_closed(beta, ScaleSpec.make(beta, lam, mu0), beta.loops)
    return mu0, x0


def _evaluate_rows(beta, cfg, grid, methods, k_max, tau):
    rows = []
    reference = None
    if METHOD_ODE in methods:
        reference = _reference_point(beta, cfg, grid)
    lambdas = {m: _resolve_lambda(beta, cfg, m) for m in methods}
    for mu_sq in grid:
        for method in methods:
            if method == METHOD_ODE:
                scale = ScaleSpec(float("nan"), mu_sq, float("nan"))
            else:
                scale = ScaleSpec.make(beta, lambdas[method], mu_sq)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                res = solve_with_diagnostics(beta, scale, method,
                                             reference=reference,
                                             k_max=k_max, tau=tau)
            rows.append(res)
    return rows


def _row_dict(res) -> dict:
    d = res.diagnostics
    return {
        "mu_sq": res.mu_sq,
        "method": res.method,
        "x": res.x,
        "residual": d.residual if d.residual is not None else "",
        "kmax": d.kmax if d.kmax is not None else "",
        "branch": d.branch or "",
        "warnings": ";".join(d.warnings),
    }


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _metadata(cfg, args, k_max, tau) -> dict:
    meta = {
        "name": cfg.get("name", ""),
        "config_hash": config_hash(cfg),
        "version": __version__,
        "tolerances": {"k_max": k_max, "tau": tau},
    }
    if not args.reproducible:
        meta["timestamp"] = datetime.now(timezone.utc).isoformat()
    return meta


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    beta = config_beta(cfg)
    grid = make_grid(args.mu_min, args.mu_max, args.points, args.grid)
    methods = _parse_methods(args.methods, beta)
    k_max, tau = args.k_max, args.tol

    rows = _evaluate_rows(beta, cfg, grid, methods, k_max, tau)

    if args.format == "json":
        doc = {
            "metadata": _metadata(cfg, args, k_max, tau),
            "grid": grid,
            "rows": [_row_dict(r) for r in rows],
        }
        text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow(_row_dict(r))
        text = buf.getvalue()
    _emit(text, args.out)
    return 0


def cmd_compare(args) -> int:
    cfg = load_config(args.config)
    beta = config_beta(cfg)
    grid = make_grid(args.mu_min, args.mu_max, args.points, args.grid)
    methods = _parse_methods(args.methods, beta)
    methods = [m for m in methods if m != args.reference]
    if not methods:
        raise ConfigError("empty method list after removing the reference")
    k_max, tau = args.k_max, args.tol_series

    ref_rows = _evaluate_rows(beta, cfg, grid, [args.reference], k_max, tau)
    ref_x = {r.mu_sq: r.x for r in ref_rows}
    per_method = {}
    overall = True
    for method in methods:
        rows = _evaluate_rows(beta, cfg, grid, [method], k_max, tau)
        devs = [abs(r.x - ref_x[r.mu_sq]) / abs(ref_x[r.mu_sq]) for r in rows]
        max_dev = max(devs)
        verdict = "PASS" if max_dev <= args.tol else "FAIL"
        overall = overall and verdict == "PASS"
        per_method[method] = {
            "max_rel_dev": max_dev,
            "mean_rel_dev": sum(devs) / len(devs),
            "tolerance": args.tol,
            "verdict": verdict,
        }

    if args.format == "json":
        doc = {
            "metadata": _metadata(cfg, args, k_max, tau),
            "reference": args.reference,
            "per_method": per_method,
            "verdict": "PASS" if overall else "FAIL",
        }
        text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    else:
        lines = [f"reference: {args.reference}"]
        for m, st in per_method.items():
            lines.append(
                f"{m}: max {st['max_rel_dev']:.3e}  mean {st['mean_rel_dev']:.3e}"
                f"  tol {st['tolerance']:.1e}  {st['verdict']}"
            )
        lines.append(f"verdict: {'PASS' if overall else 'FAIL'}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return 0


def cmd_pade(args) -> int:
    cfg = load_config(args.config)
    beta = config_beta(cfg)
    approx = pade_for_loop_order(beta)
    from .running import _y_integrand
    from .polyalg import RationalFunction, antiderivative_logform

    num_y, den_y, j = _y_integrand(approx)
    info = {
        "order": f"[{approx.order_n}/{approx.order_m}]",
        "num_coeffs": list(approx.num_coeffs),
        "den_coeffs": list(approx.den_coeffs),
    }
    if den_y.degree >= 1 or j:
        form = antiderivative_logform(RationalFunction(num_y, den_y), j)
        roots = []
        weights = []
        for root, w in form.log_terms:
            roots.append([root.real, root.imag] if isinstance(root, complex)
                         else [float(root), 0.0])
            w = complex(w)
            weights.append([w.real, w.imag])
        info["logform_roots"] = roots
        info["logform_weights"] = weights
    if args.format == "json":
        text = json.dumps(info, sort_keys=True, indent=2) + "\n"
    else:
        lines = [f"pade order: {info['order']}",
                 f"numerator:   {info['num_coeffs']}",
                 f"denominator: {info['den_coeffs']}"]
        if "logform_roots" in info:
            lines.append("log-form terms (weight * ln(y + root)):")
            for r, w in zip(info["logform_roots"], info["logform_weights"]):
                lines.append(f"  root {r[0]:+.12g}{r[1]:+.3g}i  "
                             f"weight {w[0]:+.12g}{w[1]:+.3g}i")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return 0


def _env_default(name: str, cast, fallback):
    raw = os.environ.get(name)
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except ValueError:
        raise ConfigError(f"environment {name}={raw!r} is not a {cast.__name__}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rgflow",
        description="running-coupling evaluation via Lambert W, Pade "
                    "reduction and series inversion",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("config", help="theory configuration (JSON)")
        p.add_argument("--mu-min", type=float, default=10.0,
                       help="smallest mu**2 on the grid")
        p.add_argument("--mu-max", type=float, default=1e4,
                       help="largest mu**2 on the grid")
        p.add_argument("--points", type=int, default=16)
        p.add_argument("--grid", choices=("log", "linear"), default="log")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--reproducible", action="store_true",
                       help="suppress the timestamp for byte-stable output")
        p.add_argument("--k-max", type=int,
                       default=_env_default("RGFLOW_KMAX", int, K_MAX_DEFAULT),
                       help="series term budget (flag > RGFLOW_KMAX > default)")

    run_p = sub.add_parser("run", help="evaluate the coupling on a grid")
    common(run_p)
    run_p.add_argument("--methods", default="all",
                       help="comma list or 'all'")
    run_p.add_argument("--tol", type=float,
                       default=_env_default("RGFLOW_TOL", float, TAU_TERM),
                       help="series truncation tolerance "
                            "(flag > RGFLOW_TOL > default)")

    cmp_p = sub.add_parser("compare", help="deviations against an oracle")
    common(cmp_p)
    cmp_p.add_argument("--methods", default="all")
    cmp_p.add_argument("--reference", choices=(METHOD_ODE, METHOD_ROOT),
                       default=METHOD_ODE)
    cmp_p.add_argument("--tol", type=float, default=1e-8,
                       help="pass/fail tolerance on the max relative deviation")
    cmp_p.add_argument("--tol-series", type=float,
                       default=_env_default("RGFLOW_TOL", float, TAU_TERM),
                       help="series truncation tolerance")

    pade_p = sub.add_parser("pade", help="show the loop order's approximant")
    pade_p.add_argument("config")
    pade_p.add_argument("--show", action="store_true",
                        help="accepted for compatibility; output is always shown")
    pade_p.add_argument("--format", choices=("text", "json"), default="text")
    pade_p.add_argument("--out")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags, which matches the validation code
        return int(exc.code or 0)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "compare":
            return cmd_compare(args)
        if args.command == "pade":
            return cmd_pade(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"rgflow: config error: {exc}", file=sys.stderr)
        return 2
    except RgflowError as exc:
        print(f"rgflow: numerical failure: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

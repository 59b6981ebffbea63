"""Command-line front end: solve single instances, sweep grids, verify claims.

Exit codes: 0 success (solve: estimate converged; verify: all applicable
checks pass), 1 invalid flags or parameters, 2 solve finished but the limit
estimate did not converge / verify found failing checks, 3 integration
halted early (positivity loss or step-size underflow).

Environment: YDECAY_LOG in {quiet, info, debug} controls stderr logging;
YDECAY_BACKEND in {auto, compiled, python} pins the stepping kernel.
Numeric output uses '.' decimals and 17 significant digits.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys

import numpy as np

from . import asymptotics, geometry, model, solver, sweep
from .exceptions import (
    GridFileError,
    LadderError,
    ParameterError,
    PositivityLossError,
    StepSizeUnderflowError,
    YdecayError,
)

log = logging.getLogger("ydecay")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_CONVERGED = 2
EXIT_HALTED = 3

_CURVE_COLUMNS = ("r", "v", "vm_prime", "w", "logslope")


class _CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad flags; the interface contract wants 1.
    def error(self, message):
        raise _CliError(message)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _setup_logging():
    level = {"quiet": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}.get(
        os.environ.get("YDECAY_LOG", "quiet"), logging.WARNING
    )
    logging.basicConfig(stream=sys.stderr, level=level, format="%(name)s %(levelname)s %(message)s")
    log.setLevel(level)


def _add_instance_flags(p: _Parser):
    p.add_argument("--n", type=int, help="space dimension (integer >= 3)")
    p.add_argument("--m", type=float, help="diffusion exponent, 0 < m < (n-2)/n")
    p.add_argument("--beta", type=float, help="radial scaling coefficient")
    p.add_argument("--rho", type=float, help="shrinking parameter (alpha = (2 beta + rho)/(1-m))")
    p.add_argument("--eta", type=float, help="initial height v(0)")
    p.add_argument("--rmax", type=float, help=f"integration range (default {solver.DEFAULT_R_MAX:g})")
    p.add_argument("--tol", type=float, help=f"local error tolerance (default {solver.DEFAULT_TOL:g})")
    p.add_argument("--r0", type=float, help=f"series launch radius (default {solver.DEFAULT_R0:g})")
    p.add_argument("--seed", type=int, help="seed for randomized spot checks (default 0)")
    p.add_argument("--config", help="key=value file supplying defaults for the flags above")


def build_parser() -> _Parser:
    ap = _Parser(prog="ydecay", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="integrate one instance and write the curve + summary")
    _add_instance_flags(ps)
    ps.add_argument("--out", help="output path (default: stdout)")
    ps.add_argument("--format", choices=("csv", "json"), default="csv")
    ps.add_argument("--any-regime", action="store_true", help="integrate even outside the decay regime")
    ps.add_argument("--ladder-ratio", type=float, default=asymptotics.DEFAULT_LADDER_RATIO)
    ps.add_argument("--ladder-count", type=int, default=asymptotics.DEFAULT_LADDER_COUNT)

    pw = sub.add_parser("sweep", help="classify/solve/verify a parameter grid")
    pw.add_argument("--grid", required=True, help="grid spec file (key = value list per parameter)")
    pw.add_argument("--out", help="output path (default: stdout)")
    pw.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    pw.add_argument("--jobs", type=int, default=1, help="worker pool size (output order is fixed)")
    pw.add_argument("--rmax", type=float)
    pw.add_argument("--tol", type=float)
    pw.add_argument("--r0", type=float)
    pw.add_argument("--seed", type=int)
    pw.add_argument("--timing", action="store_true", help="include wall-clock runtime per cell (non-reproducible)")

    pv = sub.add_parser("verify", help="run the full check table on one instance")
    _add_instance_flags(pv)
    pv.add_argument("--strict", type=float, default=1.0, help="tolerance multiplier (<1 tightens)")
    return ap


def _load_config(path: str) -> dict:
    cfg = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for ln, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ParameterError(f"config line {ln}: expected key=value, got {raw!r}")
                key, _, val = line.partition("=")
                cfg[key.strip().lower()] = val.strip()
    except OSError as exc:
        raise ParameterError(f"cannot read config file {path}: {exc}") from None
    return cfg


def _resolve_instance(args):
    """Merge flags over config defaults; flags win."""
    cfg = _load_config(args.config) if args.config else {}

    def pick(name, cast, default=None):
        val = getattr(args, name, None)
        if val is None and name in cfg:
            try:
                val = cast(cfg[name])
            except ValueError:
                raise ParameterError(f"config value for {name!r} is not numeric: {cfg[name]!r}")
        return default if val is None else val

    missing = [k for k in ("n", "m", "beta", "rho", "eta") if pick(k, float) is None]
    if missing:
        raise ParameterError(f"missing required parameter(s): {', '.join('--' + k for k in missing)}")

    params = model.ProblemParams(
        n=pick("n", int), m=pick("m", float), beta=pick("beta", float),
        rho=pick("rho", float), eta=pick("eta", float),
    )
    opts = {
        "r_max": pick("rmax", float, solver.DEFAULT_R_MAX),
        "tol": pick("tol", float, solver.DEFAULT_TOL),
        "r0": pick("r0", float, solver.DEFAULT_R0),
    }
    seed = pick("seed", int, 0)
    return params, opts, seed


def _node_columns(curve):
    p = curve.params
    inv_m = 1.0 / p.m
    r = curve.r
    v = curve.V**inv_m
    w = r * r * curve.V ** (inv_m - 1.0)
    logslope = r * curve.P / (p.m * curve.V)
    return {"r": r, "v": v, "vm_prime": curve.P, "w": w, "logslope": logslope}


def _solve_summary(params, curve, est):
    w_inf = model.w_infinity(params) if params.rho > 0 else None
    summary = {
        "n": params.n, "m": params.m, "beta": params.beta, "rho": params.rho,
        "eta": params.eta, "alpha": params.alpha,
        "status": curve.status,
        "r_reached": curve.r_last,
        "nodes": len(curve),
        "nfev": curve.diagnostics["nfev"],
        "backend": curve.diagnostics["backend"],
        "tol": curve.tol,
        "w_infinity": w_inf,
        "w_limit": est.w_limit if est else None,
        "deviation": (abs(est.w_limit - w_inf) / w_inf) if (est and w_inf) else None,
        "logslope_limit": est.logslope_limit if est else None,
        "logslope_target": -params.decay_power,
        "converged": est.converged if est else False,
    }
    return summary


def _write_solve_output(out_fh, fmt, summary, cols):
    if fmt == "csv":
        for key, val in summary.items():
            if isinstance(val, float):
                val = _fmt(val)
            out_fh.write(f"# {key} = {val}\n")
        out_fh.write(",".join(_CURVE_COLUMNS) + "\n")
        arrays = [cols[c] for c in _CURVE_COLUMNS]
        for row in zip(*arrays):
            out_fh.write(",".join(_fmt(x) for x in row) + "\n")
    else:
        doc = {"summary": summary, "curve": {c: [float(x) for x in cols[c]] for c in _CURVE_COLUMNS}}
        json.dump(doc, out_fh, indent=1)
        out_fh.write("\n")


def cmd_solve(args) -> int:
    params, opts, _seed = _resolve_instance(args)
    tag = model.classify(params)
    if not tag.theorem_applies and not args.any_regime:
        raise ParameterError(f"{tag.reason} (use --any-regime to integrate anyway)")

    exit_code = EXIT_OK
    est = None
    try:
        curve = solver.integrate(params, allow_any_regime=args.any_regime, **opts)
    except (PositivityLossError, StepSizeUnderflowError) as exc:
        log.warning("integration halted: %s", exc)
        curve = exc.curve
        exit_code = EXIT_HALTED
    if curve is None:
        raise ParameterError("integration produced no usable samples")

    if exit_code == EXIT_OK:
        try:
            est = asymptotics.decay_estimate(curve, args.ladder_ratio, args.ladder_count)
        except LadderError as exc:
            log.warning("limit estimate unavailable: %s", exc)
        if est is None or not est.converged:
            exit_code = EXIT_NOT_CONVERGED

    summary = _solve_summary(params, curve, est)
    cols = _node_columns(curve)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            _write_solve_output(fh, args.format, summary, cols)
    else:
        _write_solve_output(sys.stdout, args.format, summary, cols)
    log.info("solve finished: status=%s exit=%d", curve.status, exit_code)
    return exit_code


def cmd_sweep(args) -> int:
    cells = sweep.parse_grid_file(args.grid)
    records = sweep.run_sweep(
        cells,
        jobs=args.jobs,
        r_max=args.rmax if args.rmax is not None else solver.DEFAULT_R_MAX,
        tol=args.tol if args.tol is not None else solver.DEFAULT_TOL,
        r0=args.r0 if args.r0 is not None else solver.DEFAULT_R0,
        seed=args.seed if args.seed is not None else 0,
        include_runtime=args.timing,
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            sweep.write_records(records, fh, args.format)
    else:
        sweep.write_records(records, sys.stdout, args.format)
    log.info("sweep finished: %d cells, %d solved", len(records), sum(r.solved for r in records))
    return EXIT_OK


# ---------------------------------------------------------------------------


def _verify_rows(params, opts, seed, strict):
    """Build the verification table; yields (check, verdict, detail)."""
    rows = []
    tag = model.classify(params)
    if tag.theorem_applies:
        rows.append(("parameter-regime", "PASS", "decay hypotheses hold"))
    else:
        rows.append(("parameter-regime", "FAIL", tag.reason))

    try:
        curve = solver.integrate(params, allow_any_regime=True, **opts)
    except (PositivityLossError, StepSizeUnderflowError) as exc:
        rows.append(("global-profile", "FAIL", str(exc)))
        return rows
    rows.append(("global-profile", "PASS", f"positive out to r = {_fmt(curve.r_last)}"))

    w_inf = model.w_infinity(params)
    est = asymptotics.decay_estimate(curve)
    dev = abs(est.w_limit - w_inf) / w_inf
    tol_dev = 0.01 * strict
    rows.append((
        "decay-limit",
        "PASS" if dev <= tol_dev else "FAIL",
        f"w_limit={est.w_limit:.10g} target={w_inf:.10g} rel_dev={dev:.3e} (tol {tol_dev:g})",
    ))

    ls_target = -params.decay_power
    ls_dev = abs(est.logslope_limit - ls_target) / abs(ls_target)
    rows.append((
        "log-slope-limit",
        "PASS" if ls_dev <= tol_dev else "FAIL",
        f"limit={est.logslope_limit:.10g} target={ls_target:.10g} rel_dev={ls_dev:.3e}",
    ))

    rng = random.Random(f"{seed}:verify")
    hi = min(1e4, curve.r_last)
    lo = min(1.0, hi / 10.0)
    radii = [10.0 ** rng.uniform(np.log10(lo), np.log10(hi)) for _ in range(12)]
    tol_res = 1e-6 * strict
    ode_res = max(abs(solver.ode_residual(curve, r)) for r in radii)
    rows.append((
        "profile-equation-residual",
        "PASS" if ode_res <= tol_res else "FAIL",
        f"max |residual| = {ode_res:.3e} over 12 radii in [{lo:g}, {hi:g}] (tol {tol_res:g})",
    ))
    int_res = max(abs(solver.integral_identity_residual(curve, r)) for r in radii[:4])
    rows.append((
        "integrated-identity-residual",
        "PASS" if int_res <= tol_res else "FAIL",
        f"max |residual| = {int_res:.3e} over 4 radii (tol {tol_res:g})",
    ))

    bounds = solver.bound_check(curve)
    if bounds.lower_applies:
        rows.append((
            "lower-envelope",
            "PASS" if bounds.lower_holds else "FAIL",
            f"worst margin {bounds.lower_worst_margin:.3e} at r={_fmt(bounds.lower_worst_r)}",
        ))
    else:
        rows.append(("lower-envelope", "N/A", "requires beta > 0 and alpha <= n beta"))
    if bounds.upper_applies:
        rows.append((
            "upper-envelope",
            "PASS" if bounds.upper_holds else "FAIL",
            f"worst margin {bounds.upper_worst_margin:.3e} at r={_fmt(bounds.upper_worst_r)}",
        ))
    else:
        rows.append(("upper-envelope", "N/A", "requires alpha >= n beta > 0"))

    monotone_hyp = params.beta != 0.0 and params.alpha > 0.0 and (
        params.m * params.alpha / params.beta <= params.n - 2.0
    )
    if monotone_hyp:
        interior = curve.P[1:] < 0.0  # P = m v^(m-1) v' has the sign of v'
        rows.append((
            "profile-monotone",
            "PASS" if bool(np.all(interior)) else "FAIL",
            "v' < 0 at all interior samples",
        ))
        v = curve.V ** (1.0 / params.m)
        vp = curve.P * v / (params.m * curve.V)
        shifted = v + (params.beta / params.alpha) * curve.r * vp
        rows.append((
            "shifted-positivity",
            "PASS" if bool(np.all(shifted > 0.0)) else "FAIL",
            "v + (beta/alpha) r v' > 0 at all samples",
        ))
    else:
        rows.append(("profile-monotone", "N/A", "requires m alpha / beta <= n - 2"))
        rows.append(("shifted-positivity", "N/A", "requires m alpha / beta <= n - 2"))

    if tag.alpha_vs_nbeta == "greater" and tag.theorem_applies:
        decades = [10.0**k for k in range(2, 7) if 10.0**k <= curve.r_last * (1 + 1e-12)]
        vals = [r ** (params.n - 2) * float(curve.eval_vm(r)[0]) for r in decades]
        increasing = all(b > a for a, b in zip(vals, vals[1:]))
        rows.append((
            "mass-divergence",
            "PASS" if increasing else "FAIL",
            f"r^(n-2) v^m strictly increasing over decades {decades[0]:g}..{decades[-1]:g} "
            f"(growth x{vals[-1] / vals[0]:.3g})",
        ))
    else:
        rows.append(("mass-divergence", "N/A", "requires decay regime with alpha > n beta"))

    if tag.yamabe_case and tag.theorem_applies:
        rep = geometry.curvature_limits(curve)
        ok = (
            rep.R_rel_deviation <= tol_dev
            and rep.K0_abs_deviation <= 1e-3 * strict
            and rep.K1_rel_deviation <= tol_dev
        )
        rows.append((
            "curvature-limits",
            "PASS" if ok else "FAIL",
            f"R->{rep.R_limit:.6g} (target {rep.R_target:g}), K0->{rep.K0_limit:.2e}, "
            f"K1->{rep.K1_limit:.6g} (target {rep.K1_target:.6g})",
        ))
    else:
        rows.append(("curvature-limits", "N/A", "requires m = (n-2)/(n+2) in the decay regime"))
    return rows


def cmd_verify(args) -> int:
    params, opts, seed = _resolve_instance(args)
    if args.strict <= 0.0:
        raise ParameterError(f"--strict must be positive, got {args.strict}")
    rows = _verify_rows(params, opts, seed, args.strict)
    name_w = max(len(r[0]) for r in rows)
    for name, verdict, detail in rows:
        sys.stdout.write(f"{name:<{name_w}}  {verdict:<4}  {detail}\n")
    failed = sum(1 for _, verdict, _ in rows if verdict == "FAIL")
    sys.stdout.write(f"# {len(rows)} checks, {failed} failed\n")
    return EXIT_OK if failed == 0 else EXIT_NOT_CONVERGED


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "solve":
            return cmd_solve(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        if args.command == "verify":
            return cmd_verify(args)
        raise _CliError(f"unknown command {args.command!r}")
    except _CliError as exc:
        print(f"ydecay: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParameterError, GridFileError, YdecayError) as exc:
        print(f"ydecay: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def console_entry():
    sys.exit(main())


if __name__ == "__main__":
    console_entry()

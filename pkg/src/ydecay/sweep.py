"""Parameter sweeps: grid parsing, per-cell verification, serializable records.

A sweep classifies every cell of a Cartesian parameter grid and fully solves
and verifies the cells in the decay regime.  Cells run on a bounded worker
pool but are emitted strictly in grid order with deterministic per-cell
seeding, so the output is byte-identical regardless of the worker count.

Wall-clock runtime is measured per cell but excluded from serialization by
default (include_runtime=False) so that sweep outputs stay reproducible; pass
--timing on the command line to include it.
"""

from __future__ import annotations

import dataclasses
import itertools
import json
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import asymptotics, geometry, model, solver
from .exceptions import (
    GridFileError,
    ParameterError,
    PositivityLossError,
    StepSizeUnderflowError,
)

GRID_KEYS = ("n", "m", "beta", "rho", "eta")


@dataclass(frozen=True)
class SweepRecord:
    """Verification verdict for one parameter cell; serializes losslessly.

    Fields are None when not applicable (cell not solved, not in the
    conformal case, timing disabled, ...).
    """

    index: int
    n: int
    m: float
    beta: float
    rho: float
    eta: float
    alpha: float | None
    theorem_applies: bool
    alpha_vs_nbeta: str | None
    yamabe_case: bool | None
    explicit_case: bool | None
    reason: str | None
    solved: bool
    status: str | None
    error: str | None
    r_reached: float | None
    nodes: int | None
    nfev: int | None
    w_limit: float | None
    w_infinity: float | None
    w_rel_deviation: float | None
    logslope_limit: float | None
    logslope_target: float | None
    logslope_rel_deviation: float | None
    converged: bool | None
    max_ode_residual: float | None
    max_integral_residual: float | None
    lower_bound_applies: bool | None
    lower_bound_holds: bool | None
    lower_bound_worst_margin: float | None
    upper_bound_applies: bool | None
    upper_bound_holds: bool | None
    upper_bound_worst_margin: float | None
    R_limit: float | None
    K0_limit: float | None
    K1_limit: float | None
    R_rel_deviation: float | None
    K0_abs_deviation: float | None
    K1_rel_deviation: float | None
    runtime_s: float | None

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "SweepRecord":
        return cls(**d)

    @classmethod
    def from_json(cls, line: str) -> "SweepRecord":
        return cls.from_dict(json.loads(line))

    @classmethod
    def field_names(cls) -> tuple:
        return tuple(f.name for f in dataclasses.fields(cls))

    def to_csv_row(self) -> str:
        out = []
        for f in dataclasses.fields(self):
            x = getattr(self, f.name)
            if x is None:
                out.append("")
            elif isinstance(x, bool):
                out.append("true" if x else "false")
            elif isinstance(x, float):
                out.append(format(x, ".17g"))
            elif isinstance(x, str):
                esc = x.replace('"', '""')
                out.append(f'"{esc}"' if ("," in x or '"' in x) else esc)
            else:
                out.append(str(x))
        return ",".join(out)


def parse_grid_text(text: str) -> list:
    """Parse a key=value grid spec into the ordered list of parameter tuples.

    Each of n, m, beta, rho, eta takes a list of values (comma or whitespace
    separated); '#' starts a comment.  Cells enumerate the Cartesian product
    in row-major order over (n, m, beta, rho, eta).
    """
    lists = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise GridFileError(f"grid line {ln}: expected 'key = values', got {raw!r}")
        key, _, rhs = line.partition("=")
        key = key.strip().lower()
        if key not in GRID_KEYS:
            raise GridFileError(f"grid line {ln}: unknown parameter {key!r} (expected one of {GRID_KEYS})")
        vals = [tok for tok in rhs.replace(",", " ").split() if tok]
        if not vals:
            raise GridFileError(f"grid line {ln}: no values for {key!r}")
        try:
            if key == "n":
                parsed = [int(tok) for tok in vals]
            else:
                parsed = [float(tok) for tok in vals]
        except ValueError as exc:
            raise GridFileError(f"grid line {ln}: {exc}") from None
        if key in lists:
            raise GridFileError(f"grid line {ln}: duplicate parameter {key!r}")
        lists[key] = parsed
    missing = [k for k in GRID_KEYS if k not in lists]
    if missing:
        raise GridFileError(f"grid spec missing parameters: {', '.join(missing)}")
    return list(itertools.product(*(lists[k] for k in GRID_KEYS)))


def parse_grid_file(path: str) -> list:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise GridFileError(f"cannot read grid file {path}: {exc}") from None
    return parse_grid_text(text)


def _spot_radii(rng, lo: float, hi: float, count: int):
    ll, lh = np.log10(lo), np.log10(hi)
    return [10.0 ** rng.uniform(ll, lh) for _ in range(count)]


def run_cell(
    index: int,
    cell: tuple,
    r_max: float = solver.DEFAULT_R_MAX,
    tol: float = solver.DEFAULT_TOL,
    r0: float = solver.DEFAULT_R0,
    seed: int = 0,
    include_runtime: bool = False,
) -> SweepRecord:
    """Classify one grid cell and, in the decay regime, solve and verify it."""
    t_start = time.perf_counter()
    n, m, beta, rho, eta = cell
    base = dict.fromkeys(SweepRecord.field_names())
    base.update(index=index, n=n, m=m, beta=beta, rho=rho, eta=eta, solved=False, theorem_applies=False)

    try:
        params = model.ProblemParams(n=n, m=m, beta=beta, rho=rho, eta=eta)
    except ParameterError as exc:
        base["reason"] = str(exc)
        return SweepRecord(**base)

    tag = model.classify(params)
    base.update(
        alpha=params.alpha,
        theorem_applies=tag.theorem_applies,
        alpha_vs_nbeta=tag.alpha_vs_nbeta,
        yamabe_case=tag.yamabe_case,
        explicit_case=tag.explicit_case,
        reason=tag.reason,
    )
    if not tag.theorem_applies:
        return SweepRecord(**base)

    try:
        curve = solver.integrate(params, r_max=r_max, tol=tol, r0=r0)
    except (PositivityLossError, StepSizeUnderflowError) as exc:
        base.update(
            error=str(exc),
            status=exc.curve.status if exc.curve is not None else None,
            r_reached=exc.r_last,
        )
        return SweepRecord(**base)

    est = asymptotics.decay_estimate(curve)
    w_inf = model.w_infinity(params)
    ls_target = -params.decay_power

    rng = random.Random(f"{seed}:{index}")
    hi = min(1e4, curve.r_last)
    lo = min(1.0, hi / 10.0)
    ode_res = max(abs(solver.ode_residual(curve, r)) for r in _spot_radii(rng, lo, hi, 8))
    int_res = max(
        abs(solver.integral_identity_residual(curve, r)) for r in _spot_radii(rng, lo, hi, 3)
    )
    bounds = solver.bound_check(curve)

    base.update(
        solved=True,
        status=curve.status,
        r_reached=curve.r_last,
        nodes=len(curve),
        nfev=curve.diagnostics["nfev"],
        w_limit=est.w_limit,
        w_infinity=w_inf,
        w_rel_deviation=abs(est.w_limit - w_inf) / w_inf,
        logslope_limit=est.logslope_limit,
        logslope_target=ls_target,
        logslope_rel_deviation=abs(est.logslope_limit - ls_target) / abs(ls_target),
        converged=est.converged,
        max_ode_residual=ode_res,
        max_integral_residual=int_res,
        lower_bound_applies=bounds.lower_applies,
        lower_bound_holds=bounds.lower_holds,
        lower_bound_worst_margin=bounds.lower_worst_margin,
        upper_bound_applies=bounds.upper_applies,
        upper_bound_holds=bounds.upper_holds,
        upper_bound_worst_margin=bounds.upper_worst_margin,
    )

    if tag.yamabe_case:
        rep = geometry.curvature_limits(curve)
        base.update(
            R_limit=rep.R_limit,
            K0_limit=rep.K0_limit,
            K1_limit=rep.K1_limit,
            R_rel_deviation=rep.R_rel_deviation,
            K0_abs_deviation=rep.K0_abs_deviation,
            K1_rel_deviation=rep.K1_rel_deviation,
        )

    if include_runtime:
        base["runtime_s"] = time.perf_counter() - t_start
    return SweepRecord(**base)


def run_sweep(
    cells: list,
    jobs: int = 1,
    r_max: float = solver.DEFAULT_R_MAX,
    tol: float = solver.DEFAULT_TOL,
    r0: float = solver.DEFAULT_R0,
    seed: int = 0,
    include_runtime: bool = False,
) -> list:
    """Run all cells on a worker pool; results come back in grid order."""
    if jobs < 1:
        raise ParameterError(f"jobs must be >= 1, got {jobs}")

    def work(item):
        idx, cell = item
        return run_cell(
            idx, cell, r_max=r_max, tol=tol, r0=r0, seed=seed, include_runtime=include_runtime
        )

    items = list(enumerate(cells))
    if jobs == 1:
        return [work(it) for it in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(work, items))


def write_records(records, fh, fmt: str = "jsonl"):
    """Serialize records as JSON-lines or CSV with a fixed header."""
    if fmt == "jsonl":
        for rec in records:
            fh.write(rec.to_json())
            fh.write("\n")
    elif fmt == "csv":
        fh.write(",".join(SweepRecord.field_names()))
        fh.write("\n")
        for rec in records:
            fh.write(rec.to_csv_row())
            fh.write("\n")
    else:
        raise ParameterError(f"unknown sweep format {fmt!r} (expected jsonl or csv)")

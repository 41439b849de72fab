"""Command line driver: single runs, convergence sweeps and TV studies.

Configuration is a JSON file naming one of the built-in cases; every solver
setting has a case default and can be overridden.  Outputs are CSV tables
and JSON reports with full round-trip precision so repeated runs are byte
identical.

Exit codes: 0 success, 2 configuration error, 3 unrecoverable numerical
state, 4 I/O error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dataclass_field
from typing import Callable, Optional

import numpy as np

from . import diagnostics as diag
from .limiters import LimiterConfig, compute_tvbm_M
from .models import (
    ConservationLaw,
    UnrecoverableStateError,
    advection_exact_sample,
    advection_model,
    burgers_exact_modes,
    burgers_exact_sample,
    burgers_model,
    euler_manufactured,
    euler_manufactured_source,
    euler_model,
    euler_sod_initial,
)
from .solver import Boundary, Mesh, RunResult, SolverConfig, run
from .stochastic_basis import MultiElementBasis, RandomDomain, build_elements

__all__ = ["main", "load_config", "ConfigError", "CASES"]

ALL_SCHEMES = ("sg", "wenosg", "weno2d")


class ConfigError(Exception):
    """Invalid or inconsistent experiment configuration."""


def _fmt(v) -> str:
    return format(float(v), ".17g")


# ---------------------------------------------------------------------------
# case presets


@dataclass
class CasePreset:
    name: str
    model: ConservationLaw
    x_domain: tuple[float, float]
    t_end: float
    n_x: int
    paper_n_x: int
    n_xi: int
    k_xi: int
    k_d: int = 2
    cfl: float = 0.45
    tvbm_M: float = 0.0
    default_slope: bool = True
    force_hyperbolicity: bool = False
    boundary_kind: str = "periodic"  # periodic | extrapolation | dirichlet
    initial: Callable = None
    # exact pointwise solution u(t, x, xi), None when unavailable
    analytic: Optional[Callable] = None
    # Dirichlet gPC coefficients (t, x, basis) -> (K+1, n_elements, m)
    dirichlet_left: Optional[Callable] = None
    dirichlet_right: Optional[Callable] = None
    # fixed-xi Dirichlet data for deterministic reference solves
    dirichlet_sample: Optional[Callable] = None
    reference_k_d: int = 2
    fixed_basis: Optional[tuple[int, int]] = None  # required (n_xi, k_xi)


def _advection_inflow(t, x, basis: MultiElementBasis):
    block = np.zeros((basis.degree + 1, basis.n_elements, 1))
    block[0] = 1.0
    return block


def _burgers_exact_boundary(t, x, basis: MultiElementBasis):
    u0, u1, u2 = burgers_exact_modes(t, np.asarray(x))
    return np.array([u0, u1, u2]).reshape(3, 1, 1)


def _make_cases() -> dict[str, CasePreset]:
    sine = lambda x, xi: np.sin(2.0 * np.pi * (x + 0.1 * xi))  # noqa: E731
    burgers_ic = lambda x, xi: burgers_exact_sample(0.0, x, xi)  # noqa: E731
    euler_src = dataclasses.replace(
        euler_model(), source=lambda t, x, xi: euler_manufactured_source(t, x, xi)
    )
    return {
        "advection_riemann": CasePreset(
            name="advection_riemann",
            model=advection_model(),
            x_domain=(0.4, 2.0),
            t_end=0.5,
            n_x=400,
            paper_n_x=2000,
            n_xi=3,
            k_xi=2,
            boundary_kind="dirichlet",
            initial=lambda x, xi: np.where(x <= 0.5, 1.0, 0.0) + 0.0 * xi,
            analytic=advection_exact_sample,
            dirichlet_left=_advection_inflow,
            dirichlet_sample=advection_exact_sample,
        ),
        "burgers_exact": CasePreset(
            name="burgers_exact",
            model=burgers_model(),
            x_domain=(0.0, 1.0),
            t_end=0.2,
            n_x=64,
            paper_n_x=512,
            n_xi=1,
            k_xi=2,
            cfl=0.1,
            tvbm_M=compute_tvbm_M(burgers_ic, (0.0, 1.0), (-1.0, 1.0)),
            boundary_kind="dirichlet",
            initial=burgers_ic,
            analytic=burgers_exact_sample,
            dirichlet_left=_burgers_exact_boundary,
            dirichlet_right=_burgers_exact_boundary,
            dirichlet_sample=burgers_exact_sample,
            fixed_basis=(1, 2),
        ),
        "burgers_sine": CasePreset(
            name="burgers_sine",
            model=burgers_model(),
            x_domain=(0.0, 1.0),
            t_end=0.4,
            n_x=400,
            paper_n_x=2000,
            n_xi=10,
            k_xi=2,
            tvbm_M=compute_tvbm_M(sine, (0.0, 1.0), (-1.0, 1.0)),
            initial=sine,
        ),
        "euler_manufactured": CasePreset(
            name="euler_manufactured",
            model=euler_src,
            x_domain=(0.0, 2.0),
            t_end=0.5,
            n_x=200,
            paper_n_x=1000,
            n_xi=1,
            k_xi=1,
            # smooth convergence study: the TVBM guard does not cover
            # K_xi = 1, so the stochastic slope limiter stays off by default
            default_slope=False,
            tvbm_M=compute_tvbm_M(
                lambda x, xi: euler_manufactured(0.5, x, xi), (0.0, 2.0),
                (-1.0, 1.0),
            ),
            initial=lambda x, xi: euler_manufactured(0.0, x, xi),
            analytic=euler_manufactured,
        ),
        "euler_sod": CasePreset(
            name="euler_sod",
            model=euler_model(),
            x_domain=(0.0, 1.0),
            t_end=0.1,
            n_x=400,
            paper_n_x=2000,
            n_xi=3,
            k_xi=2,
            force_hyperbolicity=True,
            boundary_kind="extrapolation",
            initial=euler_sod_initial,
            reference_k_d=0,
        ),
    }


CASES = _make_cases()


# ---------------------------------------------------------------------------
# configuration


@dataclass
class ExperimentConfig:
    case: CasePreset
    schemes: list[str]
    sweep_parameter: str | None
    sweep_values: list[int]
    output_dir: str
    n_x: int
    n_xi: int
    k_xi: int
    k_d: int
    cfl: float
    t_end: float
    limiters: LimiterConfig
    quiet: bool = False


_TOP_KEYS = {"case", "schemes", "sweep", "solver", "limiters", "output_dir"}
_SOLVER_KEYS = {"n_x", "n_xi", "k_xi", "k_d", "cfl", "t_end"}
_LIMITER_KEYS = {"tvbm_M", "admissibility_eps", "enable_slope",
                 "enable_hyperbolicity"}


def load_config(path: str, paper_scale: bool = False,
                schemes_override: list[str] | None = None,
                output_override: str | None = None) -> ExperimentConfig:
    """Read, validate and resolve a JSON experiment configuration."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}")
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")

    problems = []
    for key in raw:
        if key not in _TOP_KEYS:
            problems.append(f"unknown key {key!r}")
    case_name = raw.get("case")
    if case_name not in CASES:
        problems.append(
            f"case must be one of {sorted(CASES)}, got {case_name!r}"
        )
    if problems:
        raise ConfigError(f"{path}: " + "; ".join(problems))
    case = CASES[case_name]

    solver_raw = raw.get("solver", {})
    limiter_raw = raw.get("limiters", {})
    for key in solver_raw:
        if key not in _SOLVER_KEYS:
            problems.append(f"solver: unknown key {key!r}")
    for key in limiter_raw:
        if key not in _LIMITER_KEYS:
            problems.append(f"limiters: unknown key {key!r}")

    schemes = schemes_override or raw.get("schemes") or ["wenosg"]
    for s in schemes:
        if s not in ALL_SCHEMES:
            problems.append(f"unknown scheme {s!r}")

    sweep_parameter, sweep_values = None, []
    if "sweep" in raw:
        sweep = raw["sweep"]
        if (not isinstance(sweep, dict)
                or sweep.get("parameter") not in ("n_x", "n_xi")
                or not isinstance(sweep.get("values"), list)):
            problems.append("sweep must be {parameter: n_x|n_xi, values: [...]}")
        else:
            sweep_parameter = sweep["parameter"]
            sweep_values = [int(v) for v in sweep["values"]]

    n_x = int(solver_raw.get("n_x", case.paper_n_x if paper_scale else case.n_x))
    n_xi = int(solver_raw.get("n_xi", case.n_xi))
    k_xi = int(solver_raw.get("k_xi", case.k_xi))
    k_d = int(solver_raw.get("k_d", case.k_d))
    cfl = float(solver_raw.get("cfl", case.cfl))
    t_end = float(solver_raw.get("t_end", case.t_end))
    if case.fixed_basis is not None:
        fx_n, fx_k = case.fixed_basis
        if "n_xi" in solver_raw and n_xi != fx_n:
            problems.append(f"{case.name} requires n_xi={fx_n}")
        if "k_xi" in solver_raw and k_xi != fx_k:
            problems.append(f"{case.name} requires k_xi={fx_k}")
        n_xi, k_xi = fx_n, fx_k
    limiters = LimiterConfig(
        tvbm_M=float(limiter_raw.get("tvbm_M", case.tvbm_M)),
        admissibility_eps=float(limiter_raw.get("admissibility_eps", 1e-10)),
        enable_slope=bool(limiter_raw.get("enable_slope", case.default_slope)),
        enable_hyperbolicity=bool(
            limiter_raw.get("enable_hyperbolicity", case.force_hyperbolicity)
        ),
    )
    if problems:
        raise ConfigError(f"{path}: " + "; ".join(problems))
    return ExperimentConfig(
        case=case,
        schemes=list(schemes),
        sweep_parameter=sweep_parameter,
        sweep_values=sweep_values,
        output_dir=output_override or raw.get("output_dir", "."),
        n_x=n_x,
        n_xi=n_xi,
        k_xi=k_xi,
        k_d=k_d,
        cfl=cfl,
        t_end=t_end,
        limiters=limiters,
    )


# ---------------------------------------------------------------------------
# experiment execution


def _boundary_for(case: CasePreset, basis: MultiElementBasis) -> Boundary:
    if case.boundary_kind == "periodic":
        return Boundary.periodic()
    if case.boundary_kind == "extrapolation":
        return Boundary.extrapolation()
    left = right = None
    if case.dirichlet_left is not None:
        left = lambda t, x: case.dirichlet_left(t, x, basis)  # noqa: E731
    if case.dirichlet_right is not None:
        right = lambda t, x: case.dirichlet_right(t, x, basis)  # noqa: E731
    return Boundary.dirichlet(left_values=left, right_values=right)


def execute(cfg: ExperimentConfig, scheme: str, n_x: int | None = None,
            n_xi: int | None = None) -> RunResult:
    """Run one scheme of the configured case and return the raw result."""
    case = cfg.case
    limiters = dataclasses.replace(
        cfg.limiters, enable_slope=cfg.limiters.enable_slope and scheme == "wenosg"
    )
    solver_cfg = SolverConfig(
        scheme=scheme,
        k_xi=cfg.k_xi,
        k_d=cfg.k_d,
        n_xi=n_xi if n_xi is not None else cfg.n_xi,
        n_x=n_x if n_x is not None else cfg.n_x,
        cfl=cfg.cfl,
        t_end=cfg.t_end,
        limiters=limiters,
    )
    mesh = Mesh(case.x_domain[0], case.x_domain[1], solver_cfg.n_x)
    domain = RandomDomain(-1.0, 1.0)
    basis = build_elements(domain, solver_cfg.n_xi, solver_cfg.k_xi)
    boundary = _boundary_for(case, basis)
    return run(solver_cfg, case.model, case.initial, mesh,
               domain=domain, boundary=boundary, basis=basis)


def _analytic_moments(case: CasePreset, mesh: Mesh, basis: MultiElementBasis,
                      t_end: float):
    sol = lambda x, xi: case.analytic(t_end, x, xi)  # noqa: E731
    return diag.sampled_moments(sol, mesh, basis)


def _reference_moments(cfg: ExperimentConfig, mesh: Mesh,
                       basis: MultiElementBasis):
    """Mean/variance at cell centers from deterministic fine solves."""
    case = cfg.case
    from .stochastic_basis import quadrature

    rule = quadrature("gauss_legendre", 8, (-1.0, 1.0))
    mids = 0.5 * (basis.edges[:-1] + basis.edges[1:])
    xi = (mids[:, None] + 0.5 * basis.element_width * rule.nodes[None, :]).ravel()
    states = diag.reference_solution(
        case.model, mesh, xi, case.initial, cfg.t_end,
        k_d=case.reference_k_d, cfl=cfg.cfl,
        boundary_kind=case.boundary_kind, dirichlet_values=case.dirichlet_sample,
    )
    vals = states.reshape(basis.n_elements, len(rule.nodes), mesh.n_cells, -1)
    p = basis.element_probabilities
    mean = np.einsum("jqxm,q,j->xm", vals, rule.weights, p)
    second = np.einsum("jqxm,q,j->xm", vals**2, rule.weights, p)
    return mean, np.maximum(second - mean**2, 0.0)


def _result_moments(result: RunResult):
    field = result.field
    if field is None:
        field = result.means[None]
    mean, var = result.basis.moments(field)
    mean = mean.reshape(result.mesh.n_cells, -1)
    var = var.reshape(result.mesh.n_cells, -1)
    return mean, var


def build_report(cfg: ExperimentConfig, scheme: str, result: RunResult,
                 reference_moments=None, tv_ref=None) -> diag.RunReport:
    """Assemble the diagnostics record for one finished run."""
    case = cfg.case
    mesh, basis = result.mesh, result.basis
    sampler = diag.SolutionSampler(result)
    tvx = diag.tv_x(sampler, mesh, basis)
    tvxi = diag.tv_xi(sampler, mesh, basis)
    report = diag.RunReport(scheme=scheme, case=case.name,
                            tv_x=list(map(float, tvx)),
                            tv_xi=list(map(float, tvxi)),
                            wall_time=result.wall_time)
    report.limiter_stats = {
        "troubled_cells": result.troubled_count,
        "hyperbolicity_cells": result.hyperbolicity_count,
        "theta_max": result.theta_max,
        "n_steps": result.n_steps,
    }
    if reference_moments is None and case.analytic is not None:
        reference_moments = _analytic_moments(case, mesh, basis, cfg.t_end)
    if reference_moments is not None:
        mean, var = _result_moments(result)
        l1m, l1v = diag.moment_l1(mean, var, *reference_moments, mesh.dx)
        report.l1_mean = list(map(float, l1m))
        report.l1_var = list(map(float, l1v))
    if tv_ref is None and case.analytic is not None:
        sol = lambda x, xi: case.analytic(cfg.t_end, x, xi)  # noqa: E731
        tv_ref = diag.tv_x(sol, mesh, basis)
    if tv_ref is not None:
        report.tv_x_reference = list(map(float, np.atleast_1d(tv_ref)))
        report.percentage_above_tv_x = list(
            map(float, diag.pct_above(tvx, tv_ref))
        )
    return report


# ---------------------------------------------------------------------------
# output writers


def _write_csv(path: str, header: list[str], rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(
                cell if isinstance(cell, str) else _fmt(cell) for cell in row
            ) + "\n")


def _write_field_csv(path: str, result: RunResult):
    field = result.field
    if field is None:
        field = result.means[None]
    rows = []
    nk, nx, nj, m = field.shape
    for k in range(nk):
        for i in range(nx):
            for j in range(nj):
                for c in range(m):
                    rows.append((str(k), str(i), str(j), str(c),
                                 _fmt(field[k, i, j, c])))
    _write_csv(path, ["k", "i", "j", "component", "value"], rows)


def _write_moments_csv(path: str, result: RunResult):
    mean, var = _result_moments(result)
    m = mean.shape[1]
    header = ["x"]
    for c in range(m):
        header += [f"mean_{c}", f"var_{c}"]
    rows = []
    for i, x in enumerate(result.mesh.centers):
        row = [x]
        for c in range(m):
            row += [mean[i, c], var[i, c]]
        rows.append(row)
    _write_csv(path, header, rows)


def _n_workers() -> int:
    raw = os.environ.get("UQHYP_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_ordered(fn, items):
    workers = _n_workers()
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# subcommands


def cmd_run(cfg: ExperimentConfig) -> int:
    os.makedirs(cfg.output_dir, exist_ok=True)
    for scheme in cfg.schemes:
        result = execute(cfg, scheme)
        report = build_report(cfg, scheme, result)
        stem = os.path.join(cfg.output_dir, f"{cfg.case.name}_{scheme}")
        _write_field_csv(stem + "_field.csv", result)
        _write_moments_csv(stem + "_moments.csv", result)
        payload = report.as_dict()
        payload["n_x"] = result.mesh.n_cells
        payload["n_xi"] = result.basis.n_elements
        payload["k_xi"] = result.basis.degree
        payload["t_end"] = result.t_end
        with open(stem + "_report.json", "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        if not cfg.quiet:
            print(f"{cfg.case.name} {scheme}: {result.n_steps} steps, "
                  f"report at {stem}_report.json")
    return 0


def cmd_convergence(cfg: ExperimentConfig) -> int:
    if cfg.sweep_parameter is None or len(cfg.sweep_values) < 2:
        raise ConfigError("convergence requires a sweep with at least 2 values")
    os.makedirs(cfg.output_dir, exist_ok=True)
    case = cfg.case
    if case.analytic is None:
        raise ConfigError(f"case {case.name} has no analytic reference")
    for scheme in cfg.schemes:
        def one(value):
            kwargs = {cfg.sweep_parameter: value}
            result = execute(cfg, scheme, **kwargs)
            ref = _analytic_moments(case, result.mesh, result.basis, cfg.t_end)
            mean, var = _result_moments(result)
            l1m, l1v = diag.moment_l1(mean, var, *ref, result.mesh.dx)
            return float(l1m[0]), float(l1v[0])

        errs = _map_ordered(one, cfg.sweep_values)
        l1_means = [e[0] for e in errs]
        l1_vars = [e[1] for e in errs]
        eoc_mean = diag.eoc(l1_means, cfg.sweep_values)
        try:
            eoc_var = diag.eoc(l1_vars, cfg.sweep_values)
        except ValueError:
            eoc_var = [float("nan")] * (len(cfg.sweep_values) - 1)
        rows = []
        for i, value in enumerate(cfg.sweep_values):
            rows.append((
                str(value), l1_means[i],
                "" if i == 0 else eoc_mean[i - 1],
                l1_vars[i],
                "" if i == 0 else eoc_var[i - 1],
            ))
        path = os.path.join(cfg.output_dir,
                            f"{case.name}_{scheme}_convergence.csv")
        _write_csv(path, ["resolution", "l1_mean", "eoc_mean", "l1_var",
                          "eoc_var"], rows)
        if not cfg.quiet:
            print(f"{case.name} {scheme}: convergence table at {path}")
    return 0


def cmd_tvstudy(cfg: ExperimentConfig) -> int:
    os.makedirs(cfg.output_dir, exist_ok=True)
    case = cfg.case
    path = os.path.join(cfg.output_dir, f"{case.name}_tvstudy.csv")
    if not cfg.schemes:
        _write_csv(path, ["scheme", "n_xi", "l1", "tv_x", "tv_xi",
                          "pct_above"], [])
        return 0
    mesh = Mesh(case.x_domain[0], case.x_domain[1], cfg.n_x)
    basis = build_elements(RandomDomain(-1.0, 1.0), cfg.n_xi, cfg.k_xi)
    if case.analytic is not None:
        sol = lambda x, xi: case.analytic(cfg.t_end, x, xi)  # noqa: E731
        tv_ref = diag.tv_x(sol, mesh, basis)
        ref_moments = _analytic_moments(case, mesh, basis, cfg.t_end)
    else:
        tv_ref, _ = diag.tv_x_reference(
            case.model, mesh, basis, case.initial, cfg.t_end,
            k_d=case.reference_k_d, cfl=cfg.cfl,
            boundary_kind=case.boundary_kind,
            dirichlet_values=case.dirichlet_sample,
        )
        ref_moments = _reference_moments(cfg, mesh, basis)

    def one(scheme):
        result = execute(cfg, scheme)
        return build_report(cfg, scheme, result,
                            reference_moments=ref_moments, tv_ref=tv_ref)

    reports = _map_ordered(one, cfg.schemes)
    rows = []
    for report in reports:
        rows.append((report.scheme, str(cfg.n_xi), report.l1_mean[0],
                     report.tv_x[0], report.tv_xi[0],
                     report.percentage_above_tv_x[0]))
    _write_csv(path, ["scheme", "n_xi", "l1", "tv_x", "tv_xi", "pct_above"],
               rows)
    if not cfg.quiet:
        print(f"{case.name}: TV study at {path}")
        for report in reports:
            print(f"  {report.scheme}: tv_x={report.tv_x[0]:.6g} "
                  f"pct_above={report.percentage_above_tv_x[0]:.3g}%")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="uqhyp",
        description="Stochastic Galerkin WENO solver for 1-D conservation "
                    "laws with one uniform random parameter.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("run", "single run: field, moments and report files"),
        ("convergence", "error sweep against the analytic reference"),
        ("tvstudy", "compare schemes by total variation"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--output", default=None, help="output directory")
        p.add_argument("--paper-scale", action="store_true",
                       help="use the full-resolution defaults")
        p.add_argument("--scheme", action="append", default=None,
                       choices=ALL_SCHEMES, help="override schemes (repeatable)")
        p.add_argument("--quiet", action="store_true")
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, paper_scale=args.paper_scale,
                          schemes_override=args.scheme,
                          output_override=args.output)
        cfg.quiet = args.quiet
        handler = {"run": cmd_run, "convergence": cmd_convergence,
                   "tvstudy": cmd_tvstudy}[args.command]
        return handler(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except UnrecoverableStateError as exc:
        print(f"unrecoverable numerical state: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())

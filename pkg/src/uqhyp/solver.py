"""Finite volume semi-discretization and SSP Runge-Kutta drivers.

Three schemes share the machinery:

* ``sg``: stochastic Galerkin with CWENOZ reconstruction in x only.
* ``wenosg``: sg plus the stochastic slope limiter at every stage.
* ``weno2d``: genuinely two-dimensional CWENOZ on (x, xi) cell means.

The spatial operator is L = -(F_{i+1/2} - F_{i-1/2}) / dx (plus projected
sources), advanced with the Shu-Osher SSP-RK3 method for quadratic
reconstruction and forward Euler for piecewise-constant runs.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field as dataclass_field
from typing import Callable, Optional

import numpy as np

from .limiters import (
    LimiterConfig,
    hyperbolicity_limit_field,
    is_admissible,
    slope_limit,
)
from .models import ConservationLaw, UnrecoverableStateError
from .stochastic_basis import (
    MultiElementBasis,
    RandomDomain,
    build_elements,
    quadrature,
)
from .weno_reconstruction import (
    POLY2D_EXPONENTS,
    cwenoz_batch_2d,
    eval_poly2d,
    traces_from_extended,
)

__all__ = [
    "Mesh",
    "Boundary",
    "SolverConfig",
    "RunResult",
    "initialize",
    "initialize_means",
    "lax_friedrichs",
    "global_viscosity",
    "rhs_wenosg",
    "rhs_weno2d",
    "step",
    "run",
    "deterministic_solve",
]

N_GHOST = 2
Q_D = 4  # Gauss-Lobatto rule per x-cell has Q_D + 1 nodes, interfaces included


@dataclass(frozen=True)
class Mesh:
    x_left: float
    x_right: float
    n_cells: int

    def __post_init__(self):
        if not self.x_left < self.x_right:
            raise ValueError(f"invalid mesh bounds [{self.x_left}, {self.x_right}]")
        if self.n_cells < 3:
            raise ValueError(f"need at least 3 cells, got {self.n_cells}")

    @property
    def dx(self) -> float:
        return (self.x_right - self.x_left) / self.n_cells

    @property
    def centers(self) -> np.ndarray:
        return self.x_left + self.dx * (np.arange(self.n_cells) + 0.5)

    @property
    def interfaces(self) -> np.ndarray:
        return self.x_left + self.dx * np.arange(self.n_cells + 1)

    def x_quadrature(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-cell Gauss-Lobatto nodes (n_cells, Q_D + 1) and unit weights."""
        rule = quadrature("gauss_lobatto", Q_D + 1, (-1.0, 1.0))
        nodes = self.centers[:, None] + 0.5 * self.dx * rule.nodes[None, :]
        return nodes, rule.weights


@dataclass(frozen=True)
class Boundary:
    """Ghost-cell policy; ``kind`` is ``periodic`` or ``sides``.

    With ``sides``, each side is either zeroth-order extrapolation or
    Dirichlet data supplied as a callable ``(t, x_ghost_center) -> block``
    returning gPC coefficients of shape (degree + 1, n_elements, m).
    """

    kind: str = "periodic"
    left: str = "extrapolation"
    right: str = "extrapolation"
    left_values: Optional[Callable] = None
    right_values: Optional[Callable] = None

    @staticmethod
    def periodic() -> "Boundary":
        return Boundary(kind="periodic")

    @staticmethod
    def extrapolation() -> "Boundary":
        return Boundary(kind="sides")

    @staticmethod
    def dirichlet(left_values=None, right_values=None) -> "Boundary":
        return Boundary(
            kind="sides",
            left="dirichlet" if left_values is not None else "extrapolation",
            right="dirichlet" if right_values is not None else "extrapolation",
            left_values=left_values,
            right_values=right_values,
        )


@dataclass
class SolverConfig:
    scheme: str = "wenosg"
    k_xi: int = 2
    k_d: int = 2
    n_xi: int = 1
    n_x: int = 100
    cfl: float = 0.45
    t_end: float = 0.5
    rk_order: int | None = None
    limiters: LimiterConfig = dataclass_field(default_factory=LimiterConfig)

    def __post_init__(self):
        if self.scheme not in ("sg", "wenosg", "weno2d"):
            raise ValueError(f"unknown scheme: {self.scheme!r}")
        if self.k_d not in (0, 2):
            raise ValueError(f"spatial degree must be 0 or 2, got {self.k_d}")
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")
        if self.rk_order is None:
            self.rk_order = 3 if self.k_d == 2 else 1
        if self.rk_order not in (1, 2, 3):
            raise ValueError(f"rk_order must be 1, 2 or 3, got {self.rk_order}")


@dataclass
class RunResult:
    field: np.ndarray | None  # gPC coefficients (sg / wenosg)
    means: np.ndarray  # (n_x, n_elements, m) cell means
    mesh: Mesh
    basis: MultiElementBasis
    t_end: float
    n_steps: int
    scheme: str
    troubled_count: int = 0
    theta_max: float = 0.0
    hyperbolicity_count: int = 0
    wall_time: float = 0.0


def _initial_rule(basis: MultiElementBasis):
    """Dense per-element rule for the true L2 projection of initial data.

    Using many more nodes than the flux rule matters for discontinuous
    data: the projection then carries the genuine Gibbs under/overshoots
    instead of interpolating the sampled values.
    """
    from .stochastic_basis import legendre_values

    rule = quadrature("gauss_legendre", max(8 * (basis.degree + 1), 32),
                      (-1.0, 1.0))
    return rule, legendre_values(basis.degree, rule.nodes)


def initialize(u0, mesh: Mesh, basis: MultiElementBasis,
               model: ConservationLaw) -> np.ndarray:
    """Project an initial condition onto gPC coefficients of cell means.

    ``u0(x, xi)`` must broadcast over arrays and return the state with the
    component axis last (scalars may omit it).
    """
    xq, wq = mesh.x_quadrature()
    rule, phi = _initial_rule(basis)
    vals = _sample_ic(u0, xq, basis, rule.nodes, model)
    return np.einsum("xqjrm,rk,q,r->kxjm", vals, phi, wq, rule.weights)


def initialize_means(u0, mesh: Mesh, basis: MultiElementBasis,
                     model: ConservationLaw) -> np.ndarray:
    """(x, xi)-cell means of an initial condition."""
    xq, wq = mesh.x_quadrature()
    rule, _ = _initial_rule(basis)
    vals = _sample_ic(u0, xq, basis, rule.nodes, model)
    return np.einsum("xqjrm,q,r->xjm", vals, wq, rule.weights)


def _sample_ic(u0, xq, basis, local_nodes, model):
    mids = 0.5 * (basis.edges[:-1] + basis.edges[1:])
    xi = mids[:, None] + 0.5 * basis.element_width * local_nodes[None, :]
    x4 = xq[:, :, None, None]
    xi4 = xi[None, None, :, :]
    vals = np.asarray(u0(x4, xi4), dtype=float)
    if model.n_components == 1:
        vals = vals[..., None]
    target = xq.shape + xi.shape + (model.n_components,)
    return np.broadcast_to(vals, target)


def lax_friedrichs(u_minus, u_plus, xi, c, model: ConservationLaw) -> np.ndarray:
    """Global Lax-Friedrichs flux 0.5 (f(u-) + f(u+) - c (u+ - u-))."""
    u_minus = np.asarray(u_minus, dtype=float)
    u_plus = np.asarray(u_plus, dtype=float)
    fm = model.flux(u_minus, xi)
    fp = model.flux(u_plus, xi)
    c = np.asarray(c)
    return 0.5 * (fm + fp - c[..., None] * (u_plus - u_minus))


def _pad_gpc(field: np.ndarray, boundary: Boundary, t: float, mesh: Mesh) -> np.ndarray:
    """Extend the cell axis (axis 1) of a gPC field by two ghost cells."""
    if boundary.kind == "periodic":
        return np.concatenate(
            [field[:, -N_GHOST:], field, field[:, :N_GHOST]], axis=1
        )
    left = [field[:, :1]] * N_GHOST
    right = [field[:, -1:]] * N_GHOST
    if boundary.left == "dirichlet":
        xs = mesh.x_left - mesh.dx * (np.arange(N_GHOST) + 0.5)
        left = [np.asarray(boundary.left_values(t, x))[:, None] for x in xs[::-1]]
    if boundary.right == "dirichlet":
        xs = mesh.x_right + mesh.dx * (np.arange(N_GHOST) + 0.5)
        right = [np.asarray(boundary.right_values(t, x))[:, None] for x in xs]
    return np.concatenate(left + [field] + right, axis=1)


def _check_states(states, model: ConservationLaw, what: str):
    ok = model.admissible(states)
    if not np.all(ok):
        idx = tuple(int(i) for i in np.argwhere(~ok)[0])
        raise UnrecoverableStateError(
            f"inadmissible state in {what} at index {idx}: "
            f"{np.asarray(states)[idx]}"
        )


def _wenosg_traces(field, t, mesh, basis, boundary, k_d):
    """Node values and interface traces of a gPC field.

    Returns (node values (n_x, n_j, q, m), u_minus, u_plus with shapes
    (n_j, q, n_x + 1, m)).
    """
    padded = _pad_gpc(field, boundary, t, mesh)
    phi = basis.phi_at_nodes  # (q, K+1)
    vals = np.einsum("kxjm,qk->xjqm", padded, phi)  # (n_x + 4, n_j, q, m)
    rows = vals.transpose(1, 2, 3, 0)  # (n_j, q, m, n_x + 4)
    um, up = traces_from_extended(rows, mesh.dx, k_d)
    um = um.transpose(0, 1, 3, 2)  # (n_j, q, n_x + 1, m)
    up = up.transpose(0, 1, 3, 2)
    return vals[N_GHOST:-N_GHOST], um, up


def global_viscosity(state, t, mesh, basis, model, boundary, k_d,
                     scheme: str = "wenosg",
                     limits: LimiterConfig | None = None) -> float:
    """Largest wavespeed over all cells, elements, nodes and traces."""
    xi = basis.xi_nodes  # (n_j, q)
    if scheme == "weno2d":
        um, up, _ = _weno2d_traces(state, t, mesh, basis, boundary, k_d, model,
                                   limits)
        xi_t = xi[None, :, :]  # (1, n_j, q) against (n_x+1, n_j, q, m)
        speeds = [model.max_wavespeed(um, xi_t), model.max_wavespeed(up, xi_t)]
        interior = np.broadcast_to(state[:, :, None, :],
                                   state.shape[:2] + (xi.shape[1], state.shape[2]))
        speeds.append(model.max_wavespeed(interior, xi[None]))
    else:
        _, um, up = _wenosg_traces(state, t, mesh, basis, boundary, k_d)
        # interior states are checked at the flux nodes plus the element
        # endpoints, where Gibbs undershoots peak
        check = np.einsum("kxjm,qk->xjqm", state, basis.phi_at_check_nodes)
        xi_rows = xi[:, :, None]
        speeds = [
            model.max_wavespeed(check, basis.xi_check_nodes[None]),
            model.max_wavespeed(um, xi_rows),
            model.max_wavespeed(up, xi_rows),
        ]
    return float(max(np.max(s) for s in speeds))


def _project_source(t, mesh, basis, model):
    xq, wq = mesh.x_quadrature()
    xi = basis.xi_nodes
    src = np.asarray(model.source(t, xq[:, :, None, None], xi[None, None]), dtype=float)
    return src, wq


def rhs_wenosg(field, t, mesh, basis, model, boundary, c, k_d) -> np.ndarray:
    """Spatial operator for the (WENO)sG schemes on gPC coefficients."""
    vals, um, up = _wenosg_traces(field, t, mesh, basis, boundary, k_d)
    _check_states(um, model, "left interface traces")
    _check_states(up, model, "right interface traces")
    xi = basis.xi_nodes[:, :, None]  # (n_j, q, 1)
    flux = lax_friedrichs(um, up, xi, np.asarray(c), model)  # (n_j, q, n_x+1, m)
    ldiff = -(flux[:, :, 1:] - flux[:, :, :-1]) / mesh.dx  # (n_j, q, n_x, m)
    out = np.einsum("jqxm,qk,q->kxjm", ldiff, basis.phi_at_nodes, basis.node_weights)
    if model.source is not None:
        src, wq = _project_source(t, mesh, basis, model)
        out += np.einsum("xqjrm,rk,q,r->kxjm", src, basis.phi_at_nodes, wq,
                         basis.node_weights)
    return out


def _pad_means(means, boundary, t, mesh):
    if boundary.kind == "periodic":
        return np.concatenate([means[-N_GHOST:], means, means[:N_GHOST]], axis=0)
    left = [means[:1]] * N_GHOST
    right = [means[-1:]] * N_GHOST
    if boundary.left == "dirichlet":
        xs = mesh.x_left - mesh.dx * (np.arange(N_GHOST) + 0.5)
        left = [np.asarray(boundary.left_values(t, x))[0][None] for x in xs[::-1]]
    if boundary.right == "dirichlet":
        xs = mesh.x_right + mesh.dx * (np.arange(N_GHOST) + 0.5)
        right = [np.asarray(boundary.right_values(t, x))[0][None] for x in xs]
    return np.concatenate(left + [means] + right, axis=0)


def _weno2d_traces(means, t, mesh, basis, boundary, k_d, model, limits):
    """Reconstruct (x, xi) cell means and evaluate interface traces.

    Returns (u_minus, u_plus) of shape (n_x + 1, n_j, q, m) plus the number
    of cells damped by the hyperbolicity limiter.
    """
    n_x = means.shape[0]
    ext = _pad_means(means, boundary, t, mesh)  # (n_x + 4, n_j, m)
    # copy extension in the xi direction
    ext = np.concatenate([ext[:, :1], ext, ext[:, -1:]], axis=1)
    if k_d == 0:
        um = np.repeat(ext[1:n_x + 2, 1:-1, None, :], basis.n_nodes, axis=2)
        up = np.repeat(ext[2:n_x + 3, 1:-1, None, :], basis.n_nodes, axis=2)
        return um, up, 0
    # blocks: (n_x + 2, n_j, m, 3, 3) centered on padded cells 1..n_x+2
    blocks = np.lib.stride_tricks.sliding_window_view(ext, (3, 3), axis=(0, 1))
    coeffs = cwenoz_batch_2d(blocks, mesh.dx)  # (n_x + 2, n_j, m, 9)
    n_damped = 0
    if limits is not None and limits.enable_hyperbolicity and model.n_components > 1:
        coeffs, n_damped = _damp_poly2d(coeffs, ext[1:-1, 1:-1], basis, model,
                                        limits.admissibility_eps)
    ty = 0.5 * basis.node_rule.nodes  # local xi coordinates of the flux nodes
    um = eval_poly2d(coeffs[:-1, :, :, None, :].transpose(0, 1, 3, 2, 4),
                     0.5, ty[None, None, :, None])
    up = eval_poly2d(coeffs[1:, :, :, None, :].transpose(0, 1, 3, 2, 4),
                     -0.5, ty[None, None, :, None])
    return um, up, n_damped


def _damp_poly2d(coeffs, cell_means, basis, model, eps):
    """Scale 2-D reconstructions toward their cell mean until admissible.

    Admissibility is enforced at the tensor grid of x-quadrature nodes and
    element flux nodes, which includes the interface traces.
    """
    rule = quadrature("gauss_lobatto", Q_D + 1, (-1.0, 1.0))
    tx = 0.5 * rule.nodes
    ty = 0.5 * basis.check_nodes
    gx, gy = np.meshgrid(tx, ty, indexing="ij")
    basis_vals = np.stack([
        gx.ravel() ** r * gy.ravel() ** s for r, s in POLY2D_EXPONENTS
    ])  # (9, n_points)
    states = np.einsum("xjmi,ip->xjpm", coeffs, basis_vals)
    ok = is_admissible(states, model, eps).all(axis=2)
    if np.all(ok):
        return coeffs, 0
    bad_mean = ~is_admissible(cell_means, model, eps)
    if np.any(bad_mean):
        idx = tuple(np.argwhere(bad_mean)[0])
        raise UnrecoverableStateError(
            f"cell mean inadmissible at {idx}: {cell_means[idx]}"
        )
    flag = ~ok
    from .limiters import _bisect_theta

    theta = _bisect_theta(cell_means[flag], states[flag], model, eps)
    mean_coeff = np.zeros_like(coeffs[flag])
    mean_coeff[..., 0] = cell_means[flag]
    avg = (coeffs[flag][..., 0]
           + (coeffs[flag][..., 2] + coeffs[flag][..., 6]) / 12.0
           + coeffs[flag][..., 8] / 144.0)
    # damp about the polynomial's own average (equal to the cell mean)
    mean_only = np.zeros_like(coeffs[flag])
    mean_only[..., 0] = avg
    damped = mean_only + (1.0 - theta)[:, None, None] * (coeffs[flag] - mean_only)
    out = coeffs.copy()
    out[flag] = damped
    return out, int(flag.sum())


def rhs_weno2d(means, t, mesh, basis, model, boundary, c, k_d,
               limits: LimiterConfig | None = None):
    """Spatial operator for the 2-D WENO scheme on (x, xi) cell means."""
    um, up, n_damped = _weno2d_traces(means, t, mesh, basis, boundary, k_d,
                                      model, limits)
    _check_states(um, model, "left interface traces")
    _check_states(up, model, "right interface traces")
    xi = basis.xi_nodes[None, :, :]  # (1, n_j, q)
    flux = lax_friedrichs(um, up, xi, np.asarray(c), model)  # (n_x+1, n_j, q, m)
    fbar = np.einsum("xjqm,q->xjm", flux, basis.node_weights)
    out = -(fbar[1:] - fbar[:-1]) / mesh.dx
    if model.source is not None:
        src, wq = _project_source(t, mesh, basis, model)
        out += np.einsum("xqjrm,q,r->xjm", src, wq, basis.node_weights)
    return out, n_damped


class _Stepper:
    """Owns the per-stage limiting and the SSP-RK update for one run."""

    def __init__(self, config: SolverConfig, mesh: Mesh, basis: MultiElementBasis,
                 model: ConservationLaw, boundary: Boundary):
        self.config = config
        self.mesh = mesh
        self.basis = basis
        self.model = model
        self.boundary = boundary
        self.transform = basis.monomial_transform() if config.k_xi >= 1 else None
        self.troubled_count = 0
        self.theta_max = 0.0
        self.hyperbolicity_count = 0

    def limit(self, state, t):
        cfg = self.config
        if cfg.scheme == "weno2d":
            return state  # damping happens on the reconstruction
        lim = cfg.limiters
        if cfg.scheme == "wenosg" and lim.enable_slope and cfg.k_xi >= 1:
            before = state
            state = slope_limit(state, self.basis, self.transform, lim)
            self.troubled_count += int(np.count_nonzero(
                np.any(before != state, axis=0)))
        return self.limit_hyperbolicity(state)

    def limit_hyperbolicity(self, state):
        """Admissibility damping alone; also applied to the initial data."""
        cfg = self.config
        if (cfg.scheme == "weno2d" or not cfg.limiters.enable_hyperbolicity
                or self.model.n_components == 1):
            return state
        state, theta = hyperbolicity_limit_field(
            state, self.basis, self.model, cfg.limiters.admissibility_eps
        )
        if theta.size:
            self.theta_max = max(self.theta_max, float(theta.max()))
            self.hyperbolicity_count += int(np.count_nonzero(theta))
        return state

    def viscosity(self, state, t):
        return global_viscosity(state, t, self.mesh, self.basis, self.model,
                                self.boundary, self.config.k_d,
                                self.config.scheme, self.config.limiters)

    def rhs(self, state, t, c):
        if self.config.scheme == "weno2d":
            out, n_damped = rhs_weno2d(state, t, self.mesh, self.basis, self.model,
                                       self.boundary, c, self.config.k_d,
                                       self.config.limiters)
            self.hyperbolicity_count += n_damped
            return out
        return rhs_wenosg(state, t, self.mesh, self.basis, self.model,
                          self.boundary, c, self.config.k_d)

    def step(self, state, t, dt, c):
        """One SSP step; each stage result is limited before further use."""
        def fe(u, tau):
            return u + dt * self.rhs(u, tau, c)

        if self.config.rk_order == 1:
            return self.limit(fe(state, t), t + dt)
        if self.config.rk_order == 2:
            u1 = self.limit(fe(state, t), t + dt)
            return self.limit(0.5 * state + 0.5 * fe(u1, t + dt), t + dt)
        u1 = self.limit(fe(state, t), t + dt)
        u2 = self.limit(0.75 * state + 0.25 * fe(u1, t + dt), t + 0.5 * dt)
        return self.limit(state / 3.0 + (2.0 / 3.0) * fe(u2, t + 0.5 * dt),
                          t + dt)


def step(state, dt, config: SolverConfig, mesh: Mesh, basis: MultiElementBasis,
         model: ConservationLaw, boundary: Boundary, t: float = 0.0):
    """Advance one time step; thin wrapper used by tests and drivers."""
    stepper = _Stepper(config, mesh, basis, model, boundary)
    c = stepper.viscosity(state, t)
    return stepper.step(state, t, dt, c)


def run(config: SolverConfig, model: ConservationLaw, initial_condition,
        mesh: Mesh, domain: RandomDomain | None = None,
        boundary: Boundary | None = None,
        basis: MultiElementBasis | None = None) -> RunResult:
    """Integrate an experiment to ``config.t_end``.

    The time step is cfl * dx / c with the global viscosity recomputed every
    step; the final step is clipped to land on ``t_end`` exactly.
    """
    started = time.perf_counter()
    if domain is None:
        domain = RandomDomain(-1.0, 1.0)
    if basis is None:
        basis = build_elements(domain, config.n_xi, config.k_xi)
    if boundary is None:
        boundary = Boundary.periodic()
    if config.scheme == "weno2d":
        state = initialize_means(initial_condition, mesh, basis, model)
    else:
        state = initialize(initial_condition, mesh, basis, model)
    stepper = _Stepper(config, mesh, basis, model, boundary)
    # only the admissibility limiter touches the initial projection; the
    # slope limiter acts on stage results
    state = stepper.limit_hyperbolicity(state)
    t = 0.0
    n_steps = 0
    while t < config.t_end - 1e-14:
        c = stepper.viscosity(state, t)
        dt = config.cfl * mesh.dx / max(c, 1e-300)
        dt = min(dt, config.t_end - t)
        state = stepper.step(state, t, dt, c)
        t += dt
        n_steps += 1
    if config.scheme == "weno2d":
        field, means = None, state
    else:
        field, means = state, state[0]
    return RunResult(
        field=field,
        means=means,
        mesh=mesh,
        basis=basis,
        t_end=config.t_end,
        n_steps=n_steps,
        scheme=config.scheme,
        troubled_count=stepper.troubled_count,
        theta_max=stepper.theta_max,
        hyperbolicity_count=stepper.hyperbolicity_count,
        wall_time=time.perf_counter() - started,
    )


def deterministic_solve(model: ConservationLaw, mesh: Mesh, xi_values,
                        initial_condition, t_end: float, k_d: int = 2,
                        cfl: float = 0.45, boundary_kind: str = "periodic",
                        dirichlet_values=None) -> np.ndarray:
    """Fixed-xi finite volume solves, vectorized over the xi samples.

    ``xi_values`` has shape (s,); the result is (s, n_cells, m).  Dirichlet
    data is supplied as ``dirichlet_values(t, x, xi)`` returning states.
    Each sample uses its own viscosity; the time step is shared and governed
    by the fastest sample.
    """
    xi = np.atleast_1d(np.asarray(xi_values, dtype=float))
    xq, wq = mesh.x_quadrature()
    vals = np.asarray(initial_condition(xq[None, :, :], xi[:, None, None]), dtype=float)
    if model.n_components == 1:
        vals = vals[..., None]
    vals = np.broadcast_to(vals, (xi.size,) + xq.shape + (model.n_components,))
    state = np.einsum("sxqm,q->sxm", vals, wq)
    rk_order = 3 if k_d == 2 else 1
    t = 0.0
    xi_col = xi[:, None]

    def pad(u, tau):
        if boundary_kind == "periodic":
            return np.concatenate([u[:, -N_GHOST:], u, u[:, :N_GHOST]], axis=1)
        left = [u[:, :1]] * N_GHOST
        right = [u[:, -1:]] * N_GHOST
        if boundary_kind == "dirichlet":
            xl = mesh.x_left - mesh.dx * (np.arange(N_GHOST)[::-1] + 0.5)
            xr = mesh.x_right + mesh.dx * (np.arange(N_GHOST) + 0.5)
            gl = np.asarray(dirichlet_values(tau, xl[None, :], xi_col), dtype=float)
            gr = np.asarray(dirichlet_values(tau, xr[None, :], xi_col), dtype=float)
            if model.n_components == 1:
                gl, gr = gl[..., None], gr[..., None]
            shape = (xi.size, N_GHOST, model.n_components)
            gl = np.broadcast_to(gl, shape)
            gr = np.broadcast_to(gr, shape)
            return np.concatenate([gl, u, gr], axis=1)
        return np.concatenate(left + [u] + right, axis=1)

    def rhs(u, tau, c):
        ext = pad(u, tau)
        rows = ext.transpose(0, 2, 1)  # (s, m, n + 4)
        um, up = traces_from_extended(rows, mesh.dx, k_d)
        um = um.transpose(0, 2, 1)
        up = up.transpose(0, 2, 1)
        _check_states(um, model, "deterministic traces")
        _check_states(up, model, "deterministic traces")
        flux = lax_friedrichs(um, up, xi_col, c[:, None], model)
        out = -(flux[:, 1:] - flux[:, :-1]) / mesh.dx
        if model.source is not None:
            src = np.asarray(
                model.source(tau, xq[None], xi[:, None, None]), dtype=float
            )
            out = out + np.einsum("sxqm,q->sxm", src, wq)
        return out

    while t < t_end - 1e-14:
        c = np.maximum(
            model.max_wavespeed(state, xi_col).max(axis=1), 1e-300
        )
        dt = min(cfl * mesh.dx / float(c.max()), t_end - t)
        if rk_order == 1:
            state = state + dt * rhs(state, t, c)
        else:
            u1 = state + dt * rhs(state, t, c)
            u2 = 0.75 * state + 0.25 * (u1 + dt * rhs(u1, t + dt, c))
            state = state / 3.0 + (2.0 / 3.0) * (u2 + dt * rhs(u2, t + 0.5 * dt, c))
        t += dt
    return state

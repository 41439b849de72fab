"""Error norms, total variations, convergence orders and references.

Total variations follow the convention: TV_x sums absolute increments of the
solution along an enumerated chain of per-cell Gauss-Lobatto x-nodes and
integrates the result against the conditional density of the reference
random element; TV_xi sums increments along a dense xi-chain on the
reference element and integrates over x with the cell width.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from typing import Callable

import numpy as np

from .models import ConservationLaw
from .solver import Mesh, Q_D, RunResult, deterministic_solve, quadrature
from .stochastic_basis import MultiElementBasis

__all__ = [
    "RunReport",
    "SolutionSampler",
    "x_sample_chain",
    "reference_element",
    "l1_error",
    "moment_l1",
    "tv_x",
    "tv_xi",
    "eoc",
    "pct_above",
    "reference_solution",
]

TV_XI_NODES = 1000  # dense xi-chain, matching the reported studies
TV_X_XI_NODES = 64  # quadrature nodes for the xi-integral of TV_x


@dataclass
class RunReport:
    """Flat diagnostics record for one run; arrays are per component."""

    scheme: str
    case: str = ""
    l1_mean: list = dataclass_field(default_factory=list)
    l1_var: list = dataclass_field(default_factory=list)
    tv_x: list = dataclass_field(default_factory=list)
    tv_xi: list = dataclass_field(default_factory=list)
    tv_x_reference: list = dataclass_field(default_factory=list)
    percentage_above_tv_x: list = dataclass_field(default_factory=list)
    eoc: list | None = None
    limiter_stats: dict = dataclass_field(default_factory=dict)
    wall_time: float = 0.0

    def as_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "case": self.case,
            "l1_mean": list(self.l1_mean),
            "l1_var": list(self.l1_var),
            "tv_x": list(self.tv_x),
            "tv_xi": list(self.tv_xi),
            "tv_x_reference": list(self.tv_x_reference),
            "percentage_above_tv_x": list(self.percentage_above_tv_x),
            "eoc": self.eoc,
            "limiter_stats": self.limiter_stats,
            "wall_time": self.wall_time,
        }


class SolutionSampler:
    """Evaluate a finished run at arbitrary (cell, xi) sample points.

    The numerical solution is piecewise constant in x (cell means are the
    carried quantity).  In xi it is the local gPC polynomial for the sG
    schemes and piecewise constant per element for the 2-D scheme.
    """

    def __init__(self, result: RunResult):
        self.result = result
        self.basis = result.basis
        self.mesh = result.mesh

    def at_cells(self, cells: np.ndarray, xi: np.ndarray) -> np.ndarray:
        """Values of shape (len(cells), len(xi), m)."""
        xi = np.asarray(xi, dtype=float)
        j = self.basis.element_of(xi)  # (s,)
        if self.result.field is None:
            return self.result.means[np.asarray(cells)[:, None], j[None, :], :]
        coeffs = self.result.field[:, np.asarray(cells)[:, None], j[None, :], :]
        phi = self.basis.basis_values(j, xi)  # (s, K+1)
        return np.einsum("kxsm,sk->xsm", coeffs, phi)

    def __call__(self, x, xi) -> np.ndarray:
        """Broadcast evaluation at physical coordinates."""
        x = np.asarray(x, dtype=float)
        cells = np.clip(
            ((x - self.mesh.x_left) / self.mesh.dx).astype(int),
            0, self.mesh.n_cells - 1,
        )
        flat = self.at_cells(cells.reshape(-1), np.asarray(xi).reshape(-1))
        return flat.reshape(x.shape + np.asarray(xi).shape + (flat.shape[-1],))


def x_sample_chain(mesh: Mesh) -> tuple[np.ndarray, np.ndarray]:
    """Enumerated chain of per-cell Lobatto nodes with owning cell indices.

    Interface nodes appear twice, once for each adjacent cell, so that jumps
    of piecewise data across interfaces are counted by consecutive
    differences while analytic fields contribute zero there.
    """
    nodes, _ = mesh.x_quadrature()  # (n_cells, Q_D + 1)
    cells = np.repeat(np.arange(mesh.n_cells), Q_D + 1)
    return nodes.reshape(-1), cells


def reference_element(basis: MultiElementBasis) -> tuple[float, float]:
    """Central interval of one element width, the TV evaluation window."""
    mid = 0.5 * (basis.domain.xi_left + basis.domain.xi_right)
    half = 0.5 * basis.element_width
    return mid - half, mid + half


def _sample_on_chain(solution, mesh, xi):
    """(n_chain, s, m) values of a sampler or plain callable on the chain."""
    x_pts, cells = x_sample_chain(mesh)
    if hasattr(solution, "at_cells"):
        return solution.at_cells(cells, xi)
    vals = np.asarray(solution(x_pts[:, None], xi[None, :]), dtype=float)
    if vals.ndim == 2:
        vals = vals[..., None]
    return vals


def tv_x(solution, mesh: Mesh, basis: MultiElementBasis,
         n_xi_nodes: int = TV_X_XI_NODES) -> np.ndarray:
    """Total variation in x, integrated against the conditional density.

    ``solution`` is a ``SolutionSampler`` or a callable ``u(x, xi)``.  The
    xi-integral runs over the reference element.  Returns one value per
    component.
    """
    rule = quadrature("gauss_legendre", n_xi_nodes, reference_element(basis))
    vals = _sample_on_chain(solution, mesh, rule.nodes)
    tv = np.abs(np.diff(vals, axis=0)).sum(axis=0)  # (s, m)
    return np.einsum("sm,s->m", tv, rule.weights)


def tv_xi(solution, mesh: Mesh, basis: MultiElementBasis,
          n_xi_nodes: int = TV_XI_NODES) -> np.ndarray:
    """Total variation in xi over the reference element, integrated in x."""
    lo, hi = reference_element(basis)
    chain = np.linspace(lo, hi, n_xi_nodes)
    if hasattr(solution, "at_cells"):
        vals = solution.at_cells(np.arange(mesh.n_cells), chain)
    else:
        vals = np.asarray(
            solution(mesh.centers[:, None], chain[None, :]), dtype=float
        )
        if vals.ndim == 2:
            vals = vals[..., None]
    tv = np.abs(np.diff(vals, axis=1)).sum(axis=1)  # (n_x, m)
    return mesh.dx * tv.sum(axis=0)


def moment_l1(mean_num, var_num, mean_ref, var_ref, dx: float):
    """Midpoint-rule L1 distances of mean and variance, per component."""
    mean_num = np.atleast_2d(np.asarray(mean_num, dtype=float).T).T
    mean_ref = np.atleast_2d(np.asarray(mean_ref, dtype=float).T).T
    var_num = np.atleast_2d(np.asarray(var_num, dtype=float).T).T
    var_ref = np.atleast_2d(np.asarray(var_ref, dtype=float).T).T
    l1_mean = dx * np.abs(mean_num - mean_ref).sum(axis=0)
    l1_var = dx * np.abs(var_num - var_ref).sum(axis=0)
    return l1_mean, l1_var


def l1_error(field, basis: MultiElementBasis, mesh: Mesh, reference):
    """L1 errors of mean and variance against a reference.

    ``reference`` is either a pair of arrays (mean, var) at cell centers or a
    callable ``u(x, xi)`` whose moments are computed with a dense per-element
    quadrature.  Returns (l1_mean, l1_var) per component.
    """
    field = np.asarray(field, dtype=float)
    mean_num, var_num = basis.moments(field)
    if callable(reference):
        mean_ref, var_ref = sampled_moments(reference, mesh, basis)
    else:
        mean_ref, var_ref = reference
    return moment_l1(mean_num, var_num, mean_ref, var_ref, mesh.dx)


def sampled_moments(u, mesh: Mesh, basis: MultiElementBasis,
                    n_nodes: int = 16):
    """Mean and variance of ``u(x, xi)`` at cell centers by quadrature."""
    rule = quadrature("gauss_legendre", n_nodes, (-1.0, 1.0))
    mids = 0.5 * (basis.edges[:-1] + basis.edges[1:])
    xi = mids[:, None] + 0.5 * basis.element_width * rule.nodes[None, :]
    vals = np.asarray(u(mesh.centers[:, None, None], xi[None, :, :]), dtype=float)
    if vals.ndim == 3:
        vals = vals[..., None]
    p = basis.element_probabilities
    mean = np.einsum("xjqm,q,j->xm", vals, rule.weights, p)
    second = np.einsum("xjqm,q,j->xm", vals**2, rule.weights, p)
    return mean, np.maximum(second - mean**2, 0.0)


def eoc(errors, resolutions) -> list[float]:
    """Experimental orders of convergence from an error sequence.

    ``resolutions`` are cell counts (mesh widths h = 1/N); the i-th order is
    log(e_{i-1}/e_i) / log(N_i/N_{i-1}).
    """
    errors = np.asarray(errors, dtype=float)
    res = np.asarray(resolutions, dtype=float)
    if len(errors) != len(res) or len(errors) < 2:
        raise ValueError("need matching error/resolution sequences of length >= 2")
    if np.any(errors <= 0.0):
        raise ValueError("orders are undefined for non-positive errors")
    if np.any(np.diff(res) <= 0.0):
        raise ValueError("resolutions must be strictly increasing")
    return list(np.log(errors[:-1] / errors[1:]) / np.log(res[1:] / res[:-1]))


def pct_above(tv: np.ndarray, tv_ref: np.ndarray) -> np.ndarray:
    """Percentage by which a total variation exceeds its reference."""
    return 100.0 * (np.asarray(tv, dtype=float) / np.asarray(tv_ref, dtype=float) - 1.0)


def reference_solution(model: ConservationLaw, mesh: Mesh, xi_nodes,
                       initial_condition, t_end: float, refine: int = 4,
                       k_d: int = 2, cfl: float = 0.45,
                       boundary_kind: str = "periodic",
                       dirichlet_values=None):
    """Deterministic fine-grid solves per xi node, restricted to the mesh.

    Solves on a ``refine`` times finer mesh (vectorized over the nodes) and
    averages blocks of fine cells back onto the run mesh.  Returns an array
    of shape (len(xi_nodes), mesh.n_cells, m).
    """
    fine = Mesh(mesh.x_left, mesh.x_right, mesh.n_cells * refine)
    states = deterministic_solve(
        model, fine, xi_nodes, initial_condition, t_end, k_d=k_d, cfl=cfl,
        boundary_kind=boundary_kind, dirichlet_values=dirichlet_values,
    )
    s, n_fine, m = states.shape
    return states.reshape(s, mesh.n_cells, refine, m).mean(axis=2)


class ReferenceSampler:
    """Piecewise-constant sampler over precomputed per-node reference solves.

    The xi nodes must contain every xi at which the sampler is later
    evaluated; lookups snap to the nearest node and refuse mismatches.
    """

    def __init__(self, states: np.ndarray, xi_nodes, mesh: Mesh):
        self.states = np.asarray(states, dtype=float)
        self.xi_nodes = np.asarray(xi_nodes, dtype=float)
        self.mesh = mesh

    def at_cells(self, cells, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        idx = np.argmin(np.abs(self.xi_nodes[None, :] - xi[:, None]), axis=1)
        if not np.allclose(self.xi_nodes[idx], xi, atol=1e-12, rtol=0.0):
            raise ValueError("xi samples do not match the reference nodes")
        return self.states[idx][:, np.asarray(cells), :].transpose(1, 0, 2)


def tv_x_reference(model, mesh, basis, initial_condition, t_end,
                   n_xi_nodes: int = TV_X_XI_NODES, refine: int = 4,
                   k_d: int = 2, cfl: float = 0.45,
                   boundary_kind: str = "periodic", dirichlet_values=None):
    """TV_x of a sampled deterministic reference on the reference element."""
    rule = quadrature("gauss_legendre", n_xi_nodes, reference_element(basis))
    states = reference_solution(
        model, mesh, rule.nodes, initial_condition, t_end, refine=refine,
        k_d=k_d, cfl=cfl, boundary_kind=boundary_kind,
        dirichlet_values=dirichlet_values,
    )
    sampler = ReferenceSampler(states, rule.nodes, mesh)
    return tv_x(sampler, mesh, basis, n_xi_nodes=n_xi_nodes), sampler

"""Conservation-law definitions and analytic reference solutions.

States are arrays with the component axis last, so every callable is
vectorized over arbitrary leading axes.  ``xi`` broadcasts against those
leading axes.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .stochastic_basis import legendre_values, quadrature

__all__ = [
    "UnrecoverableStateError",
    "ConservationLaw",
    "advection_model",
    "burgers_model",
    "euler_model",
    "euler_pressure",
    "advection_sg_matrix",
    "advection_analytic_sg",
    "advection_exact_sample",
    "burgers_exact_modes",
    "burgers_exact_sample",
    "euler_manufactured",
    "euler_manufactured_source",
    "euler_sod_initial",
]


class UnrecoverableStateError(RuntimeError):
    """A state left the admissible set and the scheme cannot continue."""


@dataclass(frozen=True)
class ConservationLaw:
    """Flux, wavespeed bound and admissibility predicate of one model."""

    name: str
    n_components: int
    flux: Callable[[np.ndarray, np.ndarray], np.ndarray]
    max_wavespeed: Callable[[np.ndarray, np.ndarray], np.ndarray]
    admissible: Callable[[np.ndarray], np.ndarray]
    source: Optional[Callable[[float, np.ndarray, np.ndarray], np.ndarray]] = None


def advection_model() -> ConservationLaw:
    """Linear advection with uncertain wave speed a(xi) = 1.5 + 0.5 xi."""

    def flux(u, xi):
        a = 1.5 + 0.5 * np.asarray(xi)
        return np.asarray(u) * a[..., None]

    def max_wavespeed(u, xi):
        a = np.abs(1.5 + 0.5 * np.asarray(xi))
        return np.broadcast_to(a, np.asarray(u).shape[:-1]).copy()

    def admissible(u):
        return np.ones(np.asarray(u).shape[:-1], dtype=bool)

    return ConservationLaw("advection", 1, flux, max_wavespeed, admissible)


def burgers_model() -> ConservationLaw:
    def flux(u, xi):
        u = np.asarray(u)
        return 0.5 * u * u

    def max_wavespeed(u, xi):
        return np.abs(np.asarray(u))[..., 0]

    def admissible(u):
        return np.ones(np.asarray(u).shape[:-1], dtype=bool)

    return ConservationLaw("burgers", 1, flux, max_wavespeed, admissible)


def euler_pressure(u, gamma: float = 1.4) -> np.ndarray:
    """p = (gamma - 1)(E - m^2 / (2 rho)); rho must be nonzero."""
    u = np.asarray(u)
    rho, m, energy = u[..., 0], u[..., 1], u[..., 2]
    return (gamma - 1.0) * (energy - 0.5 * m * m / rho)


def euler_model(gamma: float = 1.4) -> ConservationLaw:
    """1-D compressible Euler equations for an ideal gas."""
    if not gamma > 1.0:
        raise ValueError(f"adiabatic constant must exceed 1, got {gamma}")

    def admissible(u):
        u = np.asarray(u)
        rho = u[..., 0]
        ok = rho > 0.0
        p = np.where(ok, euler_pressure(np.where(ok[..., None], u, 1.0), gamma), -1.0)
        return ok & (p > 0.0)

    def _check(u):
        bad = ~admissible(u)
        if np.any(bad):
            idx = tuple(int(i) for i in np.argwhere(bad)[0])
            raise UnrecoverableStateError(
                f"inadmissible Euler state at index {idx}: "
                f"{np.asarray(u)[idx]}"
            )

    def flux(u, xi):
        _check(u)
        u = np.asarray(u)
        rho, m, energy = u[..., 0], u[..., 1], u[..., 2]
        p = euler_pressure(u, gamma)
        v = m / rho
        return np.stack([m, m * v + p, (energy + p) * v], axis=-1)

    def max_wavespeed(u, xi):
        _check(u)
        u = np.asarray(u)
        rho, m = u[..., 0], u[..., 1]
        p = euler_pressure(u, gamma)
        return np.abs(m / rho) + np.sqrt(gamma * p / rho)

    return ConservationLaw("euler", 3, flux, max_wavespeed, admissible)


def advection_sg_matrix(k: int) -> np.ndarray:
    """Galerkin matrix A[l, m] = E[a(xi) phi_l phi_m] on the global basis."""
    rule = quadrature("gauss_legendre", k + 2, (-1.0, 1.0))
    phi = legendre_values(k, rule.nodes)  # (Q, K+1)
    a = 1.5 + 0.5 * rule.nodes
    mat = np.einsum("q,ql,qm,q->lm", a, phi, phi, rule.weights)
    return 0.5 * (mat + mat.T)


def advection_analytic_sg(t: float, x, k: int) -> np.ndarray:
    """Exact solution of the projected advection system by characteristics.

    Initial data is the Riemann step (1 for x <= 0.5) in the mean mode and
    constant inflow (1, 0, ..., 0) at x = 0.  Returns the coefficient vectors
    with shape x.shape + (k + 1,).
    """
    x = np.asarray(x, dtype=float)
    a = advection_sg_matrix(k)
    lam, tmat = np.linalg.eigh(a)
    # W = T^T U; initial W_j(x) = T[0, j] * step(x), boundary W_j = T[0, j]
    foot = x[..., None] - lam * t  # x.shape + (K+1,)
    w = np.where(foot >= 0.0, np.where(foot <= 0.5, 1.0, 0.0), 1.0)
    w = tmat[0, :] * w
    return np.einsum("lj,...j->...l", tmat, w)


def advection_exact_sample(t: float, x, xi) -> np.ndarray:
    """Pointwise exact Riemann advection solution, 1 behind the jump."""
    x = np.asarray(x, dtype=float)
    a = 1.5 + 0.5 * np.asarray(xi)
    return np.where(x - a * t <= 0.5, 1.0, 0.0)


def burgers_exact_modes(t: float, x, c1: float = 1.0, c2: float = 1.0):
    """Exact stochastic modes of the Burgers sG system on [0, 1] for t < 1."""
    if t >= 1.0 - 1e-14:
        raise ValueError(f"exact Burgers modes are singular at t = 1, got t={t}")
    x = np.asarray(x, dtype=float)
    u0 = x / (t - 1.0)
    u1 = np.full_like(x, c1 / (2.0 * t - 2.0))
    u2 = np.full_like(x, c2 / (2.0 * t - 2.0))
    return u0, u1, u2


def burgers_exact_sample(t: float, x, xi, c1: float = 1.0, c2: float = 1.0):
    """Evaluate the exact Burgers gPC solution at (x, xi)."""
    u0, u1, u2 = burgers_exact_modes(t, x, c1, c2)
    phi = legendre_values(2, np.asarray(xi, dtype=float))
    return u0 * phi[..., 0] + u1 * phi[..., 1] + u2 * phi[..., 2]


def euler_manufactured(t: float, x, xi) -> np.ndarray:
    """Smooth manufactured Euler state, shape broadcast(x, xi) + (3,)."""
    phase = np.pi * (np.asarray(x, dtype=float) - np.asarray(xi) * t)
    rho = 1.0 + 0.1 * np.cos(phase)
    v = 1.0 + 0.1 * np.sin(phase)
    return np.stack([rho, rho * v, rho * rho], axis=-1)


def euler_manufactured_source(t: float, x, xi, gamma: float = 1.4) -> np.ndarray:
    """Source making the manufactured state an exact Euler solution.

    The state depends on (x, t) only through phase = pi (x - xi t), so
    d/dt = -xi d/dx and S = pi (f'(phase) - xi u'(phase)).
    """
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    phase = np.pi * (x - xi * t)
    c, s = np.cos(phase), np.sin(phase)
    rho = 1.0 + 0.1 * c
    v = 1.0 + 0.1 * s
    drho = -0.1 * s
    dv = 0.1 * c
    dm = drho * v + rho * dv
    de = 2.0 * rho * drho
    dp = (gamma - 1.0) * (2.0 * rho * drho - 0.5 * (drho * v * v + 2.0 * rho * v * dv))
    energy = rho * rho
    p = (gamma - 1.0) * (energy - 0.5 * rho * v * v)
    df1 = dm
    df2 = drho * v * v + 2.0 * rho * v * dv + dp
    df3 = (de + dp) * v + (energy + p) * dv
    du = np.stack([drho, dm, de], axis=-1)
    df = np.stack([df1, df2, df3], axis=-1)
    return np.pi * (df - xi[..., None] * du)


def euler_sod_initial(x, xi) -> np.ndarray:
    """Sod-type shock tube with an uncertain interface at x = 0.5 + 0.05 xi."""
    x = np.asarray(x, dtype=float)
    left = x < 0.5 + 0.05 * np.asarray(xi)
    rho = np.where(left, 1.0, 0.125)
    m = np.zeros_like(rho)
    energy = np.where(left, 0.25, 2.5)
    return np.stack([rho, m, energy], axis=-1)

"""Stochastic slope limiter and hyperbolicity (admissibility) limiter.

Fields use the canonical layout (degree + 1, n_x, n_elements, n_components).
All limiter passes preserve element means bit-exactly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .models import ConservationLaw, UnrecoverableStateError, euler_pressure
from .stochastic_basis import MonomialTransform, MultiElementBasis

__all__ = [
    "LimiterConfig",
    "minmod",
    "troubled_cell",
    "slope_limit",
    "compute_tvbm_M",
    "is_admissible",
    "hyperbolicity_limit",
    "hyperbolicity_limit_field",
]


@dataclass
class LimiterConfig:
    tvbm_M: float = 0.0
    admissibility_eps: float = 1e-10
    enable_slope: bool = True
    enable_hyperbolicity: bool = False

    def __post_init__(self):
        if self.tvbm_M < 0.0:
            raise ValueError(f"tvbm_M must be non-negative, got {self.tvbm_M}")
        if self.admissibility_eps <= 0.0:
            raise ValueError(
                f"admissibility_eps must be positive, got {self.admissibility_eps}"
            )


def minmod(a, b, c):
    """Smallest-magnitude argument if all three share a sign, else zero."""
    a, b, c = np.broadcast_arrays(a, b, c)
    pos = (a > 0) & (b > 0) & (c > 0)
    neg = (a < 0) & (b < 0) & (c < 0)
    m = np.minimum(np.minimum(np.abs(a), np.abs(b)), np.abs(c))
    out = np.where(pos, m, np.where(neg, -m, 0.0))
    # return the argument itself (not a recomputed magnitude) so repeated
    # applications are exact
    for arg in (a, b, c):
        hit = (np.abs(arg) == m) & (pos | neg)
        out = np.where(hit, arg, out)
    return out if out.shape else float(out)


def _limiter_core(field: np.ndarray, transform: MonomialTransform,
                  config: LimiterConfig, element_width: float):
    """Monomial slope, its minmod and the troubled-cell mask for a field."""
    mono = transform.to_monomial(field)
    slope = mono[1]
    means = field[0]  # (n_x, n_elements, m)
    padded = np.concatenate([means[:, :1], means, means[:, -1:]], axis=1)
    d_plus = padded[:, 2:] - padded[:, 1:-1]
    d_minus = padded[:, 1:-1] - padded[:, :-2]
    limited_slope = minmod(slope, d_plus, d_minus)
    tc = limited_slope != slope
    if field.shape[0] - 1 >= 2:
        tc &= np.abs(slope) >= config.tvbm_M * element_width**2
    return mono, limited_slope, tc


def troubled_cell(u_element: np.ndarray, mean_left: np.ndarray,
                  mean_right: np.ndarray, transform: MonomialTransform,
                  config: LimiterConfig, element_width: float = 2.0):
    """Troubled-cell indicator for one element block, per component.

    ``u_element`` has shape (degree + 1, m) (or (degree + 1,) for scalars).
    """
    u = np.asarray(u_element, dtype=float)
    squeeze = u.ndim == 1
    if squeeze:
        u = u[:, None]
    field = u[:, None, None, :]  # (K+1, 1 cell, 1 element, m)
    mono = transform.to_monomial(field)
    if field.shape[0] - 1 < 1:
        tc = np.zeros(field.shape[-1], dtype=bool)
        return bool(tc[0]) if squeeze else tc
    slope = mono[1, 0, 0]
    d_plus = np.asarray(mean_right, dtype=float) - field[0, 0, 0]
    d_minus = field[0, 0, 0] - np.asarray(mean_left, dtype=float)
    limited = minmod(slope, d_plus, d_minus)
    tc = np.asarray(limited != slope)
    if field.shape[0] - 1 >= 2:
        tc &= np.abs(slope) >= config.tvbm_M * element_width**2
    return bool(tc.reshape(-1)[0]) if squeeze else tc


def slope_limit(field: np.ndarray, basis: MultiElementBasis,
                transform: MonomialTransform, config: LimiterConfig) -> np.ndarray:
    """Minmod slope limiter in the stochastic direction.

    Troubled elements keep their mean, the linear monomial coefficient is
    replaced by the minmod of neighbor mean differences and higher monomials
    are dropped.  Untroubled elements pass through unchanged.
    """
    field = np.asarray(field, dtype=float)
    if field.shape[0] - 1 < 1 or not config.enable_slope:
        return field
    mono, limited_slope, tc = _limiter_core(
        field, transform, config, basis.element_width
    )
    mono_lim = np.zeros_like(mono)
    mono_lim[0] = field[0]
    mono_lim[1] = limited_slope
    lim = transform.from_monomial(mono_lim)
    lim[0] = field[0]
    return np.where(tc[None], lim, field)


def compute_tvbm_M(initial_condition, x_domain: tuple[float, float],
                   xi_domain: tuple[float, float], n_samples: int = 201) -> float:
    """TVBM constant: sup of |d2u/dxi2| over stationary points of du/dxi.

    The initial condition is sampled on a dense (x, xi) grid; stationary
    points are located by strict sign changes of the central-difference
    xi-derivative or by the derivative vanishing outright.  Jumps produce a
    large derivative and are therefore not counted as stationary.
    """
    x = np.linspace(*x_domain, n_samples)
    xi = np.linspace(*xi_domain, n_samples)
    u = np.asarray(initial_condition(x[:, None], xi[None, :]), dtype=float)
    if u.ndim == 2:
        u = u[..., None]
    h = xi[1] - xi[0]
    du = (u[:, 2:] - u[:, :-2]) / (2.0 * h)
    d2u = (u[:, 2:] - 2.0 * u[:, 1:-1] + u[:, :-2]) / (h * h)
    scale = np.max(np.abs(u)) + 1.0
    flat = np.abs(du) <= 1e-10 * scale
    m_best = 0.0
    vals = np.abs(d2u)[flat]
    if vals.size:
        m_best = float(vals.max())
    sign_change = du[:, :-1] * du[:, 1:] < 0.0
    if np.any(sign_change):
        pair = np.maximum(np.abs(d2u)[:, :-1], np.abs(d2u)[:, 1:])
        m_best = max(m_best, float(pair[sign_change].max()))
    return m_best


def is_admissible(state: np.ndarray, model: ConservationLaw, eps: float):
    """Admissibility with margin: scalar models pass; Euler needs rho, p >= eps."""
    state = np.asarray(state, dtype=float)
    if model.n_components == 1:
        return np.ones(state.shape[:-1], dtype=bool)
    rho = state[..., 0]
    ok = rho >= eps
    safe = np.where(ok[..., None], state, [[1.0, 0.0, 1.0]])
    p = euler_pressure(safe)
    return ok & (p >= eps)


def _bisect_theta(mean: np.ndarray, nodes: np.ndarray, model: ConservationLaw,
                  eps: float, tol: float = 1e-10) -> np.ndarray:
    """Smallest theta in [0, 1] making mean + (1-theta)(nodes - mean) admissible.

    ``mean``: (n, m); ``nodes``: (n, q, m).  Bisection keeps ``hi`` admissible
    and ``lo`` inadmissible throughout.
    """
    n = mean.shape[0]
    lo = np.zeros(n)
    hi = np.ones(n)
    dev = nodes - mean[:, None, :]
    while np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        trial = mean[:, None, :] + (1.0 - mid)[:, None, None] * dev
        ok = is_admissible(trial, model, eps).all(axis=1)
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    return hi


def hyperbolicity_limit_field(field: np.ndarray, basis: MultiElementBasis,
                              model: ConservationLaw, eps: float):
    """Damp higher modes so all element node states become admissible.

    Returns the limited field and the per-cell theta array of shape
    (n_x, n_elements).  Raises ``UnrecoverableStateError`` when an element
    mean itself is inadmissible.
    """
    field = np.asarray(field, dtype=float)
    # admissibility is enforced at the flux nodes and the element endpoints,
    # where Gibbs undershoots are largest
    phi = basis.phi_at_check_nodes  # (q + 2, K+1)
    nodes = np.einsum("kxjm,qk->xjqm", field, phi)
    ok = is_admissible(nodes, model, eps).all(axis=2)  # (n_x, n_elements)
    theta = np.zeros(ok.shape)
    if np.all(ok):
        return field, theta
    mean = field[0]
    bad_mean = ~is_admissible(mean, model, eps)
    if np.any(bad_mean):
        i, j = np.argwhere(bad_mean)[0]
        raise UnrecoverableStateError(
            f"element mean inadmissible at cell {i}, element {j}: {mean[i, j]}"
        )
    flag = ~ok
    th = _bisect_theta(mean[flag], nodes[flag], model, eps)
    theta[flag] = th
    scale = np.ones_like(theta)
    scale[flag] = 1.0 - th
    out = field.copy()
    out[1:] *= scale[None, :, :, None]
    return out, theta


def hyperbolicity_limit(coeffs: np.ndarray, basis: MultiElementBasis,
                        model: ConservationLaw, eps: float):
    """Single-element form: limit one coefficient block (degree + 1, m)."""
    coeffs = np.asarray(coeffs, dtype=float)
    field = coeffs[:, None, None, :]
    out, theta = hyperbolicity_limit_field(field, basis, model, eps)
    return out[:, 0, 0, :], float(theta[0, 0])

"""Third-order CWENOZ reconstruction from cell means.

One-dimensional kernels reconstruct a parabola per cell in the local
coordinate X = (x - x_i) / dx, X in [-1/2, 1/2].  The two-dimensional kernel
works on 3 x 3 blocks of (x, xi)-cell means in local coordinates
(X, Y) in [-1/2, 1/2]^2 and produces a tensor-quadratic polynomial.

Linear weights: 1/2 for the central candidate, the remainder split evenly
over the one-sided candidates.  Smoothness indicators are of Jiang-Shu type,
the global indicator is tau = |beta_L - beta_R| (its symmetric corner
analogue in 2-D) and the regularization is eps = dx^2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ReconstructionPoly1D",
    "ReconstructionPoly2D",
    "cwenoz_1d",
    "cwenoz_batch_1d",
    "reconstruct_row",
    "cwenoz_2d",
    "cwenoz_batch_2d",
    "eval_poly2d",
    "POLY2D_EXPONENTS",
]

_D_CENTER = 0.5
_D_SIDE = 0.25
_D_CORNER = 0.125


@dataclass(frozen=True)
class ReconstructionPoly1D:
    """Parabola a + b X + c X^2 in the local cell coordinate."""

    coefficients: np.ndarray  # (a, b, c)
    cell: tuple[float, float]

    def __call__(self, x):
        lo, hi = self.cell
        t = (np.asarray(x) - 0.5 * (lo + hi)) / (hi - lo)
        a, b, c = self.coefficients
        return a + b * t + c * t * t

    @property
    def cell_average(self) -> float:
        a, _, c = self.coefficients
        return a + c / 12.0

    @property
    def left_trace(self) -> float:
        a, b, c = self.coefficients
        return a - 0.5 * b + 0.25 * c

    @property
    def right_trace(self) -> float:
        a, b, c = self.coefficients
        return a + 0.5 * b + 0.25 * c


def cwenoz_batch_1d(m_left, m_center, m_right, dx: float):
    """CWENOZ parabola coefficients from three consecutive cell means.

    Inputs broadcast elementwise; returns (a, b, c) arrays in the local
    coordinate of the center cell.
    """
    m_left = np.asarray(m_left, dtype=float)
    m_center = np.asarray(m_center, dtype=float)
    m_right = np.asarray(m_right, dtype=float)
    b_l = m_center - m_left
    b_r = m_right - m_center
    # for a parabola a + b X + c X^2 on X in [-1/2, 1/2] the mean second
    # difference equals 2c
    c_opt = 0.5 * (m_right - 2.0 * m_center + m_left)
    b_opt = 0.5 * (m_right - m_left)
    a_opt = m_center - c_opt / 12.0
    # central candidate P0 = (P_opt - d_L P_L - d_R P_R) / d_C
    a_0 = 2.0 * a_opt - m_center
    b_0 = b_opt
    c_0 = 2.0 * c_opt
    beta_l = b_l * b_l
    beta_r = b_r * b_r
    beta_0 = b_0 * b_0 + (13.0 / 3.0) * c_0 * c_0
    tau = np.abs(beta_l - beta_r)
    eps = dx * dx
    w_0 = _D_CENTER * (1.0 + tau / (beta_0 + eps))
    w_l = _D_SIDE * (1.0 + tau / (beta_l + eps))
    w_r = _D_SIDE * (1.0 + tau / (beta_r + eps))
    total = w_0 + w_l + w_r
    w_0, w_l, w_r = w_0 / total, w_l / total, w_r / total
    a = w_0 * a_0 + (w_l + w_r) * m_center
    b = w_0 * b_0 + w_l * b_l + w_r * b_r
    c = w_0 * c_0
    return a, b, c


def cwenoz_1d(stencil, dx: float, cell: tuple[float, float] | None = None) -> ReconstructionPoly1D:
    """Reconstruct the center cell of a three-cell stencil of means."""
    stencil = np.asarray(stencil, dtype=float)
    if stencil.shape != (3,):
        raise ValueError(f"expected 3 cell means, got shape {stencil.shape}")
    a, b, c = cwenoz_batch_1d(stencil[0], stencil[1], stencil[2], dx)
    if cell is None:
        cell = (-0.5 * dx, 0.5 * dx)
    return ReconstructionPoly1D(coefficients=np.array([a, b, c]), cell=cell)


def _pad_means(means: np.ndarray, boundary: str, n_ghost: int = 2) -> np.ndarray:
    """Extend the cell axis (last) by ghost cells."""
    if boundary == "periodic":
        return np.concatenate(
            [means[..., -n_ghost:], means, means[..., :n_ghost]], axis=-1
        )
    if boundary == "extrapolation":
        left = np.repeat(means[..., :1], n_ghost, axis=-1)
        right = np.repeat(means[..., -1:], n_ghost, axis=-1)
        return np.concatenate([left, means, right], axis=-1)
    raise ValueError(f"unknown boundary policy: {boundary!r}")


def traces_from_extended(means_ext: np.ndarray, dx: float, k_d: int):
    """Interface traces from means with two ghost cells on each side.

    ``means_ext`` has the cell axis last with n + 4 entries for n interior
    cells.  Returns (u_minus, u_plus), each with n + 1 interface values.
    ``k_d`` = 0 gives piecewise-constant traces, ``k_d`` = 2 the CWENOZ ones.
    """
    n_ext = means_ext.shape[-1]
    if k_d == 0:
        return means_ext[..., 1:n_ext - 2], means_ext[..., 2:n_ext - 1]
    a, b, c = cwenoz_batch_1d(
        means_ext[..., :-2], means_ext[..., 1:-1], means_ext[..., 2:], dx
    )
    right = a + 0.5 * b + 0.25 * c  # right edge of each reconstructed cell
    left = a - 0.5 * b + 0.25 * c
    return right[..., :-1], left[..., 1:]


def reconstruct_row(means: np.ndarray, dx: float, boundary: str = "periodic",
                    k_d: int = 2):
    """Reconstruct a full row of cells and return its interface traces.

    ``means`` holds at least three interior cell means on the last axis.
    Ghost data follows the named boundary policy.  Returns (u_minus, u_plus)
    with one more entry than cells.
    """
    means = np.asarray(means, dtype=float)
    if means.shape[-1] < 3:
        raise ValueError(f"need at least 3 cells, got {means.shape[-1]}")
    ext = _pad_means(means, boundary)
    return traces_from_extended(ext, dx, k_d)


# ---------------------------------------------------------------------------
# genuinely two-dimensional reconstruction

# tensor-quadratic basis X^r Y^s, exponent pairs in fixed order
POLY2D_EXPONENTS = [(r, s) for s in range(3) for r in range(3)]

# 1-D map from three cell means to parabola coefficients (a, b, c)
_T1 = np.array([
    [-1.0 / 24.0, 13.0 / 12.0, -1.0 / 24.0],
    [-0.5, 0.0, 0.5],
    [0.5, -1.0, 0.5],
])


def _smoothness_matrix() -> np.ndarray:
    """Quadratic form B with beta = c^T B c for the tensor-quadratic basis."""
    nodes, weights = np.polynomial.legendre.leggauss(4)
    nodes = 0.5 * nodes
    weights = 0.5 * weights
    gx, gy = np.meshgrid(nodes, nodes, indexing="ij")
    wxy = np.outer(weights, weights).ravel()
    gx, gy = gx.ravel(), gy.ravel()

    def dval(r, s, ax, ay):
        # derivative of X^r Y^s of order (ax, ay) evaluated on the grid
        cr, rr = 1.0, r
        for _ in range(ax):
            cr *= rr
            rr -= 1
        cs, ss = 1.0, s
        for _ in range(ay):
            cs *= ss
            ss -= 1
        if rr < 0 or ss < 0:
            return np.zeros_like(gx)
        return cr * cs * gx**rr * gy**ss

    b = np.zeros((9, 9))
    for ax, ay in [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]:
        d = np.stack([dval(r, s, ax, ay) for r, s in POLY2D_EXPONENTS])
        b += np.einsum("ip,jp,p->ij", d, d, wxy)
    return b


_B2D = _smoothness_matrix()
_IDX = {e: i for i, e in enumerate(POLY2D_EXPONENTS)}


def cwenoz_batch_2d(blocks: np.ndarray, dx: float):
    """CWENOZ reconstruction of 3 x 3 blocks of (x, xi) cell means.

    ``blocks`` has shape (..., 3, 3) with the x offset on axis -2 and the xi
    offset on axis -1.  Returns coefficient arrays of shape (..., 9) in the
    ``POLY2D_EXPONENTS`` basis on the local unit square.
    """
    blocks = np.asarray(blocks, dtype=float)
    # central candidate: tensor-quadratic interpolant of all nine means
    c_opt = np.einsum("ri,...ij,sj->...rs", _T1, blocks, _T1)
    shape = blocks.shape[:-2]
    opt = np.zeros(shape + (9,))
    for (r, s), i in _IDX.items():
        opt[..., i] = c_opt[..., r, s]

    corners = []
    betas = []
    m00 = blocks[..., 1, 1]
    for sx, sy in [(-1, -1), (1, -1), (-1, 1), (1, 1)]:
        mx = blocks[..., 1 + sx, 1]
        my = blocks[..., 1, 1 + sy]
        mxy = blocks[..., 1 + sx, 1 + sy]
        cand = np.zeros(shape + (9,))
        cand[..., _IDX[(0, 0)]] = m00
        cand[..., _IDX[(1, 0)]] = sx * (mx - m00)
        cand[..., _IDX[(0, 1)]] = sy * (my - m00)
        cand[..., _IDX[(1, 1)]] = sx * sy * (mxy - mx - my + m00)
        corners.append(cand)
        betas.append(np.einsum("...i,ij,...j->...", cand, _B2D, cand))

    central = (opt - _D_CORNER * sum(corners)) / _D_CENTER
    beta_c = np.einsum("...i,ij,...j->...", central, _B2D, central)

    tau = 0.5 * (np.abs(betas[0] - betas[3]) + np.abs(betas[1] - betas[2]))
    eps = dx * dx
    w = [_D_CENTER * (1.0 + tau / (beta_c + eps))]
    w += [_D_CORNER * (1.0 + tau / (b + eps)) for b in betas]
    total = sum(w)
    coeffs = (w[0] / total)[..., None] * central
    for wi, cand in zip(w[1:], corners):
        coeffs += (wi / total)[..., None] * cand
    return coeffs


@dataclass(frozen=True)
class ReconstructionPoly2D:
    """Tensor-quadratic polynomial on one x-cell times one random element."""

    coefficients: np.ndarray  # (9,) in POLY2D_EXPONENTS order
    x_cell: tuple[float, float]
    xi_cell: tuple[float, float]

    def __call__(self, x, xi):
        xl, xh = self.x_cell
        yl, yh = self.xi_cell
        tx = (np.asarray(x) - 0.5 * (xl + xh)) / (xh - xl)
        ty = (np.asarray(xi) - 0.5 * (yl + yh)) / (yh - yl)
        return eval_poly2d(self.coefficients, tx, ty)

    @property
    def cell_average(self) -> float:
        c = self.coefficients
        return float(
            c[_IDX[(0, 0)]]
            + (c[_IDX[(2, 0)]] + c[_IDX[(0, 2)]]) / 12.0
            + c[_IDX[(2, 2)]] / 144.0
        )


def eval_poly2d(coeffs: np.ndarray, tx, ty):
    """Evaluate tensor-quadratic coefficients at local coordinates.

    ``coeffs`` has the basis axis last; ``tx`` and ``ty`` broadcast against
    its leading axes.
    """
    coeffs = np.asarray(coeffs)
    tx = np.asarray(tx, dtype=float)
    ty = np.asarray(ty, dtype=float)
    out = 0.0
    for (r, s), i in _IDX.items():
        out = out + coeffs[..., i] * tx**r * ty**s
    return out


def cwenoz_2d(block: np.ndarray, dx: float, dxi: float,
              x_cell: tuple[float, float] | None = None,
              xi_cell: tuple[float, float] | None = None) -> ReconstructionPoly2D:
    """Reconstruct the center cell of a 3 x 3 block of (x, xi) means."""
    block = np.asarray(block, dtype=float)
    if block.shape != (3, 3):
        raise ValueError(f"expected a 3x3 block, got shape {block.shape}")
    coeffs = cwenoz_batch_2d(block, dx)
    if x_cell is None:
        x_cell = (-0.5 * dx, 0.5 * dx)
    if xi_cell is None:
        xi_cell = (-0.5 * dxi, 0.5 * dxi)
    return ReconstructionPoly2D(coefficients=coeffs, x_cell=x_cell, xi_cell=xi_cell)

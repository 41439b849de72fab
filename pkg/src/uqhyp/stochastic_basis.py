"""Multi-element orthonormal polynomial bases and quadrature on the random domain.

The random variable xi is uniformly distributed on (xi_left, xi_right).  The
domain is split into equal-width elements, each carrying Legendre polynomials
orthonormalized with respect to the conditional density of the element.  All
objects are immutable after construction.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "RandomDomain",
    "QuadratureRule",
    "MonomialTransform",
    "MultiElementBasis",
    "build_elements",
    "quadrature",
    "legendre_values",
]


@dataclass(frozen=True)
class RandomDomain:
    """Interval of the random variable together with its probability law."""

    xi_left: float
    xi_right: float
    distribution: str = "uniform"

    def __post_init__(self):
        if not self.xi_left < self.xi_right:
            raise ValueError(
                f"invalid random domain: need xi_left < xi_right, "
                f"got [{self.xi_left}, {self.xi_right}]"
            )
        if self.distribution != "uniform":
            raise ValueError(f"unsupported distribution: {self.distribution!r}")

    @property
    def width(self) -> float:
        return self.xi_right - self.xi_left

    def density(self, xi):
        """Probability density, constant 1/width inside the domain."""
        xi = np.asarray(xi)
        inside = (xi >= self.xi_left) & (xi <= self.xi_right)
        return np.where(inside, 1.0 / self.width, 0.0)


def legendre_values(max_degree: int, t) -> np.ndarray:
    """Orthonormal Legendre polynomials on [-1, 1] w.r.t. the uniform density.

    Evaluates phi_0..phi_max_degree at the points ``t`` using the three-term
    recurrence; phi_k = sqrt(2k+1) P_k, so that
    int phi_k phi_l dt/2 = delta_kl.

    Returns an array of shape ``t.shape + (max_degree + 1,)``.
    """
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape + (max_degree + 1,))
    out[..., 0] = 1.0
    if max_degree >= 1:
        out[..., 1] = t
    for k in range(1, max_degree):
        out[..., k + 1] = ((2 * k + 1) * t * out[..., k] - k * out[..., k - 1]) / (k + 1)
    out *= np.sqrt(2.0 * np.arange(max_degree + 1) + 1.0)
    return out


def _gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def _gauss_lobatto(n: int) -> tuple[np.ndarray, np.ndarray]:
    # interior nodes are the roots of P'_{n-1}
    if n < 2:
        raise ValueError("gauss_lobatto needs at least 2 nodes")
    if n == 2:
        nodes = np.array([-1.0, 1.0])
    else:
        coeffs = np.zeros(n)
        coeffs[n - 1] = 1.0
        interior = np.polynomial.legendre.legroots(np.polynomial.legendre.legder(coeffs))
        nodes = np.concatenate(([-1.0], np.sort(interior), [1.0]))
    pnm1 = np.polynomial.legendre.legval(nodes, np.eye(n)[n - 1])
    weights = 2.0 / (n * (n - 1) * pnm1**2)
    return nodes, weights


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights on an interval; weights are scaled to sum to one."""

    nodes: np.ndarray
    weights: np.ndarray
    kind: str

    def integrate(self, values):
        """Weighted sum along the last axis."""
        return np.asarray(values) @ self.weights


def quadrature(kind: str, n_nodes: int, interval: tuple[float, float]) -> QuadratureRule:
    """Build a quadrature rule on ``interval`` with density-absorbing weights.

    The weights sum to exactly one, i.e. the rule integrates against the
    uniform conditional density of the interval.
    """
    a, b = interval
    if not a < b:
        raise ValueError(f"invalid interval [{a}, {b}]")
    if kind == "gauss_legendre":
        if n_nodes < 1:
            raise ValueError("gauss_legendre needs at least 1 node")
        t, w = _gauss_legendre(n_nodes)
    elif kind == "gauss_lobatto":
        if n_nodes < 2:
            raise ValueError("gauss_lobatto needs at least 2 nodes")
        t, w = _gauss_lobatto(n_nodes)
    else:
        raise ValueError(f"unknown quadrature kind: {kind!r}")
    nodes = 0.5 * (a + b) + 0.5 * (b - a) * t
    weights = w / w.sum()
    return QuadratureRule(nodes=nodes, weights=weights, kind=kind)


@dataclass(frozen=True)
class MonomialTransform:
    """Change of basis between orthonormal and monomial coefficients.

    ``forward`` is V with V[m, k] = int t^m phi_k(t) dt/2 on the reference
    element [-1, 1].  A function u = sum_k u_k phi_k = sum_m w_m t^m satisfies
    u = V^T w, so monomial coefficients are obtained with V^{-T}.
    """

    forward: np.ndarray
    inverse: np.ndarray

    def to_monomial(self, coeffs: np.ndarray) -> np.ndarray:
        """Orthonormal coefficients (first axis) to monomial coefficients."""
        return np.einsum("lk,k...->l...", self.inverse.T, coeffs)

    def from_monomial(self, mono: np.ndarray) -> np.ndarray:
        """Monomial coefficients (first axis) back to orthonormal ones."""
        return np.einsum("kl,l...->k...", self.forward.T, mono)


def _monomial_matrix(degree: int) -> np.ndarray:
    # quadrature exact up to degree 2K is required for V[m, k]
    rule = quadrature("gauss_legendre", degree + 1, (-1.0, 1.0))
    phi = legendre_values(degree, rule.nodes)  # (Q, K+1)
    powers = rule.nodes[:, None] ** np.arange(degree + 1)[None, :]  # (Q, K+1)
    v = np.einsum("qm,qk,q->mk", powers, phi, rule.weights)
    # V is lower triangular up to round-off; drop the noise so the limiter
    # transform preserves element means exactly
    v[np.abs(v) < 1e-14] = 0.0
    return v


@dataclass(frozen=True)
class MultiElementBasis:
    """Equal-width decomposition of the random domain with local bases.

    The local basis on element j is phi_{k,j}(xi) = phi_k(t) with
    t = 2 (xi - mid_j) / element_width, orthonormal with respect to the
    conditional (uniform) density of the element.
    """

    domain: RandomDomain
    n_elements: int
    degree: int
    edges: np.ndarray = field(repr=False)
    node_rule: QuadratureRule = field(repr=False)  # on the reference element

    @property
    def element_width(self) -> float:
        return self.domain.width / self.n_elements

    @property
    def element_probabilities(self) -> np.ndarray:
        return np.full(self.n_elements, 1.0 / self.n_elements)

    @property
    def n_nodes(self) -> int:
        return len(self.node_rule.nodes)

    @property
    def xi_nodes(self) -> np.ndarray:
        """Global quadrature nodes, shape (n_elements, n_nodes)."""
        mids = 0.5 * (self.edges[:-1] + self.edges[1:])
        return mids[:, None] + 0.5 * self.element_width * self.node_rule.nodes[None, :]

    @property
    def node_weights(self) -> np.ndarray:
        """Conditional-density weights shared by every element; sum to one."""
        return self.node_rule.weights

    @property
    def phi_at_nodes(self) -> np.ndarray:
        """Basis values at the element nodes, shape (n_nodes, degree + 1)."""
        return legendre_values(self.degree, self.node_rule.nodes)

    @property
    def check_nodes(self) -> np.ndarray:
        """Flux nodes plus the element endpoints, used for admissibility."""
        return np.concatenate([self.node_rule.nodes, [-1.0, 1.0]])

    @property
    def phi_at_check_nodes(self) -> np.ndarray:
        return legendre_values(self.degree, self.check_nodes)

    @property
    def xi_check_nodes(self) -> np.ndarray:
        """Global coordinates of the check nodes, shape (n_elements, n+2)."""
        mids = 0.5 * (self.edges[:-1] + self.edges[1:])
        return mids[:, None] + 0.5 * self.element_width * self.check_nodes[None, :]

    def element_of(self, xi) -> np.ndarray:
        """Index of the element containing each xi (boundary goes right)."""
        xi = np.asarray(xi)
        idx = np.floor((xi - self.domain.xi_left) / self.element_width).astype(int)
        return np.clip(idx, 0, self.n_elements - 1)

    def local_coord(self, j, xi) -> np.ndarray:
        mid = 0.5 * (self.edges[j] + self.edges[np.asarray(j) + 1])
        return 2.0 * (np.asarray(xi) - mid) / self.element_width

    def basis_values(self, j, xi) -> np.ndarray:
        """phi_{k,j}(xi) for k = 0..degree, shape xi.shape + (degree + 1,)."""
        return legendre_values(self.degree, self.local_coord(j, xi))

    def eval_basis(self, j: int, k: int, xi: float) -> float:
        if not 0 <= k <= self.degree:
            raise ValueError(f"degree {k} outside basis range 0..{self.degree}")
        t = self.local_coord(j, xi)
        if np.any(np.abs(t) > 1.0 + 1e-12):
            raise ValueError(f"xi={xi} outside element {j}")
        return legendre_values(self.degree, t)[..., k]

    def project(self, samples: np.ndarray, j: int | None = None) -> np.ndarray:
        """Project node samples onto the local basis of one element.

        ``samples`` carries the node axis first: shape (n_nodes, ...).  The
        result has shape (degree + 1, ...).  The element index is accepted for
        interface symmetry; the reference rule is shared by all elements.
        """
        samples = np.asarray(samples)
        if samples.shape[0] != self.n_nodes:
            raise ValueError(
                f"expected {self.n_nodes} node samples, got {samples.shape[0]}"
            )
        return np.einsum(
            "q...,qk,q->k...", samples, self.phi_at_nodes, self.node_weights
        )

    def evaluate(self, coeffs: np.ndarray, j, xi) -> np.ndarray:
        """Evaluate sum_k coeffs[k] phi_{k,j}(xi)."""
        phi = self.basis_values(j, xi)  # xi.shape + (K+1,)
        return np.tensordot(phi, np.asarray(coeffs), axes=([-1], [0]))

    def moments(self, coeffs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Mean and variance of a coefficient tensor.

        ``coeffs`` has shape (degree + 1, ..., n_elements, ...trailing) where
        the element axis follows the middle dimensions; the canonical field
        layout is (degree + 1, n_x, n_elements, n_components).  A 1-D vector
        of length degree + 1 is treated as a single-element field.
        """
        coeffs = np.asarray(coeffs)
        if coeffs.ndim == 1:
            coeffs = coeffs[:, None, None, None]
        elif coeffs.ndim == 2:  # (K+1, n_elements)
            coeffs = coeffs[:, None, :, None]
        elif coeffs.ndim == 3:  # (K+1, n_x, n_elements)
            coeffs = coeffs[..., None]
        p = self.element_probabilities
        mean = np.einsum("xjm,j->xm", coeffs[0], p)
        second = np.einsum("kxjm,j->xm", coeffs**2, p)
        var = second - mean**2
        return np.squeeze(mean), np.squeeze(np.maximum(var, 0.0))

    def monomial_transform(self, j: int | None = None) -> MonomialTransform:
        """Transform between the local orthonormal and monomial bases.

        Identical for every element because the conditional density maps to
        the same reference element.
        """
        v = _monomial_matrix(self.degree)
        inv = np.linalg.inv(v)
        # V is exactly lower triangular, so its inverse is too; drop solver
        # noise above the diagonal to keep the limiter round trip exact
        inv[np.triu_indices(self.degree + 1, 1)] = 0.0
        return MonomialTransform(forward=v, inverse=inv)


def build_elements(domain: RandomDomain, n: int, degree: int) -> MultiElementBasis:
    """Decompose the domain into ``n`` equal elements with degree-``degree`` bases."""
    if n < 1:
        raise ValueError(f"need at least one element, got {n}")
    if degree < 0:
        raise ValueError(f"degree must be non-negative, got {degree}")
    edges = np.linspace(domain.xi_left, domain.xi_right, n + 1)
    # the element rule doubles as the flux quadrature; degree + 1 Gauss points
    # integrate polynomials up to 2*degree + 1, and at least 3 points keep the
    # flux projection accurate for low degrees
    rule = quadrature("gauss_legendre", max(degree + 1, 3), (-1.0, 1.0))
    return MultiElementBasis(
        domain=domain, n_elements=n, degree=degree, edges=edges, node_rule=rule
    )

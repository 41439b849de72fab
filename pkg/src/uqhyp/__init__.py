"""Solver toolkit for 1-D hyperbolic conservation laws with one uniform random parameter.

Multi-element stochastic Galerkin with a stochastic slope limiter (WENOsG),
a genuinely two-dimensional WENO scheme in (x, xi), analytic reference
solutions and oscillation diagnostics.
"""

from .stochastic_basis import (
    RandomDomain,
    MultiElementBasis,
    QuadratureRule,
    MonomialTransform,
    build_elements,
    quadrature,
)
from .models import (
    ConservationLaw,
    advection_model,
    burgers_model,
    euler_model,
    UnrecoverableStateError,
)
from .solver import Mesh, SolverConfig, Boundary, run
from .limiters import LimiterConfig

__all__ = [
    "RandomDomain",
    "MultiElementBasis",
    "QuadratureRule",
    "MonomialTransform",
    "build_elements",
    "quadrature",
    "ConservationLaw",
    "advection_model",
    "burgers_model",
    "euler_model",
    "UnrecoverableStateError",
    "Mesh",
    "SolverConfig",
    "Boundary",
    "LimiterConfig",
    "run",
]

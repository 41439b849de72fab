import numpy as np
import pytest

from uqhyp.diagnostics import (
    RunReport,
    SolutionSampler,
    eoc,
    l1_error,
    moment_l1,
    pct_above,
    reference_element,
    reference_solution,
    sampled_moments,
    tv_x,
    tv_xi,
    x_sample_chain,
)
from uqhyp.models import advection_model
from uqhyp.solver import Mesh, Q_D, RunResult, initialize
from uqhyp.stochastic_basis import RandomDomain, build_elements

DOMAIN = RandomDomain(-1.0, 1.0)


def make_result(u0, n_x=10, n_xi=2, k_xi=2):
    basis = build_elements(DOMAIN, n_xi, k_xi)
    mesh = Mesh(0.0, 1.0, n_x)
    field = initialize(u0, mesh, basis, advection_model())
    return RunResult(field=field, means=field[0], mesh=mesh, basis=basis,
                     t_end=0.0, n_steps=0, scheme="wenosg")


def test_x_sample_chain_duplicates_interfaces():
    mesh = Mesh(0.0, 1.0, 5)
    pts, cells = x_sample_chain(mesh)
    assert pts.shape == (5 * (Q_D + 1),)
    assert np.array_equal(cells, np.repeat(np.arange(5), Q_D + 1))
    # last node of one cell and first node of the next share the interface
    assert pts[Q_D] == pytest.approx(pts[Q_D + 1])


def test_reference_element_is_central():
    basis = build_elements(DOMAIN, 4, 2)
    lo, hi = reference_element(basis)
    assert lo == pytest.approx(-0.25)
    assert hi == pytest.approx(0.25)


def test_tv_x_of_analytic_step():
    # a single jump of height one has TV_x exactly 1 for every xi
    basis = build_elements(DOMAIN, 3, 2)
    mesh = Mesh(0.0, 1.0, 20)
    u = lambda x, xi: np.where(x < 0.43, 1.0, 0.0) + 0.0 * xi  # noqa: E731
    tv = tv_x(u, mesh, basis)
    assert tv[0] == pytest.approx(1.0, abs=1e-12)


def test_tv_x_of_smooth_profile():
    # u = sin(2 pi x): |u|_TV over one period is 4
    basis = build_elements(DOMAIN, 2, 2)
    mesh = Mesh(0.0, 1.0, 50)
    u = lambda x, xi: np.sin(2.0 * np.pi * x) + 0.0 * xi  # noqa: E731
    tv = tv_x(u, mesh, basis)
    assert tv[0] == pytest.approx(4.0, rel=1e-3)


def test_tv_xi_of_linear_field():
    # u = xi: variation over the reference element is the element width,
    # integrated in x over the unit interval
    basis = build_elements(DOMAIN, 4, 2)
    mesh = Mesh(0.0, 1.0, 10)
    u = lambda x, xi: 0.0 * x + xi  # noqa: E731
    tv = tv_xi(u, mesh, basis)
    assert tv[0] == pytest.approx(basis.element_width, rel=1e-12)


def test_tv_of_sampler_counts_cell_jumps():
    # piecewise-constant numerical data: TV_x equals the sum of mean jumps
    result = make_result(lambda x, xi: np.where(x < 0.55, 1.0, 0.0) + 0.0 * xi)
    sampler = SolutionSampler(result)
    tv = tv_x(sampler, result.mesh, result.basis)
    assert tv[0] == pytest.approx(1.0, abs=1e-12)


def test_solution_sampler_reproduces_polynomial_data():
    u0 = lambda x, xi: 2.0 + 0.5 * xi + 0.0 * x  # noqa: E731
    result = make_result(u0)
    sampler = SolutionSampler(result)
    xi = np.array([-0.7, -0.2, 0.3, 0.9])
    vals = sampler(np.array([0.15, 0.85]), xi)
    assert vals.shape == (2, 4, 1)
    assert np.allclose(vals[..., 0], 2.0 + 0.5 * xi[None, :], atol=1e-12)


def test_solution_sampler_means_only():
    result = make_result(lambda x, xi: 1.0 + 0.0 * x + 0.0 * xi)
    result = RunResult(field=None, means=result.means, mesh=result.mesh,
                       basis=result.basis, t_end=0.0, n_steps=0,
                       scheme="weno2d")
    sampler = SolutionSampler(result)
    vals = sampler.at_cells(np.array([0, 3]), np.array([-0.5, 0.5]))
    assert vals.shape == (2, 2, 1)
    assert np.allclose(vals, 1.0, atol=1e-13)


def test_moment_l1_shapes():
    mean_num = np.zeros(10)
    mean_ref = np.full(10, 0.5)
    l1m, l1v = moment_l1(mean_num, np.zeros(10), mean_ref, np.zeros(10), 0.1)
    assert l1m[0] == pytest.approx(0.5)
    assert l1v[0] == 0.0
    # vector-valued input keeps per-component results
    l1m, _ = moment_l1(np.zeros((5, 3)), np.zeros((5, 3)),
                       np.ones((5, 3)), np.zeros((5, 3)), 0.2)
    assert l1m.shape == (3,)
    assert np.allclose(l1m, 1.0)


def test_l1_error_against_callable():
    u0 = lambda x, xi: 1.0 + xi + 0.0 * x  # noqa: E731
    result = make_result(u0)
    l1m, l1v = l1_error(result.field, result.basis, result.mesh, u0)
    assert l1m[0] < 1e-12
    assert l1v[0] < 1e-12


def test_sampled_moments_of_known_field():
    basis = build_elements(DOMAIN, 3, 2)
    mesh = Mesh(0.0, 1.0, 6)
    u = lambda x, xi: x + xi  # noqa: E731
    mean, var = sampled_moments(u, mesh, basis)
    assert np.allclose(mean[:, 0], mesh.centers, atol=1e-12)
    assert np.allclose(var[:, 0], 1.0 / 3.0, atol=1e-12)


def test_eoc_values_and_validation():
    orders = eoc([1e-2, 2.5e-3, 6.25e-4], [10, 20, 40])
    assert np.allclose(orders, 2.0, atol=1e-12)
    with pytest.raises(ValueError):
        eoc([1e-2], [10])
    with pytest.raises(ValueError):
        eoc([1e-2, 0.0], [10, 20])
    with pytest.raises(ValueError):
        eoc([1e-2, 1e-3], [20, 10])


def test_pct_above():
    assert pct_above(1.2, 1.0) == pytest.approx(20.0)
    assert pct_above(np.array([0.95]), np.array([1.0]))[0] == pytest.approx(-5.0)


def test_reference_solution_block_average():
    # smooth advection: the restricted fine solve matches a direct solve
    model = advection_model()
    ic = lambda x, xi: np.sin(2.0 * np.pi * x) + 0.0 * xi  # noqa: E731
    mesh = Mesh(0.0, 1.0, 20)
    ref = reference_solution(model, mesh, np.array([0.0]), ic, 0.1, refine=2)
    assert ref.shape == (1, 20, 1)
    exact = np.sin(2.0 * np.pi * (mesh.centers - 1.5 * 0.1))
    assert np.max(np.abs(ref[0, :, 0] - exact)) < 2e-2


def test_run_report_round_trip():
    report = RunReport(scheme="sg", case="demo", l1_mean=[0.1], tv_x=[1.0])
    d = report.as_dict()
    assert d["scheme"] == "sg"
    assert d["l1_mean"] == [0.1]
    assert d["eoc"] is None

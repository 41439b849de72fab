import numpy as np
import pytest

from uqhyp.limiters import LimiterConfig
from uqhyp.models import (
    UnrecoverableStateError,
    advection_model,
    burgers_model,
    euler_model,
    euler_sod_initial,
)
from uqhyp.solver import (
    Boundary,
    Mesh,
    SolverConfig,
    deterministic_solve,
    global_viscosity,
    initialize,
    initialize_means,
    lax_friedrichs,
    run,
    step,
)
from uqhyp.stochastic_basis import RandomDomain, build_elements

DOMAIN = RandomDomain(-1.0, 1.0)


def sine_ic(x, xi):
    return np.sin(2.0 * np.pi * (x + 0.1 * xi))


def test_mesh_geometry():
    mesh = Mesh(0.0, 1.0, 10)
    assert mesh.dx == pytest.approx(0.1)
    assert mesh.centers[0] == pytest.approx(0.05)
    assert mesh.interfaces[-1] == pytest.approx(1.0)
    xq, wq = mesh.x_quadrature()
    assert xq.shape == (10, 5)
    assert abs(wq.sum() - 1.0) < 1e-14
    with pytest.raises(ValueError):
        Mesh(1.0, 0.0, 10)
    with pytest.raises(ValueError):
        Mesh(0.0, 1.0, 2)


def test_solver_config_validation():
    cfg = SolverConfig(scheme="sg", k_d=0)
    assert cfg.rk_order == 1
    assert SolverConfig(k_d=2).rk_order == 3
    with pytest.raises(ValueError):
        SolverConfig(scheme="dg")
    with pytest.raises(ValueError):
        SolverConfig(k_d=1)
    with pytest.raises(ValueError):
        SolverConfig(cfl=0.0)


def test_initialize_exact_for_separable_polynomial():
    # u = x-independent polynomial of degree <= K in xi: the projection is
    # exact and the cell means match the polynomial's element coefficients
    basis = build_elements(DOMAIN, 2, 2)
    mesh = Mesh(0.0, 1.0, 4)
    model = burgers_model()
    u0 = lambda x, xi: 1.0 + xi + 0.0 * x  # noqa: E731
    field = initialize(u0, mesh, basis, model)
    assert field.shape == (3, 4, 2, 1)
    for j in range(2):
        samples = 1.0 + basis.xi_nodes[j]
        expected = basis.project(samples)
        assert np.allclose(field[:, :, j, 0], expected[:, None], atol=1e-13)
    means = initialize_means(u0, mesh, basis, model)
    assert np.allclose(means[:, 0, 0], 0.5, atol=1e-13)
    assert np.allclose(means[:, 1, 0], 1.5, atol=1e-13)


def test_lax_friedrichs_consistency():
    # f_hat(u, u) = f(u) exactly, for scalar and system fluxes
    adv = advection_model()
    u = np.array([[0.7], [-0.3]])
    xi = np.array([0.2, -0.5])
    f = lax_friedrichs(u, u, xi, np.array([2.0, 2.0]), adv)
    assert np.array_equal(f, adv.flux(u, xi))
    euler = euler_model()
    ue = np.array([[1.0, 0.5, 2.0]])
    fe = lax_friedrichs(ue, ue, 0.0, np.array([3.0]), euler)
    assert np.array_equal(fe, euler.flux(ue, 0.0))


def test_lax_friedrichs_upwind_limit():
    # for advection with c = a the LF flux reduces to pure upwinding
    adv = advection_model()
    um = np.array([[1.0]])
    up = np.array([[0.0]])
    xi = np.array([1.0])  # a = 2
    f = lax_friedrichs(um, up, xi, np.array([2.0]), adv)
    assert f[0, 0] == pytest.approx(2.0)


def test_global_viscosity_covers_check_nodes():
    # advection speed peaks at the element endpoint xi = 1, which only the
    # check nodes see
    basis = build_elements(DOMAIN, 1, 2)
    mesh = Mesh(0.0, 1.0, 4)
    field = np.zeros((3, 4, 1, 1))
    field[0] = 1.0
    c = global_viscosity(field, 0.0, mesh, basis, advection_model(),
                         Boundary.periodic(), k_d=2)
    assert c == pytest.approx(2.0)


@pytest.mark.parametrize("scheme", ["sg", "wenosg", "weno2d"])
def test_periodic_conservation(scheme):
    cfg = SolverConfig(scheme=scheme, k_xi=2, n_xi=2, n_x=32, t_end=0.05,
                       cfl=0.4, limiters=LimiterConfig(tvbm_M=0.3947))
    mesh = Mesh(0.0, 1.0, cfg.n_x)
    result = run(cfg, burgers_model(), sine_ic, mesh, domain=DOMAIN)
    basis = result.basis
    mean0, _ = basis.moments(
        initialize(sine_ic, mesh, basis, burgers_model())
        if scheme != "weno2d"
        else initialize_means(sine_ic, mesh, basis, burgers_model())[None]
    )
    mean1, _ = basis.moments(
        result.field if result.field is not None else result.means[None]
    )
    mass0 = mesh.dx * mean0.sum()
    mass1 = mesh.dx * mean1.sum()
    scale = mesh.dx * np.abs(mean0).sum() + 1.0
    assert abs(mass1 - mass0) / scale < 1e-12
    assert result.n_steps > 0
    assert result.t_end == cfg.t_end


def test_scheme_equivalence_collapse():
    # with one element and degree zero all three schemes reduce to the same
    # deterministic finite volume method
    results = {}
    for scheme in ("sg", "wenosg", "weno2d"):
        cfg = SolverConfig(scheme=scheme, k_xi=0, n_xi=1, n_x=40, t_end=0.1,
                           cfl=0.4)
        mesh = Mesh(0.0, 1.0, 40)
        results[scheme] = run(cfg, burgers_model(), sine_ic, mesh,
                              domain=DOMAIN).means
    base = results["sg"]
    assert np.max(np.abs(results["wenosg"] - base)) < 1e-10
    assert np.max(np.abs(results["weno2d"].reshape(base.shape) - base)) < 1e-10


def test_kd0_scheme_equivalence():
    # piecewise-constant traces: sg and weno2d share the same viscosity and
    # flux for a scalar model, so the runs agree to round-off
    results = {}
    for scheme in ("sg", "weno2d"):
        cfg = SolverConfig(scheme=scheme, k_xi=0, n_xi=1, n_x=50, k_d=0,
                           t_end=0.05, cfl=0.4)
        mesh = Mesh(0.0, 1.0, 50)
        results[scheme] = run(cfg, burgers_model(), sine_ic, mesh,
                              domain=DOMAIN).means
    diff = results["sg"].reshape(-1) - results["weno2d"].reshape(-1)
    assert np.max(np.abs(diff)) < 1e-12


def test_step_wrapper_advances_state():
    basis = build_elements(DOMAIN, 1, 2)
    mesh = Mesh(0.0, 1.0, 16)
    model = burgers_model()
    state = initialize(sine_ic, mesh, basis, model)
    cfg = SolverConfig(scheme="wenosg", k_xi=2, n_xi=1, n_x=16)
    out = step(state, 1e-3, cfg, mesh, basis, model, Boundary.periodic())
    assert out.shape == state.shape
    assert not np.array_equal(out, state)


def test_deterministic_solve_advection_accuracy():
    # smooth periodic advection at fixed xi: compare with the exact translate
    model = advection_model()
    ic = lambda x, xi: np.sin(2.0 * np.pi * x) + 0.0 * xi  # noqa: E731
    errs = []
    for n in (40, 80):
        mesh = Mesh(0.0, 1.0, n)
        out = deterministic_solve(model, mesh, np.array([0.5]), ic, 0.25,
                                  cfl=0.2)
        exact = np.sin(2.0 * np.pi * (mesh.centers - 1.75 * 0.25))
        errs.append(np.max(np.abs(out[0, :, 0] - exact)))
    assert errs[0] < 2e-2
    assert errs[0] / errs[1] > 5.0  # better than second order


def test_deterministic_solve_vectorizes_over_xi():
    model = advection_model()
    ic = lambda x, xi: np.sin(2.0 * np.pi * x) + 0.0 * xi  # noqa: E731
    mesh = Mesh(0.0, 1.0, 30)
    xi = np.array([-0.5, 0.0, 0.5])
    out = deterministic_solve(model, mesh, xi, ic, 0.1)
    assert out.shape == (3, 30, 1)
    # faster characteristics shift the profile further
    assert not np.allclose(out[0], out[2])


def test_dirichlet_boundary_feeds_ghost_cells():
    # constant inflow through a Dirichlet boundary keeps a constant solution
    basis = build_elements(DOMAIN, 1, 1)
    mesh = Mesh(0.0, 1.0, 20)
    model = advection_model()

    def inflow(t, x):
        block = np.zeros((2, 1, 1))
        block[0] = 1.0
        return block

    boundary = Boundary.dirichlet(left_values=inflow)
    cfg = SolverConfig(scheme="sg", k_xi=1, n_xi=1, n_x=20, t_end=0.1, cfl=0.4)
    result = run(cfg, model, lambda x, xi: 1.0 + 0.0 * x + 0.0 * xi, mesh,
                 domain=DOMAIN, boundary=boundary)
    assert np.allclose(result.means[:, 0, 0], 1.0, atol=1e-12)


def test_run_hyperbolicity_limiter_keeps_sod_alive():
    mesh = Mesh(0.0, 1.0, 64)
    on = SolverConfig(scheme="wenosg", k_xi=2, n_xi=3, n_x=64, t_end=0.01,
                      limiters=LimiterConfig(enable_hyperbolicity=True))
    result = run(on, euler_model(), euler_sod_initial, mesh, domain=DOMAIN,
                 boundary=Boundary.extrapolation())
    assert result.n_steps > 0
    assert result.hyperbolicity_count > 0
    assert 0.0 < result.theta_max <= 1.0
    off = SolverConfig(scheme="wenosg", k_xi=2, n_xi=3, n_x=64, t_end=0.01,
                       limiters=LimiterConfig(enable_hyperbolicity=False))
    with pytest.raises(UnrecoverableStateError):
        run(off, euler_model(), euler_sod_initial, mesh, domain=DOMAIN,
            boundary=Boundary.extrapolation())


def test_run_reports_wall_time_and_steps():
    cfg = SolverConfig(scheme="wenosg", k_xi=1, n_xi=2, n_x=16, t_end=0.02,
                       cfl=0.4)
    mesh = Mesh(0.0, 1.0, 16)
    result = run(cfg, burgers_model(), sine_ic, mesh, domain=DOMAIN)
    assert result.wall_time > 0.0
    assert result.scheme == "wenosg"
    assert result.means.shape == (16, 2, 1)
    assert result.field.shape == (2, 16, 2, 1)

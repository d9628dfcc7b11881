import math

import numpy as np
import pytest

from vortexflow.grid import DomainSpec, build_grid
from vortexflow.stokes import (
    StokesError,
    SwirlStokesProblem,
    couette_exact,
    solve_swirl_stokes,
    solve_swirl_stokes_extended,
)


def test_couette_exact_by_hand():
    # sigma=1, R=2, V0=1: A=-1/3, B=4/3
    assert couette_exact(1.0, 2.0, 1.0, 1.0) == pytest.approx(1.0)
    assert couette_exact(1.0, 2.0, 1.0, 2.0) == pytest.approx(0.0)
    assert couette_exact(1.0, 2.0, 1.0, 1.5) == pytest.approx(-0.5 + (4.0 / 3.0) / 1.5)
    assert couette_exact(1.0, 2.0, 1.0, 1.5) == pytest.approx(0.38889, abs=1e-5)


def test_couette_zero_data():
    r = np.linspace(1.0, 2.0, 11)
    assert np.allclose(couette_exact(1.0, 2.0, 0.0, r), 0.0)


def test_couette_degenerate():
    with pytest.raises(StokesError):
        couette_exact(2.0, 2.0, 1.0, 2.0)


def make_problem(nr, nz, sigma=0.1, R=2.1, L=1.0, gamma=0.1 * math.pi, **kw):
    grid = build_grid(DomainSpec(sigma=sigma, R=R, L=L), nr=nr, nz=nz)
    return SwirlStokesProblem(grid=grid, gamma=gamma, **kw)


def test_double_neumann_matches_couette():
    # with dv/dz = 0 at both ends the solution is z-independent and reduces
    # to the Couette profile; convergence order 2 in max norm
    errs = []
    for n in (32, 64, 128):
        prob = make_problem(n, 8, bottom="neumann", top="neumann")
        v = solve_swirl_stokes(prob)
        assert np.max(np.abs(v - v[:, :1])) < 1e-9  # z-independent
        exact = couette_exact(0.1, 2.1, prob.wall_speed, prob.grid.r_centers)
        errs.append(np.max(np.abs(v[:, 0] - exact)) / np.max(np.abs(exact)))
    orders = [np.log2(a / b) for a, b in zip(errs, errs[1:])]
    assert min(orders) > 1.9
    assert errs[-1] <= 1e-4


def test_maximum_principle():
    # 0 <= v <= gamma/(2 pi sigma) at every node for the standard data
    for n in (16, 33, 64):
        prob = make_problem(n, n)
        v = solve_swirl_stokes(prob)
        assert v.min() >= -1e-12
        assert v.max() <= prob.wall_speed * (1 + 1e-12)


def test_even_extension_equivalence():
    # the restricted all-Dirichlet solve on [0, 2L] equals the mixed-BC solve
    prob = make_problem(64, 64)
    direct = solve_swirl_stokes(prob)
    restricted, full = solve_swirl_stokes_extended(prob)
    assert np.max(np.abs(direct - restricted)) <= 1e-8
    # and the extended solution is symmetric about z = L
    assert np.max(np.abs(full - full[:, ::-1])) <= 1e-9


def test_linear_residual_small():
    from vortexflow.ops import swirl_matrix, swirl_source

    prob = make_problem(24, 24)
    v = solve_swirl_stokes(prob, tol=1e-10)
    dbc = prob.discrete_bc()
    M = swirl_matrix(prob.grid, dbc)
    s = swirl_source(prob.grid, dbc)
    r = M @ v.ravel() + s
    assert np.linalg.norm(r) / np.linalg.norm(s) <= 1e-10


def test_swirl_state_is_not_ns_solution():
    # (0, v_s, 0) does not zero the nonlinear residual unless v_s is
    # z-independent: the r-momentum keeps an unbalanced centrifugal term
    from vortexflow.bc import BoundarySpec, RotationProfile
    from vortexflow.ops import FieldSet, PhysParams, steady_residual

    prob = make_problem(32, 32, L=2.0)
    v = solve_swirl_stokes(prob)
    fields = FieldSet.zeros(prob.grid)
    fields.v = v
    bc = BoundarySpec(profile=RotationProfile.uniform(prob.gamma), bottom="noslip")
    res = steady_residual(fields, PhysParams(nu=0.01), bc, prob.grid)
    assert np.max(np.abs(res.r_mom)) >= 1e-3
    # z-independent swirl (double-Neumann variant), by contrast, can be
    # balanced by a radial pressure: the z-momentum vanishes identically
    prob2 = make_problem(32, 8, bottom="neumann", top="neumann")
    v2 = solve_swirl_stokes(prob2)
    f2 = FieldSet.zeros(prob2.grid)
    f2.v = v2
    # radial pressure from the discrete centrifugal balance
    vbar = 0.5 * (v2[:-1, :] + v2[1:, :])
    g2 = prob2.grid
    dp = vbar**2 / g2.r_faces[1:-1, None] * g2.dr
    f2.p[1:, :] = np.cumsum(dp, axis=0)
    from vortexflow.bc import BoundarySpec as BS

    bc2 = BS(profile=RotationProfile.uniform(prob2.gamma), bottom="freeslip")
    res2 = steady_residual(f2, PhysParams(nu=1.0), bc2, g2)
    assert np.max(np.abs(res2.r_mom)) < 1e-12
    assert np.max(np.abs(res2.z_mom)) < 1e-12

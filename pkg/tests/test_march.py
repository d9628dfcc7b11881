import math

import numpy as np
import pytest

from vortexflow.bc import BoundarySpec, RotationProfile, compile_bc
from vortexflow.grid import DomainSpec, build_grid
from vortexflow.march import (
    CFLError,
    MarchConfig,
    MarchDivergedError,
    ProjectionStepper,
    run_until_stalled,
    step,
)
from vortexflow.ops import FieldSet, PhysParams, apply_dirichlet, divergence
from vortexflow.stokes import SwirlStokesProblem, couette_exact, solve_swirl_stokes
from vortexflow.diag import kinetic_energy


def annulus(nr=24, nz=12, sigma=1.0, R=2.0, L=1.0):
    return build_grid(DomainSpec(sigma, R, L), nr, nz)


def couette_bc(grid, V0=1.0):
    gamma = V0 * 2 * math.pi * grid.domain.sigma
    return BoundarySpec(profile=RotationProfile.uniform(gamma), bottom="freeslip")


def test_zero_fields_stay_zero():
    g = annulus()
    bc = BoundarySpec(profile=RotationProfile.uniform(0.0), bottom="noslip")
    out = step(FieldSet.zeros(g), PhysParams(nu=0.05), bc, g, dt=1e-3)
    assert out.max_speed() == 0.0
    assert np.max(np.abs(out.p)) < 1e-14


def test_couette_is_fixed_point():
    # the discrete steady swirl (double-Neumann Stokes solve) is unchanged
    # by a step to solver precision; the sampled analytic profile is not an
    # exact fixed point of the discrete update, so seed with the solve
    g = annulus()
    bc = couette_bc(g)
    prob = SwirlStokesProblem(grid=g, gamma=2 * math.pi * g.domain.sigma,
                              bottom="neumann", top="neumann")
    v = solve_swirl_stokes(prob)
    fields = FieldSet.zeros(g)
    fields.v = v
    out = step(fields, PhysParams(nu=0.05), bc, g, dt=1e-3)
    assert np.max(np.abs(out.v - fields.v)) < 1e-10
    assert np.max(np.abs(out.u)) < 1e-10
    assert np.max(np.abs(out.w)) < 1e-10


def test_post_step_divergence_free():
    g = annulus(nr=20, nz=16)
    bc = BoundarySpec(profile=RotationProfile.uniform(0.3), bottom="noslip")
    rng = np.random.default_rng(9)
    fields = FieldSet(
        u=0.1 * rng.normal(size=g.shape_u),
        v=0.1 * rng.normal(size=g.shape_v),
        w=0.1 * rng.normal(size=g.shape_w),
        p=np.zeros(g.shape_p),
    )
    apply_dirichlet(fields, compile_bc(bc, g))
    out = step(fields, PhysParams(nu=0.05), bc, g, dt=5e-4)
    assert np.max(np.abs(divergence(out.u, out.w, g))) <= 1e-10


def test_cfl_violation_raises():
    g = annulus()
    bc = couette_bc(g, V0=1.0)
    fields = FieldSet.zeros(g)
    with pytest.raises(CFLError):
        step(fields, PhysParams(nu=0.05), bc, g, dt=10.0)


def test_pure_swirl_converges_to_couette():
    # free-slip top/bottom: the unique steady attractor is the Couette swirl
    g = annulus(nr=32, nz=6)
    V0 = 1.0
    bc = couette_bc(g, V0)
    params = PhysParams(nu=0.1)
    res = run_until_stalled(FieldSet.zeros(g), params, bc, g,
                            MarchConfig(stall_tol=2e-5, t_end=200.0))
    assert res.stalled
    exact = couette_exact(1.0, 2.0, V0, g.r_centers)
    err = np.max(np.abs(res.fields.v - exact[:, None]))
    assert err < 1e-4
    assert np.max(np.abs(res.fields.u)) < 1e-6
    assert np.max(np.abs(res.fields.w)) < 1e-6


def test_exact_step_count_without_stall():
    g = annulus(nr=8, nz=6)
    bc = BoundarySpec(profile=RotationProfile.uniform(0.1), bottom="noslip")
    cfg = MarchConfig(dt=1e-3, t_end=0.0107, stall_tol=0.0)
    res = run_until_stalled(FieldSet.zeros(g), PhysParams(nu=0.05), bc, g, cfg)
    assert res.steps == math.ceil(0.0107 / 1e-3)


def test_stall_detection():
    g = annulus(nr=12, nz=6)
    bc = couette_bc(g, V0=0.5)
    cfg = MarchConfig(stall_tol=1e-4, t_end=500.0)
    res = run_until_stalled(FieldSet.zeros(g), PhysParams(nu=0.2), bc, g, cfg)
    assert res.stalled
    assert res.t_final < 500.0


def test_stalled_vortex_is_single_celled():
    # the large-time state of the standard low-Re run already shows the
    # single swirling cell before any Newton polishing
    from vortexflow.diag import count_cells, stream_function

    g = build_grid(DomainSpec(0.1, 4.0, 10.0), 48, 48)
    bc = BoundarySpec(profile=RotationProfile.uniform(0.1 * math.pi), bottom="noslip")
    res = run_until_stalled(FieldSet.zeros(g), PhysParams(nu=0.01), bc, g,
                            MarchConfig(stall_tol=1e-4, t_end=60.0))
    psi = stream_function(res.fields.u, res.fields.w, g)
    n, cells = count_cells(psi)
    assert n == 1
    assert cells[0].sign == 1


def test_kinetic_energy_bounded():
    # no blow-up along the iteration at the standard vortex parameters
    g = build_grid(DomainSpec(0.1, 4.0, 10.0), 32, 32)
    bc = BoundarySpec(profile=RotationProfile.uniform(0.1 * math.pi), bottom="noslip")
    params = PhysParams(nu=0.01)
    stepper = ProjectionStepper(params, bc, g)
    fields = FieldSet.zeros(g)
    apply_dirichlet(fields, stepper.dbc)
    ke = []
    for _ in range(300):
        fields = stepper.step(fields, 0.8 * stepper.max_dt(fields))
        ke.append(kinetic_energy(fields, g))
    # bounded: the kinetic energy settles near its final plateau
    assert max(ke) < 10 * ke[-1] + 1e-12
    assert np.isfinite(ke).all()


def test_dt_refinement_first_order():
    # halving dt moves the stalled state by no more than first order in dt
    g = annulus(nr=16, nz=8)
    bc = couette_bc(g, V0=0.5)
    params = PhysParams(nu=0.2)

    def stalled(dt):
        cfg = MarchConfig(dt=dt, stall_tol=1e-9, t_end=400.0)
        return run_until_stalled(FieldSet.zeros(g), params, bc, g, cfg).fields

    f1 = stalled(2e-3)
    f2 = stalled(1e-3)
    diff = max(np.max(np.abs(f1.u - f2.u)), np.max(np.abs(f1.v - f2.v)),
               np.max(np.abs(f1.w - f2.w)))
    assert diff < 50 * 1e-3


def test_divergence_guard():
    # a wildly over-ambitious fixed dt inside the CFL bound cannot exist, so
    # force the guard with an absurd initial state instead
    g = annulus(nr=8, nz=6)
    bc = BoundarySpec(profile=RotationProfile.uniform(1e-6), bottom="noslip")
    fields = FieldSet.zeros(g)
    fields.v += 1.0  # 1e6 times the boundary scale
    cfg = MarchConfig(stall_tol=1e-12, t_end=10.0)
    with pytest.raises(MarchDivergedError):
        run_until_stalled(fields, PhysParams(nu=1e-4), bc, g, cfg)

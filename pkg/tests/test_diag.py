import math

import numpy as np
import pytest

from vortexflow.diag import (
    DiagnosticsError,
    bl_thickness,
    build_report,
    count_cells,
    count_cells_on_grid,
    kinetic_energy,
    pumping_signature,
    stream_function,
)
from vortexflow.grid import DomainSpec, build_grid
from vortexflow.ops import FieldSet


@pytest.fixture
def grid():
    return build_grid(DomainSpec(0.1, 2.1, 2.0), 20, 16)


def test_stream_function_constant_w(grid):
    # u=0, w=W0: psi = W0 (r^2 - sigma^2)/2
    W0 = 0.7
    u = np.zeros(grid.shape_u)
    w = np.full(grid.shape_w, W0)
    psi = stream_function(u, w, grid)
    exact = W0 * (grid.r_faces**2 - grid.domain.sigma**2) / 2.0
    assert np.allclose(psi, exact[:, None], atol=1e-12)
    assert np.all(psi[0, :] == 0.0)


def test_stream_function_zero_flow(grid):
    psi = stream_function(np.zeros(grid.shape_u), np.zeros(grid.shape_w), grid)
    assert np.all(psi == 0.0)


def test_stream_function_warns_on_divergence(grid):
    u = np.zeros(grid.shape_u)
    u[3, :] = 1.0  # not divergence-free
    with pytest.warns(RuntimeWarning):
        stream_function(u, np.zeros(grid.shape_w), grid)


def test_stream_function_recovers_velocities(grid):
    # differencing psi returns the staggered (u, w) when div-free
    rng = np.random.default_rng(5)
    # build an exactly divergence-free field from a random stream function
    psi0 = rng.normal(size=(grid.nr + 1, grid.nz + 1))
    psi0[0, :] = 0.0
    w = (psi0[1:, :] - psi0[:-1, :]) / (grid.r_centers[:, None] * grid.dr)
    u = -(psi0[:, 1:] - psi0[:, :-1]) / (grid.r_faces[:, None] * grid.dz)
    u[0, :] = 0.0
    u[-1, :] = 0.0
    psi0 -= psi0[:1, :]  # the reconstruction pins psi(sigma, z) = 0
    # boundary faces zeroed break exactness only in the last column band
    psi = stream_function(u, w, grid, div_tol=np.inf)
    assert np.allclose(psi[:, :], psi0 - psi0[0:1, :], atol=1e-10)
    # differencing psi recovers the staggered velocities
    w_back = (psi[1:, :] - psi[:-1, :]) / (grid.r_centers[:, None] * grid.dr)
    u_back = -(psi[:, 1:] - psi[:, :-1]) / (grid.r_faces[:, None] * grid.dz)
    assert np.allclose(w_back, w, atol=1e-10)
    assert np.allclose(u_back[1:-1, :], u[1:-1, :], atol=1e-10)


def test_count_cells_single_bump():
    x = np.linspace(0, 1, 41)
    psi = np.sin(math.pi * x)[:, None] * np.sin(math.pi * x)[None, :]
    n, cells = count_cells(psi)
    assert n == 1
    assert cells[0].sign == 1


def test_count_cells_two_signed():
    x = np.linspace(0, 1, 41)
    bump = np.sin(math.pi * x)[:, None] * np.sin(math.pi * x)[None, :]
    psi = np.concatenate([bump, -bump], axis=1)
    n, cells = count_cells(psi)
    assert n == 2
    assert sorted(c.sign for c in cells) == [-1, 1]


def test_count_cells_zero():
    n, cells = count_cells(np.zeros((5, 5)))
    assert n == 0 and cells == []


def test_count_cells_scale_invariant():
    rng = np.random.default_rng(11)
    psi = rng.normal(size=(30, 30))
    psi = np.where(np.abs(psi) > 2.0, psi, 0.05 * psi)
    n1, _ = count_cells(psi)
    n2, _ = count_cells(3.7 * psi)
    assert n1 == n2


def test_count_cells_on_grid_locations(grid):
    psi = np.zeros((grid.nr + 1, grid.nz + 1))
    psi[5, 7] = 1.0
    n, cells = count_cells_on_grid(psi, grid)
    assert n == 1
    assert cells[0].location == (grid.r_faces[5], grid.z_faces[7])


def test_bl_thickness_z_independent(grid):
    v = np.broadcast_to(1.0 / grid.r_centers[:, None], grid.shape_v).copy()
    assert bl_thickness(v, grid, 0.6) == 0.0


def test_bl_thickness_ramp(grid):
    # v = v_ref * min(z/h0, 1): the 1% deficit sits at 0.99 h0
    h0 = 0.8
    v_ref = 2.0
    ramp = np.minimum(grid.z_centers / h0, 1.0)
    v = np.broadcast_to(v_ref * ramp[None, :], grid.shape_v).copy()
    th = bl_thickness(v, grid, 0.6)
    assert abs(th - 0.99 * h0) <= grid.dz


def test_bl_thickness_errors(grid):
    v = np.zeros(grid.shape_v)
    with pytest.raises(DiagnosticsError):
        bl_thickness(v, grid, 0.6)  # vanishing reference
    with pytest.raises(DiagnosticsError):
        bl_thickness(v, grid, 0.05)  # probe too close to the wall


def test_pumping_signature_zero_flow(grid):
    assert pumping_signature(FieldSet.zeros(grid), grid) == (False, False)


def test_pumping_signature_synthetic(grid):
    fields = FieldSet.zeros(grid)
    fields.u -= 0.1  # uniform inflow
    fields.w += 0.2  # uniform updraft
    assert pumping_signature(fields, grid) == (True, True)


def test_kinetic_energy_zero(grid):
    assert kinetic_energy(FieldSet.zeros(grid), grid) == 0.0


def test_build_report(grid):
    from vortexflow.bc import BoundarySpec, RotationProfile
    from vortexflow.ops import PhysParams

    fields = FieldSet.zeros(grid)
    fields.w += 0.3
    fields.u[0, :] = 0.0
    bc = BoundarySpec(profile=RotationProfile.uniform(0.1 * math.pi))
    rep = build_report(fields, grid, PhysParams(nu=0.01), bc, bl_probe_r=None)
    assert rep.cell_count == len(rep.cells) == 1
    assert rep.re == pytest.approx(10 * math.pi)
    assert rep.div_norm < 1e-12
    text = "\n".join(rep.lines())
    assert "cell_count=1" in text
    assert "re=" in text

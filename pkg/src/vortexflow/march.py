"""Evolutionary axisymmetric Navier-Stokes integrator.

First-order semi-implicit projection (Chorin-type fractional step):
explicit convection plus the centrifugal and swirl couplings, an implicit
viscous solve per velocity component, then a pressure-Poisson projection
that restores discrete incompressibility to solver precision. Temporal
accuracy is irrelevant here; the stalled large-time state only seeds the
Newton solver. Convection defaults to first-order upwind for robustness at
coarse-grid cell Peclet numbers; the steady solve stays centered.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .bc import as_discrete
from .grid import StaggeredGrid
from .ops import (
    FieldSet,
    PhysParams,
    apply_dirichlet,
    axial_visc_matrix,
    axial_visc_source,
    convection_terms,
    divergence,
    pressure_poisson_matrix,
    radial_visc_matrix,
    radial_visc_source,
    swirl_matrix,
    swirl_source,
    validate_fields,
)


class CFLError(ValueError):
    """Time step violates the advective CFL bound."""


class MarchDivergedError(RuntimeError):
    """The time iteration blew up (velocity far above the boundary scale)."""


@dataclass
class MarchConfig:
    """Time-marching controls: fixed dt (or None for CFL-adaptive), an
    optional end time, and the stall tolerance on ||change||_inf / dt."""

    dt: float | None = None
    t_end: float | None = None
    stall_tol: float = 1e-6
    cfl_limit: float = 0.5
    scheme: str = "upwind"

    def __post_init__(self):
        if self.dt is not None and not self.dt > 0:
            raise ValueError(f"need dt > 0, got {self.dt}")
        if not (0.0 < self.cfl_limit <= 1.0):
            raise ValueError(f"need cfl_limit in (0, 1], got {self.cfl_limit}")
        if self.t_end is None and self.stall_tol <= 0:
            raise ValueError("need a positive stall tolerance or a finite t_end")


@dataclass
class MarchResult:
    fields: FieldSet
    steps: int
    t_final: float
    stalled: bool


class ProjectionStepper:
    """Prefactored operators for repeated projection steps at a fixed dt."""

    def __init__(self, params: PhysParams, bc, grid: StaggeredGrid,
                 scheme: str = "upwind", cfl_limit: float = 0.5):
        self.grid = grid
        self.params = params
        self.scheme = scheme
        self.cfl_limit = cfl_limit
        self.dbc = as_discrete(bc, grid)
        self.M_u = radial_visc_matrix(grid, self.dbc)
        self.s_u = radial_visc_source(grid, self.dbc).reshape(grid.shape_u)
        self.M_v = swirl_matrix(grid, self.dbc)
        self.s_v = swirl_source(grid, self.dbc).reshape(grid.shape_v)
        self.M_w = axial_visc_matrix(grid, self.dbc)
        self.s_w = axial_visc_source(grid, self.dbc).reshape(grid.shape_w)
        self.lu_p = spla.splu(pressure_poisson_matrix(grid).tocsc())

        # largest boundary speed: wall swirl plus any prescribed face data
        self.bc_speed = max(
            float(np.max(np.abs(self.dbc.v_inner.values))),
            float(np.max(np.abs(self.dbc.v_outer.values))),
            float(np.max(np.abs(self.dbc.v_bottom.values))),
            float(np.max(np.abs(self.dbc.u_inner))),
            float(np.max(np.abs(self.dbc.u_outer))),
            float(np.max(np.abs(self.dbc.w_bottom))),
            float(np.max(np.abs(self.dbc.w_top))),
        )

        nr, nz = grid.nr, grid.nz
        d_u = np.ones(grid.shape_u)
        d_u[1:-1, :] = 0.0  # interior rows get 1/dt, boundary rows identity
        self._ubound = d_u.ravel().astype(bool)
        d_w = np.ones(grid.shape_w)
        d_w[:, 1:-1] = 0.0
        self._wbound = d_w.ravel().astype(bool)
        self._dt = None
        self._lu_u = self._lu_v = self._lu_w = None

    def _factorize(self, dt: float):
        nu = self.params.nu
        n_u = self.M_u.shape[0]
        diag_u = np.where(self._ubound, 1.0, 1.0 / dt)
        A_u = sp.diags(diag_u) - nu * self.M_u
        n_w = self.M_w.shape[0]
        diag_w = np.where(self._wbound, 1.0, 1.0 / dt)
        A_w = sp.diags(diag_w) - nu * self.M_w
        A_v = sp.eye(self.M_v.shape[0]) / dt - nu * self.M_v
        self._lu_u = spla.splu(A_u.tocsc())
        self._lu_v = spla.splu(A_v.tocsc())
        self._lu_w = spla.splu(A_w.tocsc())
        self._dt = dt

    def max_dt(self, fields: FieldSet) -> float:
        speed = max(fields.max_speed(), self.bc_speed, 1e-12)
        h = min(self.grid.dr, self.grid.dz)
        return self.cfl_limit * h / speed

    def step(self, fields: FieldSet, dt: float) -> FieldSet:
        """One fractional step; raises CFLError if dt violates the advective
        bound for the current fields (viscosity is implicit, so no explicit
        viscous dt limit applies)."""
        grid, nu = self.grid, self.params.nu
        validate_fields(fields, grid)
        speed = max(fields.max_speed(), self.bc_speed, 1e-12)
        h = min(grid.dr, grid.dz)
        limit = self.cfl_limit
        if dt > limit * h / speed * (1 + 1e-9):
            raise CFLError(
                f"dt={dt:.3e} exceeds CFL bound {limit * h / speed:.3e} "
                f"(max speed {speed:.3e})"
            )
        if dt != self._dt:
            self._factorize(dt)

        conv_u, cf_u, conv_v, conv_w = convection_terms(fields, self.dbc, grid,
                                                        self.scheme)

        rhs_u = np.empty(grid.shape_u)
        rhs_u[1:-1, :] = fields.u[1:-1, :] / dt - conv_u + cf_u + nu * self.s_u[1:-1, :]
        rhs_u[0, :] = self.dbc.u_inner
        rhs_u[-1, :] = self.dbc.u_outer
        u_star = self._lu_u.solve(rhs_u.ravel()).reshape(grid.shape_u)

        rhs_w = np.empty(grid.shape_w)
        rhs_w[:, 1:-1] = fields.w[:, 1:-1] / dt - conv_w + nu * self.s_w[:, 1:-1]
        rhs_w[:, 0] = self.dbc.w_bottom
        rhs_w[:, -1] = self.dbc.w_top
        w_star = self._lu_w.solve(rhs_w.ravel()).reshape(grid.shape_w)

        rhs_v = fields.v / dt - conv_v + nu * self.s_v
        v_new = self._lu_v.solve(rhs_v.ravel()).reshape(grid.shape_v)

        rhs_phi = divergence(u_star, w_star, grid).ravel() / dt
        rhs_phi[0] = 0.0  # gauge cell
        phi = self.lu_p.solve(rhs_phi).reshape(grid.shape_p)

        u_new = u_star.copy()
        u_new[1:-1, :] -= dt * (phi[1:, :] - phi[:-1, :]) / grid.dr
        w_new = w_star.copy()
        w_new[:, 1:-1] -= dt * (phi[:, 1:] - phi[:, :-1]) / grid.dz

        out = FieldSet(u=u_new, v=v_new, w=w_new, p=phi)
        if not np.isfinite(out.max_speed()):
            raise MarchDivergedError("non-finite fields after step")
        return out


def step(fields: FieldSet, params: PhysParams, bc, grid: StaggeredGrid,
         dt: float, scheme: str = "upwind") -> FieldSet:
    """Single projection step (builds the operators; use ProjectionStepper
    for repeated stepping)."""
    return ProjectionStepper(params, bc, grid, scheme=scheme).step(fields, dt)


def run_until_stalled(fields: FieldSet, params: PhysParams, bc,
                      grid: StaggeredGrid, cfg: MarchConfig) -> MarchResult:
    """March until ||change||_inf/dt <= stall_tol or t reaches t_end.

    With a fixed cfg.dt the step count to t_end is exactly ceil(t_end/dt);
    with dt=None the step size tracks the CFL bound (refactorizing only when
    it drifts). Raises MarchDivergedError when the velocity scale exceeds
    100x the boundary data.
    """
    stepper = ProjectionStepper(params, bc, grid, scheme=cfg.scheme,
                                cfl_limit=cfg.cfl_limit)
    current = fields.copy()
    apply_dirichlet(current, stepper.dbc)
    t = 0.0
    steps = 0
    dt_auto = None
    while True:
        if cfg.t_end is not None and t >= cfg.t_end * (1 - 1e-12):
            return MarchResult(current, steps, t, stalled=False)
        if cfg.dt is not None:
            dt = cfg.dt
        else:
            target = stepper.max_dt(current)
            if dt_auto is None or dt_auto > target or target > 2.5 * dt_auto:
                dt_auto = 0.8 * target
            dt = dt_auto
        try:
            new = stepper.step(current, dt)
        except MarchDivergedError as exc:
            raise MarchDivergedError(f"step {steps + 1}: {exc}") from exc
        steps += 1
        t += dt
        rate = max(
            float(np.max(np.abs(new.u - current.u))),
            float(np.max(np.abs(new.v - current.v))),
            float(np.max(np.abs(new.w - current.w))),
        ) / dt
        current = new
        if current.max_speed() > 100.0 * max(stepper.bc_speed, 1e-12):
            raise MarchDivergedError(
                f"velocity {current.max_speed():.3e} exceeds 100x boundary scale "
                f"after {steps} steps"
            )
        if cfg.stall_tol > 0 and rate <= cfg.stall_tol:
            return MarchResult(current, steps, t, stalled=True)

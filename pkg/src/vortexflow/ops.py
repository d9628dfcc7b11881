"""Discrete cylindrical operators and the steady axisymmetric Navier-Stokes
residual on the staggered grid.

Unknowns: u on r-faces, v and p at cell centers, w on z-faces. The swirl
couples into the meridional momentum through the centrifugal term v^2/r and
is advected with the extra coupling u*v/r. Radial viscous terms are
discretized in conservation form, d/dr[(1/r) d(r q)/dr] for q in {u, v} and
(1/r) d/dr(r dw/dr) for w, which keeps the discrete kernel of the swirl
operator exact on r and 1/r. Convection is advective-form, second-order
centered by default with a first-order upwind fallback. Pressure is stored
as p/rho (rho is 1 and only rescales p); its gauge is fixed by pinning cell
(0,0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .bc import DiscreteBC, as_discrete
from .grid import StaggeredGrid


class OpsError(ValueError):
    """Inconsistent field shapes or invalid inputs."""


SCHEMES = ("centered", "upwind")


@dataclass
class FieldSet:
    """Discrete (u, v, w, p) with staggered placement (p holds p/rho)."""

    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    p: np.ndarray

    @staticmethod
    def zeros(grid: StaggeredGrid) -> "FieldSet":
        return FieldSet(
            u=np.zeros(grid.shape_u),
            v=np.zeros(grid.shape_v),
            w=np.zeros(grid.shape_w),
            p=np.zeros(grid.shape_p),
        )

    def copy(self) -> "FieldSet":
        return FieldSet(self.u.copy(), self.v.copy(), self.w.copy(), self.p.copy())

    def max_speed(self) -> float:
        return max(
            float(np.max(np.abs(self.u))),
            float(np.max(np.abs(self.v))),
            float(np.max(np.abs(self.w))),
        )


@dataclass(frozen=True)
class PhysParams:
    """Kinematic viscosity and density (density fixed at 1; p is stored as p/rho)."""

    nu: float
    rho: float = 1.0

    def __post_init__(self):
        if not self.nu > 0.0:
            raise OpsError(f"need nu > 0, got {self.nu}")
        if not self.rho > 0.0:
            raise OpsError(f"need rho > 0, got {self.rho}")


@dataclass
class Residual:
    """Momentum residuals at their staggered locations plus the per-cell
    continuity residual. Boundary-face entries of r_mom/z_mom are zero
    (those locations carry Dirichlet data, not momentum equations)."""

    r_mom: np.ndarray
    th_mom: np.ndarray
    z_mom: np.ndarray
    cont: np.ndarray

    def max_norm(self) -> float:
        return max(
            float(np.max(np.abs(self.r_mom))),
            float(np.max(np.abs(self.th_mom))),
            float(np.max(np.abs(self.z_mom))),
            float(np.max(np.abs(self.cont))),
        )


@dataclass
class MomentumSources:
    """Optional forcing subtracted from the momentum residuals (manufactured
    solutions); shapes match the r/th/z residual arrays."""

    su: np.ndarray
    sv: np.ndarray
    sw: np.ndarray


def validate_fields(fields: FieldSet, grid: StaggeredGrid) -> None:
    shapes = {
        "u": (fields.u.shape, grid.shape_u),
        "v": (fields.v.shape, grid.shape_v),
        "w": (fields.w.shape, grid.shape_w),
        "p": (fields.p.shape, grid.shape_p),
    }
    for name, (got, want) in shapes.items():
        if got != want:
            raise OpsError(f"{name} has shape {got}, expected {want}")
    for name, arr in (("u", fields.u), ("v", fields.v), ("w", fields.w), ("p", fields.p)):
        if not np.all(np.isfinite(arr)):
            raise OpsError(f"non-finite values in {name}")


def apply_dirichlet(fields: FieldSet, dbc: DiscreteBC) -> FieldSet:
    """Overwrite the Dirichlet boundary faces of u and w with their data."""
    fields.u[0, :] = dbc.u_inner
    fields.u[-1, :] = dbc.u_outer
    fields.w[:, 0] = dbc.w_bottom
    fields.w[:, -1] = dbc.w_top
    return fields


# ---------------------------------------------------------------------------
# ghost padding

def ghost_radii(grid: StaggeredGrid) -> tuple[float, float]:
    """Radii of the ghost cell centers just inside/outside the walls."""
    return grid.r_centers[0] - grid.dr, grid.r_centers[-1] + grid.dr


def pad_v(v: np.ndarray, grid: StaggeredGrid, dbc: DiscreteBC) -> np.ndarray:
    """Center field with one ghost layer on each side, (nr+2, nz+2).

    Radial Dirichlet ghosts extrapolate the angular momentum m = r*v
    linearly through the wall; z ghosts extrapolate v. Corner ghosts are
    never referenced and stay zero.
    """
    nr, nz = grid.nr, grid.nz
    rg_in, rg_out = ghost_radii(grid)
    sigma, R = grid.domain.sigma, grid.domain.R
    out = np.zeros((nr + 2, nz + 2))
    out[1:-1, 1:-1] = v

    if dbc.v_inner.kind == "dirichlet":
        out[0, 1:-1] = (2.0 * sigma * dbc.v_inner.values - grid.r_centers[0] * v[0, :]) / rg_in
    else:
        out[0, 1:-1] = v[0, :]
    if dbc.v_outer.kind == "dirichlet":
        out[-1, 1:-1] = (2.0 * R * dbc.v_outer.values - grid.r_centers[-1] * v[-1, :]) / rg_out
    else:
        out[-1, 1:-1] = v[-1, :]
    if dbc.v_bottom.kind == "dirichlet":
        out[1:-1, 0] = 2.0 * dbc.v_bottom.values - v[:, 0]
    else:
        out[1:-1, 0] = v[:, 0]
    if dbc.v_top.kind == "dirichlet":
        out[1:-1, -1] = 2.0 * dbc.v_top.values - v[:, -1]
    else:
        out[1:-1, -1] = v[:, -1]
    return out


def pad_u(u: np.ndarray, grid: StaggeredGrid, dbc: DiscreteBC) -> np.ndarray:
    """Radial-face field with z ghost layers, (nr+1, nz+2)."""
    out = np.zeros((grid.nr + 1, grid.nz + 2))
    out[:, 1:-1] = u
    if dbc.u_bottom.kind == "dirichlet":
        out[:, 0] = 2.0 * dbc.u_bottom.values - u[:, 0]
    else:
        out[:, 0] = u[:, 0]
    if dbc.u_top.kind == "dirichlet":
        out[:, -1] = 2.0 * dbc.u_top.values - u[:, -1]
    else:
        out[:, -1] = u[:, -1]
    return out


def pad_w(w: np.ndarray, grid: StaggeredGrid, dbc: DiscreteBC) -> np.ndarray:
    """Axial-face field with radial ghost layers, (nr+2, nz+1)."""
    out = np.zeros((grid.nr + 2, grid.nz + 1))
    out[1:-1, :] = w
    if dbc.w_inner.kind == "dirichlet":
        out[0, :] = 2.0 * dbc.w_inner.values - w[0, :]
    else:
        out[0, :] = w[0, :]
    if dbc.w_outer.kind == "dirichlet":
        out[-1, :] = 2.0 * dbc.w_outer.values - w[-1, :]
    else:
        out[-1, :] = w[-1, :]
    return out


# ---------------------------------------------------------------------------
# linear operators

def laplacian_swirl(vpad: np.ndarray, grid: StaggeredGrid) -> np.ndarray:
    """Discrete Delta_{r,z} = d2/dr2 + (1/r)d/dr - 1/r^2 + d2/dz2 applied to a
    ghost-padded center field, conservation form in m = r*v radially."""
    nr, nz = grid.nr, grid.nz
    if vpad.shape != (nr + 2, nz + 2):
        raise OpsError(f"padded field has shape {vpad.shape}, expected {(nr + 2, nz + 2)}")
    rg_in, rg_out = ghost_radii(grid)
    r_all = np.concatenate([[rg_in], grid.r_centers, [rg_out]])
    m = r_all[:, None] * vpad[:, 1:-1]
    flux = (m[1:, :] - m[:-1, :]) / (grid.dr * grid.r_faces[:, None])
    lap_r = (flux[1:, :] - flux[:-1, :]) / grid.dr
    lap_z = (vpad[1:-1, 2:] - 2.0 * vpad[1:-1, 1:-1] + vpad[1:-1, :-2]) / grid.dz**2
    return lap_r + lap_z


def _visc_u(upad: np.ndarray, grid: StaggeredGrid) -> np.ndarray:
    """Viscous operator for u at interior r-faces; boundary-face rows zero."""
    nr = grid.nr
    m = grid.r_faces[:, None] * upad[:, 1:-1]
    flux = (m[1:, :] - m[:-1, :]) / (grid.dr * grid.r_centers[:, None])
    out = np.zeros((nr + 1, grid.nz))
    out[1:-1, :] = (flux[1:, :] - flux[:-1, :]) / grid.dr
    out[1:-1, :] += (upad[1:-1, 2:] - 2.0 * upad[1:-1, 1:-1] + upad[1:-1, :-2]) / grid.dz**2
    return out


def _visc_w(wpad: np.ndarray, grid: StaggeredGrid) -> np.ndarray:
    """Viscous operator for w at interior z-faces; boundary-face rows zero."""
    nz = grid.nz
    rf = grid.r_faces[:, None]
    dflux = rf[1:] * (wpad[2:, :] - wpad[1:-1, :]) - rf[:-1] * (wpad[1:-1, :] - wpad[:-2, :])
    lap_r = dflux / (grid.r_centers[:, None] * grid.dr**2)
    out = np.zeros((grid.nr, nz + 1))
    out[:, 1:-1] = lap_r[:, 1:-1]
    out[:, 1:-1] += (wpad[1:-1, 2:] - 2.0 * wpad[1:-1, 1:-1] + wpad[1:-1, :-2]) / grid.dz**2
    return out


def divergence(u: np.ndarray, w: np.ndarray, grid: StaggeredGrid) -> np.ndarray:
    """Exact per-cell flux balance (1/r) d(ru)/dr + dw/dz."""
    if u.shape != grid.shape_u or w.shape != grid.shape_w:
        raise OpsError("staggered shapes do not match the grid")
    rf = grid.r_faces[:, None]
    radial = (rf[1:] * u[1:, :] - rf[:-1] * u[:-1, :]) / (grid.r_centers[:, None] * grid.dr)
    axial = (w[:, 1:] - w[:, :-1]) / grid.dz
    return radial + axial


# ---------------------------------------------------------------------------
# convection

def _advect(a: np.ndarray, fm: np.ndarray, fc: np.ndarray, fp: np.ndarray,
            h: float, scheme: str):
    """Advective derivative estimate D of f along one axis and the
    d(D)/df stencil coefficients (minus, center, plus) for the Jacobian."""
    if scheme == "centered":
        D = (fp - fm) / (2.0 * h)
        cm = np.full(a.shape, -0.5 / h)
        cc = np.zeros(a.shape)
        cp = np.full(a.shape, 0.5 / h)
    elif scheme == "upwind":
        pos = a >= 0.0
        D = np.where(pos, (fc - fm) / h, (fp - fc) / h)
        cm = np.where(pos, -1.0 / h, 0.0)
        cc = np.where(pos, 1.0 / h, -1.0 / h)
        cp = np.where(pos, 0.0, 1.0 / h)
    else:
        raise OpsError(f"unknown convection scheme {scheme!r}")
    return D, cm, cc, cp


def _interp_w_at_u(w: np.ndarray) -> np.ndarray:
    """w averaged to interior u locations (i=1..nr-1, all j)."""
    wc = 0.5 * (w[:, :-1] + w[:, 1:])  # w at cell centers (nr, nz)
    return 0.5 * (wc[:-1, :] + wc[1:, :])


def _interp_u_at_w(u: np.ndarray) -> np.ndarray:
    """u averaged to interior w locations (all i, j=1..nz-1)."""
    uc = 0.5 * (u[:-1, :] + u[1:, :])  # u at cell centers (nr, nz)
    return 0.5 * (uc[:, :-1] + uc[:, 1:])


def convection_terms(fields: FieldSet, dbc: DiscreteBC, grid: StaggeredGrid,
                     scheme: str):
    """Advective terms at their staggered locations:

    conv_u (interior faces, (nr-1, nz)), cf_u = vbar^2/r there,
    conv_v (all centers, includes the u*v/r coupling),
    conv_w (interior z-faces, (nr, nz-1)).
    """
    u, v, w = fields.u, fields.v, fields.w
    dr, dz = grid.dr, grid.dz
    up = pad_u(u, grid, dbc)
    vp = pad_v(v, grid, dbc)
    wp = pad_w(w, grid, dbc)

    ui = u[1:-1, :]
    Dru, _, _, _ = _advect(ui, u[:-2, :], ui, u[2:, :], dr, scheme)
    wbar = _interp_w_at_u(w)
    Dzu, _, _, _ = _advect(wbar, up[1:-1, :-2], ui, up[1:-1, 2:], dz, scheme)
    vbar_u = 0.5 * (v[:-1, :] + v[1:, :])
    conv_u = ui * Dru + wbar * Dzu
    cf_u = vbar_u**2 / grid.r_faces[1:-1, None]

    ubar = 0.5 * (u[:-1, :] + u[1:, :])
    wbar_c = 0.5 * (w[:, :-1] + w[:, 1:])
    Drv, _, _, _ = _advect(ubar, vp[:-2, 1:-1], v, vp[2:, 1:-1], dr, scheme)
    Dzv, _, _, _ = _advect(wbar_c, vp[1:-1, :-2], v, vp[1:-1, 2:], dz, scheme)
    conv_v = ubar * Drv + wbar_c * Dzv + ubar * v / grid.r_centers[:, None]

    wi = w[:, 1:-1]
    ubar_w = _interp_u_at_w(u)
    Drw, _, _, _ = _advect(ubar_w, wp[:-2, 1:-1], wi, wp[2:, 1:-1], dr, scheme)
    Dzw, _, _, _ = _advect(wi, w[:, :-2], wi, w[:, 2:], dz, scheme)
    conv_w = ubar_w * Drw + wi * Dzw
    return conv_u, cf_u, conv_v, conv_w


def steady_residual(fields: FieldSet, params: PhysParams, bc, grid: StaggeredGrid,
                    scheme: str = "centered", sources: MomentumSources | None = None
                    ) -> Residual:
    """Residual of the steady momentum and continuity equations.

    Momentum residuals are evaluated at interior staggered locations only;
    Dirichlet boundary values are enforced, not residualized. The sign
    convention is convection + pressure gradient - viscous (zero at a
    solution).
    """
    validate_fields(fields, grid)
    dbc = as_discrete(bc, grid)
    nr, nz = grid.nr, grid.nz
    dr, dz, nu = grid.dr, grid.dz, params.nu
    u, v, w, p = fields.u, fields.v, fields.w, fields.p

    up = pad_u(u, grid, dbc)
    vp = pad_v(v, grid, dbc)
    wp = pad_w(w, grid, dbc)
    conv_u, cf_u, conv_v, conv_w = convection_terms(fields, dbc, grid, scheme)

    r_mom = np.zeros((nr + 1, nz))
    visc_u = _visc_u(up, grid)
    r_mom[1:-1, :] = (
        conv_u - cf_u
        + (p[1:, :] - p[:-1, :]) / dr
        - nu * visc_u[1:-1, :]
    )

    th_mom = conv_v - nu * laplacian_swirl(vp, grid)

    z_mom = np.zeros((nr, nz + 1))
    visc_w = _visc_w(wp, grid)
    z_mom[:, 1:-1] = (
        conv_w
        + (p[:, 1:] - p[:, :-1]) / dz
        - nu * visc_w[:, 1:-1]
    )

    cont = divergence(u, w, grid)

    if sources is not None:
        r_mom = r_mom - sources.su
        th_mom = th_mom - sources.sv
        z_mom = z_mom - sources.sw
        r_mom[0, :] = 0.0
        r_mom[-1, :] = 0.0
        z_mom[:, 0] = 0.0
        z_mom[:, -1] = 0.0

    return Residual(r_mom=r_mom, th_mom=th_mom, z_mom=z_mom, cont=cont)


# ---------------------------------------------------------------------------
# degree-of-freedom layout and Jacobian

class DofMap:
    """Flat layout [u | v | w | p], C-order within each block."""

    def __init__(self, grid: StaggeredGrid):
        nr, nz = grid.nr, grid.nz
        self.nr, self.nz = nr, nz
        self.n_u = (nr + 1) * nz
        self.n_v = nr * nz
        self.n_w = nr * (nz + 1)
        self.n_p = nr * nz
        self.off_u = 0
        self.off_v = self.n_u
        self.off_w = self.off_v + self.n_v
        self.off_p = self.off_w + self.n_w
        self.n = self.off_p + self.n_p

    def iu(self, i, j):
        return self.off_u + i * self.nz + j

    def iv(self, i, j):
        return self.off_v + i * self.nz + j

    def iw(self, i, j):
        return self.off_w + i * (self.nz + 1) + j

    def ip(self, i, j):
        return self.off_p + i * self.nz + j

    def pack(self, fields: FieldSet) -> np.ndarray:
        return np.concatenate(
            [fields.u.ravel(), fields.v.ravel(), fields.w.ravel(), fields.p.ravel()]
        )

    def unpack(self, x: np.ndarray, grid: StaggeredGrid) -> FieldSet:
        return FieldSet(
            u=x[self.off_u:self.off_v].reshape(grid.shape_u).copy(),
            v=x[self.off_v:self.off_w].reshape(grid.shape_v).copy(),
            w=x[self.off_w:self.off_p].reshape(grid.shape_w).copy(),
            p=x[self.off_p:].reshape(grid.shape_p).copy(),
        )


def flatten_residual(resid: Residual, fields: FieldSet, dbc: DiscreteBC,
                     grid: StaggeredGrid, dof: DofMap | None = None) -> np.ndarray:
    """Square-system residual: momentum/continuity rows plus identity-row
    residuals for Dirichlet faces and the pressure gauge cell."""
    dof = dof or DofMap(grid)
    F = np.empty(dof.n)
    ru = resid.r_mom.copy()
    ru[0, :] = fields.u[0, :] - dbc.u_inner
    ru[-1, :] = fields.u[-1, :] - dbc.u_outer
    rw = resid.z_mom.copy()
    rw[:, 0] = fields.w[:, 0] - dbc.w_bottom
    rw[:, -1] = fields.w[:, -1] - dbc.w_top
    rp = resid.cont.copy()
    rp[0, 0] = fields.p[0, 0]
    F[dof.off_u:dof.off_v] = ru.ravel()
    F[dof.off_v:dof.off_w] = resid.th_mom.ravel()
    F[dof.off_w:dof.off_p] = rw.ravel()
    F[dof.off_p:] = rp.ravel()
    return F


def assemble_jacobian(fields: FieldSet, params: PhysParams, bc, grid: StaggeredGrid,
                      scheme: str = "centered", sources: MomentumSources | None = None):
    """Exact analytic Jacobian of the steady residual, with identity rows for
    Dirichlet faces and one pinned pressure row; rhs is the Newton right-hand
    side -F. Returns a linsolve.SparseSystem."""
    from .linsolve import SparseSystem

    validate_fields(fields, grid)
    dbc = as_discrete(bc, grid)
    nr, nz = grid.nr, grid.nz
    dr, dz, nu = grid.dr, grid.dz, params.nu
    u, v, w, p = fields.u, fields.v, fields.w, fields.p
    dof = DofMap(grid)
    rg_in, rg_out = ghost_radii(grid)
    rc, rf = grid.r_centers, grid.r_faces

    rows_acc: list[np.ndarray] = []
    cols_acc: list[np.ndarray] = []
    vals_acc: list[np.ndarray] = []

    def add(rows, cols, vals):
        rows_acc.append(np.asarray(rows).ravel())
        cols_acc.append(np.asarray(cols).ravel())
        vals_acc.append(np.asarray(vals, dtype=float).ravel())

    # fold factors for ghost values: d(ghost)/d(adjacent interior)
    def fold_factor_v(side: str) -> float:
        sbc = getattr(dbc, f"v_{side}")
        if sbc.kind == "neumann":
            return 1.0
        if side == "inner":
            return -rc[0] / rg_in
        if side == "outer":
            return -rc[-1] / rg_out
        return -1.0  # bottom/top: plain v extrapolation

    def fold_factor_u(side: str) -> float:
        return 1.0 if getattr(dbc, f"u_{side}").kind == "neumann" else -1.0

    def fold_factor_w(side: str) -> float:
        return 1.0 if getattr(dbc, f"w_{side}").kind == "neumann" else -1.0

    def scatter_v(rows, ii, jj, coef):
        rows = np.asarray(rows).ravel()
        ii = np.asarray(ii).ravel()
        jj = np.asarray(jj).ravel()
        coef = np.asarray(coef, dtype=float).ravel()
        interior = (ii >= 0) & (ii < nr) & (jj >= 0) & (jj < nz)
        if interior.any():
            add(rows[interior], dof.iv(ii[interior], jj[interior]), coef[interior])
        for mask, i2, j2, fac in (
            (ii == -1, np.zeros_like(ii), jj, fold_factor_v("inner")),
            (ii == nr, np.full_like(ii, nr - 1), jj, fold_factor_v("outer")),
            (jj == -1, ii, np.zeros_like(jj), fold_factor_v("bottom")),
            (jj == nz, ii, np.full_like(jj, nz - 1), fold_factor_v("top")),
        ):
            if mask.any():
                add(rows[mask], dof.iv(i2[mask], j2[mask]), coef[mask] * fac)

    def scatter_u(rows, ii, jj, coef):
        rows = np.asarray(rows).ravel()
        ii = np.asarray(ii).ravel()
        jj = np.asarray(jj).ravel()
        coef = np.asarray(coef, dtype=float).ravel()
        interior = (jj >= 0) & (jj < nz)
        if interior.any():
            add(rows[interior], dof.iu(ii[interior], jj[interior]), coef[interior])
        for mask, j2, fac in (
            (jj == -1, np.zeros_like(jj), fold_factor_u("bottom")),
            (jj == nz, np.full_like(jj, nz - 1), fold_factor_u("top")),
        ):
            if mask.any():
                add(rows[mask], dof.iu(ii[mask], j2[mask]), coef[mask] * fac)

    def scatter_w(rows, ii, jj, coef):
        rows = np.asarray(rows).ravel()
        ii = np.asarray(ii).ravel()
        jj = np.asarray(jj).ravel()
        coef = np.asarray(coef, dtype=float).ravel()
        interior = (ii >= 0) & (ii < nr)
        if interior.any():
            add(rows[interior], dof.iw(ii[interior], jj[interior]), coef[interior])
        for mask, i2, fac in (
            (ii == -1, np.zeros_like(ii), fold_factor_w("inner")),
            (ii == nr, np.full_like(ii, nr - 1), fold_factor_w("outer")),
        ):
            if mask.any():
                add(rows[mask], dof.iw(i2[mask], jj[mask]), coef[mask] * fac)

    up = pad_u(u, grid, dbc)
    vp = pad_v(v, grid, dbc)
    wp = pad_w(w, grid, dbc)

    # ======================= u-momentum rows (i=1..nr-1) ====================
    I, J = np.meshgrid(np.arange(1, nr), np.arange(nz), indexing="ij")
    R_ = dof.iu(I, J)
    ui = u[1:-1, :]
    rfi = rf[1:-1, None]

    Dru, cmr, ccr, cpr = _advect(ui, u[:-2, :], ui, u[2:, :], dr, scheme)
    Dzu, cmz, ccz, cpz = _advect(
        _interp_w_at_u(w), up[1:-1, :-2], ui, up[1:-1, 2:], dz, scheme
    )
    wbar = _interp_w_at_u(w)
    vbar_u = 0.5 * (v[:-1, :] + v[1:, :])

    # u . d_r u  (advecting u is the center unknown itself)
    scatter_u(R_, I - 1, J, ui * cmr)
    scatter_u(R_, I, J, ui * ccr + Dru)
    scatter_u(R_, I + 1, J, ui * cpr)
    # wbar . d_z u
    scatter_u(R_, I, J - 1, wbar * cmz)
    scatter_u(R_, I, J, wbar * ccz)
    scatter_u(R_, I, J + 1, wbar * cpz)
    for di, dj in ((-1, 0), (-1, 1), (0, 0), (0, 1)):
        scatter_w(R_, I + di, J + dj, 0.25 * Dzu)
    # -vbar^2/r
    scatter_v(R_, I - 1, J, -vbar_u / rfi)
    scatter_v(R_, I, J, -vbar_u / rfi)
    # pressure gradient
    add(R_, dof.ip(I, J), np.full(R_.shape, 1.0 / dr))
    add(R_, dof.ip(I - 1, J), np.full(R_.shape, -1.0 / dr))
    # viscous, conservation form in m = r*u (all radial neighbors are real faces)
    cw = rf[:-2, None] / (dr**2 * rc[:-1, None]) * np.ones((1, nz))
    ce = rf[2:, None] / (dr**2 * rc[1:, None]) * np.ones((1, nz))
    ccen = -rf[1:-1, None] * (1.0 / rc[1:, None] + 1.0 / rc[:-1, None]) / dr**2 * np.ones((1, nz))
    scatter_u(R_, I - 1, J, -nu * cw)
    scatter_u(R_, I + 1, J, -nu * ce)
    scatter_u(R_, I, J, -nu * (ccen - 2.0 / dz**2))
    scatter_u(R_, I, J - 1, np.full(R_.shape, -nu / dz**2))
    scatter_u(R_, I, J + 1, np.full(R_.shape, -nu / dz**2))

    # ======================= swirl rows (all centers) ========================
    I, J = np.meshgrid(np.arange(nr), np.arange(nz), indexing="ij")
    R_ = dof.iv(I, J)
    rci = rc[:, None]
    ubar = 0.5 * (u[:-1, :] + u[1:, :])
    wbar_c = 0.5 * (w[:, :-1] + w[:, 1:])
    Drv, cmr, ccr, cpr = _advect(ubar, vp[:-2, 1:-1], v, vp[2:, 1:-1], dr, scheme)
    Dzv, cmz, ccz, cpz = _advect(wbar_c, vp[1:-1, :-2], v, vp[1:-1, 2:], dz, scheme)

    scatter_v(R_, I - 1, J, ubar * cmr)
    scatter_v(R_, I, J, ubar * ccr)
    scatter_v(R_, I + 1, J, ubar * cpr)
    scatter_v(R_, I, J - 1, wbar_c * cmz)
    scatter_v(R_, I, J, wbar_c * ccz)
    scatter_v(R_, I, J + 1, wbar_c * cpz)
    # u dependence of the advecting averages and of u*v/r
    scatter_u(R_, I, J, 0.5 * (Drv + v / rci))
    scatter_u(R_, I + 1, J, 0.5 * (Drv + v / rci))
    scatter_w(R_, I, J, 0.5 * Dzv)
    scatter_w(R_, I, J + 1, 0.5 * Dzv)
    scatter_v(R_, I, J, ubar / rci)
    # viscous swirl operator (conservation form in m = r*v)
    r_all = np.concatenate([[rg_in], rc, [rg_out]])
    cw = r_all[:-2, None] / (dr**2 * rf[:-1, None]) * np.ones((1, nz))
    ce = r_all[2:, None] / (dr**2 * rf[1:, None]) * np.ones((1, nz))
    ccen = -rci * (1.0 / rf[1:, None] + 1.0 / rf[:-1, None]) / dr**2 * np.ones((1, nz))
    scatter_v(R_, I - 1, J, -nu * cw)
    scatter_v(R_, I + 1, J, -nu * ce)
    scatter_v(R_, I, J, -nu * (ccen - 2.0 / dz**2))
    scatter_v(R_, I, J - 1, np.full(R_.shape, -nu / dz**2))
    scatter_v(R_, I, J + 1, np.full(R_.shape, -nu / dz**2))

    # ======================= w-momentum rows (j=1..nz-1) =====================
    I, J = np.meshgrid(np.arange(nr), np.arange(1, nz), indexing="ij")
    R_ = dof.iw(I, J)
    wi = w[:, 1:-1]
    ubar_w = _interp_u_at_w(u)
    Drw, cmr, ccr, cpr = _advect(ubar_w, wp[:-2, 1:-1], wi, wp[2:, 1:-1], dr, scheme)
    Dzw, cmz, ccz, cpz = _advect(wi, w[:, :-2], wi, w[:, 2:], dz, scheme)

    scatter_w(R_, I - 1, J, ubar_w * cmr)
    scatter_w(R_, I, J, ubar_w * ccr)
    scatter_w(R_, I + 1, J, ubar_w * cpr)
    scatter_w(R_, I, J - 1, wi * cmz)
    scatter_w(R_, I, J, wi * ccz + Dzw)
    scatter_w(R_, I, J + 1, wi * cpz)
    for di, dj in ((0, -1), (0, 0), (1, -1), (1, 0)):
        scatter_u(R_, I + di, J + dj, 0.25 * Drw)
    add(R_, dof.ip(I, J), np.full(R_.shape, 1.0 / dz))
    add(R_, dof.ip(I, J - 1), np.full(R_.shape, -1.0 / dz))
    # viscous
    cw = rf[:-1, None] / (dr**2 * rc[:, None]) * np.ones((1, nz - 1))
    ce = rf[1:, None] / (dr**2 * rc[:, None]) * np.ones((1, nz - 1))
    ccen = -(rf[1:, None] + rf[:-1, None]) / (dr**2 * rc[:, None]) * np.ones((1, nz - 1))
    scatter_w(R_, I - 1, J, -nu * cw)
    scatter_w(R_, I + 1, J, -nu * ce)
    scatter_w(R_, I, J, -nu * (ccen - 2.0 / dz**2))
    scatter_w(R_, I, J - 1, np.full(R_.shape, -nu / dz**2))
    scatter_w(R_, I, J + 1, np.full(R_.shape, -nu / dz**2))

    # ======================= continuity rows ================================
    I, J = np.meshgrid(np.arange(nr), np.arange(nz), indexing="ij")
    R_ = dof.ip(I, J)
    gauge = (I == 0) & (J == 0)
    keep = ~gauge
    coef_e = (rf[1:, None] / (rc[:, None] * dr) * np.ones((1, nz)))[keep]
    coef_w_ = (rf[:-1, None] / (rc[:, None] * dr) * np.ones((1, nz)))[keep]
    add(R_[keep], dof.iu(I + 1, J)[keep], coef_e)
    add(R_[keep], dof.iu(I, J)[keep], -coef_w_)
    add(R_[keep], dof.iw(I, J + 1)[keep], np.full(int(keep.sum()), 1.0 / dz))
    add(R_[keep], dof.iw(I, J)[keep], np.full(int(keep.sum()), -1.0 / dz))
    # pressure gauge row
    add(np.array([dof.ip(0, 0)]), np.array([dof.ip(0, 0)]), np.array([1.0]))

    # ======================= Dirichlet identity rows =========================
    j_all = np.arange(nz)
    add(dof.iu(np.zeros(nz, int), j_all), dof.iu(np.zeros(nz, int), j_all), np.ones(nz))
    add(dof.iu(np.full(nz, nr), j_all), dof.iu(np.full(nz, nr), j_all), np.ones(nz))
    i_all = np.arange(nr)
    add(dof.iw(i_all, np.zeros(nr, int)), dof.iw(i_all, np.zeros(nr, int)), np.ones(nr))
    add(dof.iw(i_all, np.full(nr, nz)), dof.iw(i_all, np.full(nr, nz)), np.ones(nr))

    mat = sp.coo_matrix(
        (np.concatenate(vals_acc), (np.concatenate(rows_acc), np.concatenate(cols_acc))),
        shape=(dof.n, dof.n),
    ).tocsr()
    mat.sum_duplicates()
    mat.sort_indices()

    resid = steady_residual(fields, params, dbc, grid, scheme=scheme, sources=sources)
    rhs = -flatten_residual(resid, fields, dbc, grid, dof)
    return SparseSystem(matrix=mat, rhs=rhs)


# ---------------------------------------------------------------------------
# linear operator builders (shared by the Stokes solve and the time stepper)

def swirl_matrix(grid: StaggeredGrid, dbc: DiscreteBC) -> sp.csr_matrix:
    """Matrix M of the affine map laplacian_swirl(pad_v(v)) = M v + s."""
    nr, nz = grid.nr, grid.nz
    dr, dz = grid.dr, grid.dz
    rg_in, rg_out = ghost_radii(grid)
    rc, rf = grid.r_centers, grid.r_faces
    r_all = np.concatenate([[rg_in], rc, [rg_out]])

    def idx(i, j):
        return i * nz + j

    rows_acc, cols_acc, vals_acc = [], [], []

    def add(rows, cols, vals):
        rows_acc.append(np.asarray(rows).ravel())
        cols_acc.append(np.asarray(cols).ravel())
        vals_acc.append(np.asarray(vals, dtype=float).ravel())

    def fold(side):
        sbc = getattr(dbc, f"v_{side}")
        if sbc.kind == "neumann":
            return 1.0
        return {"inner": -rc[0] / rg_in, "outer": -rc[-1] / rg_out,
                "bottom": -1.0, "top": -1.0}[side]

    I, J = np.meshgrid(np.arange(nr), np.arange(nz), indexing="ij")
    R_ = idx(I, J)
    cw = r_all[:-2, None] / (dr**2 * rf[:-1, None]) * np.ones((1, nz))
    ce = r_all[2:, None] / (dr**2 * rf[1:, None]) * np.ones((1, nz))
    cc = -rc[:, None] * (1.0 / rf[1:, None] + 1.0 / rf[:-1, None]) / dr**2 * np.ones((1, nz))

    def scatter(ii, jj, coef):
        ii = ii.ravel(); jj = jj.ravel(); coef = coef.ravel(); rows = R_.ravel()
        interior = (ii >= 0) & (ii < nr) & (jj >= 0) & (jj < nz)
        add(rows[interior], idx(ii[interior], jj[interior]), coef[interior])
        for mask, i2, j2, fac in (
            (ii == -1, np.zeros_like(ii), jj, fold("inner")),
            (ii == nr, np.full_like(ii, nr - 1), jj, fold("outer")),
            (jj == -1, ii, np.zeros_like(jj), fold("bottom")),
            (jj == nz, ii, np.full_like(jj, nz - 1), fold("top")),
        ):
            if mask.any():
                add(rows[mask], idx(i2[mask], j2[mask]), coef[mask] * fac)

    scatter(I - 1, J, cw)
    scatter(I + 1, J, ce)
    scatter(I, J, cc - 2.0 / dz**2)
    scatter(I, J - 1, np.full(I.shape, 1.0 / dz**2))
    scatter(I, J + 1, np.full(I.shape, 1.0 / dz**2))

    n = nr * nz
    mat = sp.coo_matrix(
        (np.concatenate(vals_acc), (np.concatenate(rows_acc), np.concatenate(cols_acc))),
        shape=(n, n),
    ).tocsr()
    mat.sum_duplicates()
    mat.sort_indices()
    return mat


def swirl_source(grid: StaggeredGrid, dbc: DiscreteBC) -> np.ndarray:
    """Constant part s of the affine swirl operator (boundary-data term)."""
    zero = np.zeros(grid.shape_v)
    return laplacian_swirl(pad_v(zero, grid, dbc), grid).ravel()


def radial_visc_matrix(grid: StaggeredGrid, dbc: DiscreteBC) -> sp.csr_matrix:
    """Matrix of the u viscous operator over all r-faces; boundary-face rows
    are zero (callers overlay identity rows)."""
    nr, nz = grid.nr, grid.nz
    dr, dz = grid.dr, grid.dz
    rc, rf = grid.r_centers, grid.r_faces

    def idx(i, j):
        return i * nz + j

    rows_acc, cols_acc, vals_acc = [], [], []

    def add(rows, cols, vals):
        rows_acc.append(np.asarray(rows).ravel())
        cols_acc.append(np.asarray(cols).ravel())
        vals_acc.append(np.asarray(vals, dtype=float).ravel())

    fold_b = 1.0 if dbc.u_bottom.kind == "neumann" else -1.0
    fold_t = 1.0 if dbc.u_top.kind == "neumann" else -1.0

    I, J = np.meshgrid(np.arange(1, nr), np.arange(nz), indexing="ij")
    R_ = idx(I, J)
    cw = rf[:-2, None] / (dr**2 * rc[:-1, None]) * np.ones((1, nz))
    ce = rf[2:, None] / (dr**2 * rc[1:, None]) * np.ones((1, nz))
    cc = -rf[1:-1, None] * (1.0 / rc[1:, None] + 1.0 / rc[:-1, None]) / dr**2 * np.ones((1, nz))
    add(R_, idx(I - 1, J), cw)
    add(R_, idx(I + 1, J), ce)
    add(R_, idx(I, J), cc - 2.0 / dz**2)
    for jj, j2, fac in ((J - 1, 0, fold_b), (J + 1, nz - 1, fold_t)):
        interior = (jj >= 0) & (jj < nz)
        add(R_[interior], idx(I[interior], jj[interior]), np.full(int(interior.sum()), 1.0 / dz**2))
        ghost = ~interior
        if ghost.any():
            add(R_[ghost], idx(I[ghost], np.full(int(ghost.sum()), j2)),
                np.full(int(ghost.sum()), fac / dz**2))

    n = (nr + 1) * nz
    mat = sp.coo_matrix(
        (np.concatenate(vals_acc), (np.concatenate(rows_acc), np.concatenate(cols_acc))),
        shape=(n, n),
    ).tocsr()
    mat.sum_duplicates()
    mat.sort_indices()
    return mat


def radial_visc_source(grid: StaggeredGrid, dbc: DiscreteBC) -> np.ndarray:
    zero = np.zeros(grid.shape_u)
    return _visc_u(pad_u(zero, grid, dbc), grid).ravel()


def axial_visc_matrix(grid: StaggeredGrid, dbc: DiscreteBC) -> sp.csr_matrix:
    """Matrix of the w viscous operator over all z-faces; boundary-face rows
    are zero."""
    nr, nz = grid.nr, grid.nz
    dr, dz = grid.dr, grid.dz
    rc, rf = grid.r_centers, grid.r_faces

    def idx(i, j):
        return i * (nz + 1) + j

    rows_acc, cols_acc, vals_acc = [], [], []

    def add(rows, cols, vals):
        rows_acc.append(np.asarray(rows).ravel())
        cols_acc.append(np.asarray(cols).ravel())
        vals_acc.append(np.asarray(vals, dtype=float).ravel())

    fold_in = 1.0 if dbc.w_inner.kind == "neumann" else -1.0
    fold_out = 1.0 if dbc.w_outer.kind == "neumann" else -1.0

    I, J = np.meshgrid(np.arange(nr), np.arange(1, nz), indexing="ij")
    R_ = idx(I, J)
    cw = rf[:-1, None] / (dr**2 * rc[:, None]) * np.ones((1, nz - 1))
    ce = rf[1:, None] / (dr**2 * rc[:, None]) * np.ones((1, nz - 1))
    cc = -(rf[1:, None] + rf[:-1, None]) / (dr**2 * rc[:, None]) * np.ones((1, nz - 1))
    add(R_, idx(I, J), cc - 2.0 / dz**2)
    add(R_, idx(I, J - 1), np.full(R_.shape, 1.0 / dz**2))
    add(R_, idx(I, J + 1), np.full(R_.shape, 1.0 / dz**2))
    for ii, i2, fac, coef in ((I - 1, 0, fold_in, cw), (I + 1, nr - 1, fold_out, ce)):
        interior = (ii >= 0) & (ii < nr)
        add(R_[interior], idx(ii[interior], J[interior]), coef[interior])
        ghost = ~interior
        if ghost.any():
            add(R_[ghost], idx(np.full(int(ghost.sum()), i2), J[ghost]), coef[ghost] * fac)

    n = nr * (nz + 1)
    mat = sp.coo_matrix(
        (np.concatenate(vals_acc), (np.concatenate(rows_acc), np.concatenate(cols_acc))),
        shape=(n, n),
    ).tocsr()
    mat.sum_duplicates()
    mat.sort_indices()
    return mat


def axial_visc_source(grid: StaggeredGrid, dbc: DiscreteBC) -> np.ndarray:
    zero = np.zeros(grid.shape_w)
    return _visc_w(pad_w(zero, grid, dbc), grid).ravel()


def pressure_poisson_matrix(grid: StaggeredGrid) -> sp.csr_matrix:
    """MAC pressure-Poisson operator div(grad phi) with zero-flux boundary
    faces and the (0,0) cell pinned to fix the constant."""
    nr, nz = grid.nr, grid.nz
    dr, dz = grid.dr, grid.dz
    rc, rf = grid.r_centers, grid.r_faces

    def idx(i, j):
        return i * nz + j

    rows_acc, cols_acc, vals_acc = [], [], []

    def add(rows, cols, vals):
        rows_acc.append(np.asarray(rows).ravel())
        cols_acc.append(np.asarray(cols).ravel())
        vals_acc.append(np.asarray(vals, dtype=float).ravel())

    I, J = np.meshgrid(np.arange(nr), np.arange(nz), indexing="ij")
    gauge = (I == 0) & (J == 0)
    keep = ~gauge
    R_ = idx(I, J)

    ce = np.where(I < nr - 1, rf[1:, None] / (rc[:, None] * dr**2) * np.ones((1, nz)), 0.0)
    cw = np.where(I > 0, rf[:-1, None] / (rc[:, None] * dr**2) * np.ones((1, nz)), 0.0)
    cn = np.where(J < nz - 1, 1.0 / dz**2, 0.0)
    cs = np.where(J > 0, 1.0 / dz**2, 0.0)
    cc = -(ce + cw + cn + cs)

    add(R_[keep], R_[keep], cc[keep])
    m = keep & (I < nr - 1)
    add(R_[m], idx(I + 1, J)[m], ce[m])
    m = keep & (I > 0)
    add(R_[m], idx(I - 1, J)[m], cw[m])
    m = keep & (J < nz - 1)
    add(R_[m], idx(I, J + 1)[m], cn[m])
    m = keep & (J > 0)
    add(R_[m], idx(I, J - 1)[m], cs[m])
    add(np.array([0]), np.array([0]), np.array([1.0]))

    n = nr * nz
    mat = sp.coo_matrix(
        (np.concatenate(vals_acc), (np.concatenate(rows_acc), np.concatenate(cols_acc))),
        shape=(n, n),
    ).tocsr()
    mat.sum_duplicates()
    mat.sort_indices()
    return mat

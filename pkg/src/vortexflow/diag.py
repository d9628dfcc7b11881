"""Post-processing: stream function, vortex-cell census, boundary-layer
metrics, pumping signature, norms. Everything here is pure read-only
analysis of a field snapshot."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .bc import BoundarySpec, reynolds_of
from .grid import StaggeredGrid
from .ops import FieldSet, PhysParams, divergence, steady_residual


class DiagnosticsError(ValueError):
    """Ill-posed diagnostic request (e.g. vanishing reference swirl)."""


@dataclass
class VortexCell:
    sign: int             # +1 counter-clockwise, -1 clockwise
    extremum: float       # signed psi extremum inside the cell
    location: tuple[float, float]  # (r, z) of the extremum


@dataclass
class DiagnosticsReport:
    psi: np.ndarray
    cell_count: int
    cells: list[VortexCell]
    bl_probe_r: float | None
    bl_thickness: float | None
    div_norm: float
    residual_norms: dict[str, float]
    re: float | None
    extrema: dict[str, tuple[float, float]]

    def lines(self) -> list[str]:
        """key=value rendering for reports and field-file headers."""
        out = [
            f"cell_count={self.cell_count}",
            f"div_norm={self.div_norm:.6e}",
            f"re={self.re:.6f}" if self.re is not None else "re=nan",
        ]
        for k, v in self.residual_norms.items():
            out.append(f"residual_{k}={v:.6e}")
        for k, (lo, hi) in self.extrema.items():
            out.append(f"{k}_min={lo:.6e}")
            out.append(f"{k}_max={hi:.6e}")
        out.append(f"psi_min={self.psi.min():.6e}")
        out.append(f"psi_max={self.psi.max():.6e}")
        if self.bl_thickness is not None:
            out.append(f"bl_probe_r={self.bl_probe_r:.6f}")
            out.append(f"bl_thickness={self.bl_thickness:.6e}")
        for k, c in enumerate(self.cells):
            out.append(
                f"cell{k}=sign:{c.sign:+d},psi:{c.extremum:.6e},"
                f"r:{c.location[0]:.4f},z:{c.location[1]:.4f}"
            )
        return out


def stream_function(u: np.ndarray, w: np.ndarray, grid: StaggeredGrid,
                    div_tol: float = 1e-8) -> np.ndarray:
    """Stokes stream function at grid nodes from the staggered radial sum
    psi(r,z) = integral_sigma^r w(s,z) s ds, with psi = 0 at r = sigma.

    Exactly consistent with the staggered divergence: when (u, w) is
    discretely divergence-free, differencing psi recovers both velocities.
    A divergence above div_tol only warns (psi becomes path-dependent).
    """
    div = np.max(np.abs(divergence(u, w, grid)))
    if div > div_tol:
        warnings.warn(
            f"divergence {div:.3e} above {div_tol:.1e}; stream function is "
            "path-dependent", RuntimeWarning, stacklevel=2)
    psi = np.zeros((grid.nr + 1, grid.nz + 1))
    increments = w * grid.r_centers[:, None] * grid.dr
    psi[1:, :] = np.cumsum(increments, axis=0)
    return psi


def count_cells(psi: np.ndarray, threshold_frac: float = 0.02):
    """Census of meridional circulation cells: connected components of
    {|psi| > threshold_frac * max|psi|}, labelled by sign (+1 counter-
    clockwise). Returns (count, [VortexCell...])."""
    peak = np.max(np.abs(psi))
    if peak == 0.0:
        return 0, []
    thr = threshold_frac * peak
    cells: list[VortexCell] = []
    for sign, mask in ((1, psi > thr), (-1, psi < -thr)):
        labels, n = ndimage.label(mask)
        for k in range(1, n + 1):
            vals = np.where(labels == k, psi, 0.0)
            i, j = np.unravel_index(np.argmax(np.abs(vals)), psi.shape)
            # location holds node indices; count_cells_on_grid maps to (r, z)
            cells.append(VortexCell(sign=sign, extremum=float(psi[i, j]),
                                    location=(float(i), float(j))))
    return len(cells), cells


def count_cells_on_grid(psi: np.ndarray, grid: StaggeredGrid,
                        threshold_frac: float = 0.02):
    """count_cells with extremum locations mapped to (r, z) node coords."""
    n, cells = count_cells(psi, threshold_frac)
    for c in cells:
        i, j = int(c.location[0]), int(c.location[1])
        c.location = (float(grid.r_faces[i]), float(grid.z_faces[j]))
    cells.sort(key=lambda c: -abs(c.extremum))
    return n, cells


def bl_thickness(v: np.ndarray, grid: StaggeredGrid, r_probe: float) -> float:
    """Boundary-layer thickness at radius r_probe: smallest height where the
    swirl deficit relative to the column's mid-height value drops to 1%,
    with linear interpolation between cell centers."""
    sigma, R, L = grid.domain.sigma, grid.domain.R, grid.domain.L
    if not (sigma + 0.2 <= r_probe <= R - 0.2):
        raise DiagnosticsError(
            f"probe r={r_probe} outside [{sigma + 0.2}, {R - 0.2}]")
    i = int(np.argmin(np.abs(grid.r_centers - r_probe)))
    col = v[i, :]
    v_ref = col[int(np.argmin(np.abs(grid.z_centers - L / 2)))]
    if abs(v_ref) < 1e-12:
        raise DiagnosticsError("mid-height swirl below 1e-12; thickness undefined")
    g = np.abs(col - v_ref) - 0.01 * abs(v_ref)
    if g[0] <= 0:
        return 0.0
    cross = np.where(g <= 0)[0]
    if cross.size == 0:
        raise DiagnosticsError("swirl never reaches the 1% deficit band")
    j = int(cross[0])
    z0, z1 = grid.z_centers[j - 1], grid.z_centers[j]
    g0, g1 = g[j - 1], g[j]
    return float(z0 + (z1 - z0) * g0 / (g0 - g1))


def pumping_signature(fields: FieldSet, grid: StaggeredGrid) -> tuple[bool, bool]:
    """(inflow_near_plane, updraft_near_cylinder) flags.

    inflow:  median u over the strip {z <= 0.1 L, sigma+0.2 <= r <= 1.0} < 0.
    updraft: median w over {sigma <= r <= sigma+0.3, 0.2 <= z <= 2} > 0.
    """
    sigma, L = grid.domain.sigma, grid.domain.L
    ru = (grid.r_faces >= sigma + 0.2) & (grid.r_faces <= 1.0)
    zu = grid.z_centers <= 0.1 * L
    strip_u = fields.u[np.ix_(ru, zu)]
    rw = (grid.r_centers >= sigma) & (grid.r_centers <= sigma + 0.3)
    zw = (grid.z_faces >= 0.2) & (grid.z_faces <= 2.0)
    strip_w = fields.w[np.ix_(rw, zw)]
    inflow = bool(strip_u.size) and float(np.median(strip_u)) < 0.0
    updraft = bool(strip_w.size) and float(np.median(strip_w)) > 0.0
    return inflow, updraft


def window_median_w(fields: FieldSet, grid: StaggeredGrid,
                    r_range: tuple[float, float],
                    z_range: tuple[float, float]) -> float:
    """Median of the axial velocity over a rectangular window."""
    rw = (grid.r_centers >= r_range[0]) & (grid.r_centers <= r_range[1])
    zw = (grid.z_faces >= z_range[0]) & (grid.z_faces <= z_range[1])
    win = fields.w[np.ix_(rw, zw)]
    if win.size == 0:
        raise DiagnosticsError("empty window")
    return float(np.median(win))


def kinetic_energy(fields: FieldSet, grid: StaggeredGrid) -> float:
    """Sum of r*dr*dz*(u^2+v^2+w^2)/2 with u, w averaged to centers."""
    uc = 0.5 * (fields.u[:-1, :] + fields.u[1:, :])
    wc = 0.5 * (fields.w[:, :-1] + fields.w[:, 1:])
    return float(np.sum(grid.cell_weights()
                        * (uc**2 + fields.v**2 + wc**2) / 2.0))


def build_report(fields: FieldSet, grid: StaggeredGrid,
                 params: PhysParams | None = None,
                 bc: BoundarySpec | None = None,
                 bl_probe_r: float | None = None,
                 threshold_frac: float = 0.02) -> DiagnosticsReport:
    """Full diagnostics of a field snapshot; residual norms only when both
    params and bc are supplied."""
    psi = stream_function(fields.u, fields.w, grid, div_tol=np.inf)
    n, cells = count_cells_on_grid(psi, grid, threshold_frac)
    div_norm = float(np.max(np.abs(divergence(fields.u, fields.w, grid))))
    residual_norms: dict[str, float] = {}
    re = None
    if params is not None and bc is not None:
        res = steady_residual(fields, params, bc, grid)
        residual_norms = {
            "r_mom": float(np.max(np.abs(res.r_mom))),
            "th_mom": float(np.max(np.abs(res.th_mom))),
            "z_mom": float(np.max(np.abs(res.z_mom))),
            "cont": float(np.max(np.abs(res.cont))),
        }
        re = reynolds_of(bc.profile, grid.domain.sigma, params.nu)
    thickness = None
    if bl_probe_r is not None:
        thickness = bl_thickness(fields.v, grid, bl_probe_r)
    extrema = {
        name: (float(arr.min()), float(arr.max()))
        for name, arr in (("u", fields.u), ("v", fields.v),
                          ("w", fields.w), ("p", fields.p))
    }
    return DiagnosticsReport(
        psi=psi,
        cell_count=n,
        cells=cells,
        bl_probe_r=bl_probe_r,
        bl_thickness=thickness,
        div_norm=div_norm,
        residual_norms=residual_norms,
        re=re,
        extrema=extrema,
    )

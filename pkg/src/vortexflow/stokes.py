"""Linear azimuthal Stokes problem on the annulus and the circular-Couette
oracle.

With u=w=0 and constant pressure, the full Stokes system reduces to the
scalar swirl equation Delta_{r,z} v = 0. The standard data set is v=0 on the
plane and the outer wall, v=gamma/(2*pi*sigma) on the cylinder, dv/dz=0 on
top; variants with Dirichlet or Neumann z-boundaries cover the z-invariant
(Couette) reduction and the reflection of the mixed problem onto the doubled
strip. The discrete operator is the same stencil as ops.laplacian_swirl, so
the Navier-Stokes Jacobian at zero fields reduces to this operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bc import DiscreteBC, SideBC
from .grid import DomainSpec, StaggeredGrid, build_grid
from .linsolve import SparseSystem, solve_linear
from .ops import swirl_matrix, swirl_source


class StokesError(ValueError):
    """Degenerate geometry or invalid problem data."""


def couette_exact(sigma: float, R: float, V0: float, r):
    """Swirl v(r) = A r + B/r between rotating inner wall (v=V0 at sigma) and
    a fixed outer wall (v=0 at R)."""
    if not R > sigma > 0:
        raise StokesError(f"degenerate annulus: sigma={sigma}, R={R}")
    A = V0 * sigma / (sigma**2 - R**2)
    B = V0 * sigma * R**2 / (R**2 - sigma**2)
    r = np.asarray(r, dtype=float)
    out = A * r + B / r
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class SwirlStokesProblem:
    """Swirl Stokes problem: inner wall at gamma/(2*pi*sigma), outer wall 0,
    configurable z-boundaries (defaults: plane Dirichlet 0, top Neumann)."""

    grid: StaggeredGrid
    gamma: float
    nu: float = 1.0
    bottom: str = "dirichlet"  # "dirichlet" (v=0) | "neumann"
    top: str = "neumann"       # "neumann" | "dirichlet" (v=0)

    def __post_init__(self):
        if self.bottom not in ("dirichlet", "neumann"):
            raise StokesError(f"bad bottom kind {self.bottom!r}")
        if self.top not in ("dirichlet", "neumann"):
            raise StokesError(f"bad top kind {self.top!r}")

    @property
    def wall_speed(self) -> float:
        return self.gamma / (2.0 * math.pi * self.grid.domain.sigma)

    def discrete_bc(self) -> DiscreteBC:
        """Swirl-only boundary data on the grid (u/w entries are unused zeros)."""
        g = self.grid
        nr, nz = g.nr, g.nz
        side = lambda kind, n: SideBC(kind, np.zeros(n))
        return DiscreteBC(
            u_inner=np.zeros(nz),
            u_outer=np.zeros(nz),
            u_bottom=side("dirichlet", nr + 1),
            u_top=side("neumann", nr + 1),
            v_inner=SideBC("dirichlet", np.full(nz, self.wall_speed)),
            v_outer=side("dirichlet", nz),
            v_bottom=side(self.bottom, nr),
            v_top=side(self.top, nr),
            w_bottom=np.zeros(nr),
            w_top=np.zeros(nr),
            w_inner=side("dirichlet", nz + 1),
            w_outer=side("dirichlet", nz + 1),
        )


def solve_swirl_stokes(problem: SwirlStokesProblem, tol: float = 1e-10,
                       method: str = "direct") -> np.ndarray:
    """Discrete solution of Delta_{r,z} v = 0 with the problem's data,
    relative linear residual <= tol. Returns v at cell centers."""
    dbc = problem.discrete_bc()
    M = swirl_matrix(problem.grid, dbc)
    s = swirl_source(problem.grid, dbc)
    x = solve_linear(SparseSystem(matrix=M, rhs=-s), tol=tol, method=method)
    return x.reshape(problem.grid.shape_v)


def solve_swirl_stokes_extended(problem: SwirlStokesProblem, tol: float = 1e-10):
    """Even-extension route: solve the all-Dirichlet problem on [0, 2L] and
    restrict to [0, L].

    Returns (restricted, full) center fields; `full` lives on the doubled
    grid (nr, 2*nz) and is symmetric about z=L to solver tolerance.
    """
    g = problem.grid
    dom2 = DomainSpec(sigma=g.domain.sigma, R=g.domain.R, L=2.0 * g.domain.L)
    g2 = build_grid(dom2, g.nr, 2 * g.nz)
    prob2 = SwirlStokesProblem(grid=g2, gamma=problem.gamma, nu=problem.nu,
                               bottom="dirichlet", top="dirichlet")
    v2 = solve_swirl_stokes(prob2, tol=tol)
    return v2[:, : g.nz].copy(), v2

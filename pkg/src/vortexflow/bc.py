"""Wall data for the annulus: rotating inner cylinder, bottom plane, free-slip
top, and the far-field outer wall, plus the swirl profiles of the cylinder.

Segment conventions (one condition per velocity component per segment):
  bottom  z=0      : no-slip (u=v=w=0), free-slip, or the corner-regularized
                     "hopf" mode (v = background swirl, u=w=0)
  inner   r=sigma  : u=w=0, v = rotation profile v(z)
  top     z=L      : du/dz = dv/dz = 0, w = 0
  outer   r=R      : u=w=0, v = outer_swirl (0 for the standard closure)

The discrete side (DiscreteBC) carries per-side ghost rules. Dirichlet
ghosts are linear extrapolations through the wall; in the radial direction
the extrapolated quantity is the angular momentum m = r*v (the variable the
conservative swirl stencil differences), in z it is the velocity itself.
No v node sits on the corner (r=sigma, z=0): the bottom ghost row carries
the plane value and the inner ghost column the profile value, so the
mismatch only affects ghost extrapolation, never a collocation point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import StaggeredGrid
from .hopf import HopfParams, background_swirl


class ProfileError(ValueError):
    """Malformed rotation profile or out-of-range evaluation."""


class BoundaryError(ValueError):
    """Inconsistent boundary specification."""


@dataclass(frozen=True)
class RotationProfile:
    """Swirl speed prescribed on the inner cylinder wall.

    kind="uniform": v = gamma/(2*pi*sigma), independent of z.
    kind="piecewise": continuous piecewise-linear v(z) through breakpoints.
    """

    kind: str
    gamma: float | None = None
    breakpoints: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if self.kind == "uniform":
            if self.gamma is None:
                raise ProfileError("uniform profile needs gamma")
        elif self.kind == "piecewise":
            bp = self.breakpoints
            if not bp or len(bp) < 2:
                raise ProfileError("piecewise profile needs >= 2 breakpoints")
            zs = [z for z, _ in bp]
            if any(b <= a for a, b in zip(zs, zs[1:])):
                raise ProfileError("breakpoint heights must be strictly increasing")
        else:
            raise ProfileError(f"unknown profile kind {self.kind!r}")

    @staticmethod
    def uniform(gamma: float) -> "RotationProfile":
        return RotationProfile(kind="uniform", gamma=gamma)

    @staticmethod
    def piecewise(*points: tuple[float, float]) -> "RotationProfile":
        return RotationProfile(kind="piecewise", breakpoints=tuple(points))


def eval_rotation(profile: RotationProfile, sigma: float, z):
    """Wall swirl speed at height z (uniform: gamma/(2*pi*sigma) for any z;
    piecewise: linear interpolation, z must lie within the breakpoint span)."""
    z = np.asarray(z, dtype=float)
    if profile.kind == "uniform":
        val = profile.gamma / (2.0 * math.pi * sigma)
        out = np.full(z.shape, val)
    else:
        zs = np.array([p[0] for p in profile.breakpoints])
        vs = np.array([p[1] for p in profile.breakpoints])
        if np.any(z < zs[0] - 1e-12) or np.any(z > zs[-1] + 1e-12):
            raise ProfileError(
                f"height outside profile span [{zs[0]}, {zs[-1]}]"
            )
        out = np.interp(z, zs, vs)
    if out.ndim == 0:
        return float(out)
    return out


def reynolds_of(profile: RotationProfile, sigma: float, nu: float) -> float:
    """Rotational Reynolds number Re = gamma/nu, with gamma = 2*pi*sigma*max v
    for piecewise profiles (piecewise-linear v attains its max at a breakpoint)."""
    if nu <= 0.0:
        raise ProfileError(f"need nu > 0, got {nu}")
    if profile.kind == "uniform":
        gamma = profile.gamma
    else:
        vmax = max(v for _, v in profile.breakpoints)
        gamma = 2.0 * math.pi * sigma * vmax
    return gamma / nu


def profile_max_speed(profile: RotationProfile, sigma: float) -> float:
    """Largest wall swirl speed, used for CFL and divergence guards."""
    if profile.kind == "uniform":
        return abs(profile.gamma) / (2.0 * math.pi * sigma)
    return max(abs(v) for _, v in profile.breakpoints)


BOTTOM_MODES = ("noslip", "freeslip", "hopf")


@dataclass(frozen=True)
class BoundarySpec:
    """Full wall data set for one run."""

    profile: RotationProfile
    bottom: str = "noslip"
    hopf: HopfParams | None = None
    outer_swirl: float = 0.0

    def __post_init__(self):
        if self.bottom not in BOTTOM_MODES:
            raise BoundaryError(f"unknown bottom mode {self.bottom!r}")
        if self.bottom == "hopf" and self.hopf is None:
            raise BoundaryError("bottom='hopf' needs HopfParams")


# ---------------------------------------------------------------------------
# discrete form


@dataclass(frozen=True)
class SideBC:
    """Ghost rule for one side of a field: Dirichlet wall values or
    homogeneous Neumann (mirror)."""

    kind: str  # "dirichlet" | "neumann"
    values: np.ndarray

    def __post_init__(self):
        if self.kind not in ("dirichlet", "neumann"):
            raise BoundaryError(f"unknown side kind {self.kind!r}")


@dataclass(frozen=True)
class DiscreteBC:
    """Boundary data realized on a specific grid.

    u_inner/u_outer and w_bottom/w_top are Dirichlet values on actual
    staggered faces (enforced as identity rows); the SideBC entries are
    ghost rules for the tangential directions.
    """

    u_inner: np.ndarray  # (nz,) values of u on the r=sigma faces
    u_outer: np.ndarray  # (nz,)
    u_bottom: SideBC     # values along r_faces, (nr+1,)
    u_top: SideBC
    v_inner: SideBC      # values along z_centers, (nz,)
    v_outer: SideBC
    v_bottom: SideBC     # values along r_centers, (nr,)
    v_top: SideBC
    w_bottom: np.ndarray  # (nr,) values of w on the z=0 faces
    w_top: np.ndarray     # (nr,)
    w_inner: SideBC       # values along z_faces, (nz+1,)
    w_outer: SideBC


def _zeros_side(n: int) -> SideBC:
    return SideBC("dirichlet", np.zeros(n))


def _neumann(n: int) -> SideBC:
    return SideBC("neumann", np.zeros(n))


def compile_bc(spec: BoundarySpec, grid: StaggeredGrid) -> DiscreteBC:
    """Sample a BoundarySpec onto the grid's staggered locations."""
    nr, nz = grid.nr, grid.nz
    sigma = grid.domain.sigma
    v_wall = np.asarray(eval_rotation(spec.profile, sigma, grid.z_centers))
    v_out = np.full(nz, float(spec.outer_swirl))

    if spec.bottom == "noslip":
        u_bot = SideBC("dirichlet", np.zeros(nr + 1))
        v_bot = SideBC("dirichlet", np.zeros(nr))
    elif spec.bottom == "freeslip":
        u_bot = _neumann(nr + 1)
        v_bot = _neumann(nr)
    else:  # hopf: u=w=0 keep, v = background swirl in the strip
        u_bot = SideBC("dirichlet", np.zeros(nr + 1))
        v_bot = SideBC("dirichlet", np.asarray(background_swirl(spec.hopf, grid.r_centers)))

    return DiscreteBC(
        u_inner=np.zeros(nz),
        u_outer=np.zeros(nz),
        u_bottom=u_bot,
        u_top=_neumann(nr + 1),
        v_inner=SideBC("dirichlet", v_wall),
        v_outer=SideBC("dirichlet", v_out),
        v_bottom=v_bot,
        v_top=_neumann(nr),
        w_bottom=np.zeros(nr),
        w_top=np.zeros(nr),
        w_inner=_zeros_side(nz + 1),
        w_outer=_zeros_side(nz + 1),
    )


def as_discrete(bc, grid: StaggeredGrid) -> DiscreteBC:
    """Accept either a BoundarySpec or an already-compiled DiscreteBC."""
    if isinstance(bc, DiscreteBC):
        return bc
    if isinstance(bc, BoundarySpec):
        return compile_bc(bc, grid)
    raise BoundaryError(f"expected BoundarySpec or DiscreteBC, got {type(bc)!r}")

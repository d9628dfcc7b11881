"""Annular meridional domain and its staggered (MAC) discretization.

The domain is the cross-section sigma <= r <= R, 0 <= z <= L of an annulus
around a vertical cylinder. Velocities are staggered in the usual MAC way:
radial velocity u on r-faces, axial velocity w on z-faces, swirl v and
pressure p at cell centers. All volumes and integrals drop the constant
2*pi azimuthal factor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class GridError(ValueError):
    """Malformed domain or grid construction parameters."""


@dataclass(frozen=True)
class DomainSpec:
    """Annulus cross-section: inner radius sigma, outer radius R, height L."""

    sigma: float
    R: float
    L: float

    def __post_init__(self):
        if not (0.0 < self.sigma < self.R):
            raise GridError(f"need 0 < sigma < R, got sigma={self.sigma}, R={self.R}")
        if not self.L > 0.0:
            raise GridError(f"need L > 0, got L={self.L}")


@dataclass(frozen=True, eq=False)
class StaggeredGrid:
    """Uniform staggered grid on a DomainSpec.

    Placement contract: u lives on r-faces (nr+1, nz), w on z-faces
    (nr, nz+1), v and p at cell centers (nr, nz). Immutable after
    construction; safe to share across threads.
    """

    domain: DomainSpec
    nr: int
    nz: int
    r_faces: np.ndarray
    z_faces: np.ndarray
    r_centers: np.ndarray
    z_centers: np.ndarray
    dr: float
    dz: float

    def cell_weights(self) -> np.ndarray:
        """Metric weight r*dr*dz of each cell, shape (nr, nz)."""
        return np.broadcast_to(
            self.r_centers[:, None] * self.dr * self.dz, (self.nr, self.nz)
        ).copy()

    @property
    def shape_u(self) -> tuple[int, int]:
        return (self.nr + 1, self.nz)

    @property
    def shape_v(self) -> tuple[int, int]:
        return (self.nr, self.nz)

    @property
    def shape_w(self) -> tuple[int, int]:
        return (self.nr, self.nz + 1)

    @property
    def shape_p(self) -> tuple[int, int]:
        return (self.nr, self.nz)


def build_grid(domain: DomainSpec, nr: int, nz: int) -> StaggeredGrid:
    """Build the uniform staggered grid with nr x nz cells."""
    if not isinstance(nr, (int, np.integer)) or not isinstance(nz, (int, np.integer)):
        raise GridError(f"cell counts must be integers, got nr={nr!r}, nz={nz!r}")
    if nr < 2 or nz < 2:
        raise GridError(f"need nr >= 2 and nz >= 2, got nr={nr}, nz={nz}")
    dr = (domain.R - domain.sigma) / nr
    dz = domain.L / nz
    r_faces = domain.sigma + dr * np.arange(nr + 1)
    z_faces = dz * np.arange(nz + 1)
    # pin the outer endpoints exactly
    r_faces[-1] = domain.R
    z_faces[-1] = domain.L
    r_centers = domain.sigma + dr * (np.arange(nr) + 0.5)
    z_centers = dz * (np.arange(nz) + 0.5)
    for arr in (r_faces, z_faces, r_centers, z_centers):
        arr.setflags(write=False)
    return StaggeredGrid(
        domain=domain,
        nr=int(nr),
        nz=int(nz),
        r_faces=r_faces,
        z_faces=z_faces,
        r_centers=r_centers,
        z_centers=z_centers,
        dr=dr,
        dz=dz,
    )

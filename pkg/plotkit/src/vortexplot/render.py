"""The six figure kinds: filled/line contours of u, v, w, the meridional
vector plot, the streamline plot, and the pressure fill. Rendering is
deterministic: fixed backend, no timestamps, repeated invocations produce
byte-identical files."""

from __future__ import annotations

from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .reader import FieldData

KINDS = ("contour-u", "contour-v", "contour-w", "vectors", "streamlines",
         "pressure")


class RenderError(ValueError):
    pass


@dataclass(frozen=True)
class PlotRequest:
    field_path: str
    kind: str
    out_path: str
    window: tuple[float, float, float, float] | None = None  # rmin,rmax,zmin,zmax
    fill: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise RenderError(f"unknown kind {self.kind!r}; pick one of {KINDS}")
        if self.window is not None:
            rmin, rmax, zmin, zmax = self.window
            if not (rmin < rmax and zmin < zmax):
                raise RenderError(f"degenerate window {self.window}")


def stream_function(data: FieldData) -> np.ndarray:
    """psi at grid nodes by the same trapezoid-consistent staggered sum the
    solver's diagnostics use (duplicated on purpose: the field file is the
    only interface)."""
    psi = np.zeros((data.nr + 1, data.nz + 1))
    dr = data.r_faces[1] - data.r_faces[0]
    increments = data.w_stag * data.r_centers[:, None] * dr
    psi[1:, :] = np.cumsum(increments, axis=0)
    return psi


def _clip_window(data: FieldData, window):
    if window is None:
        return (data.sigma, data.R, 0.0, data.L)
    rmin, rmax, zmin, zmax = window
    if rmin < data.sigma - 1e-12 or rmax > data.R + 1e-12 \
            or zmin < -1e-12 or zmax > data.L + 1e-12:
        raise RenderError(
            f"window {window} outside domain r in [{data.sigma}, {data.R}], "
            f"z in [0, {data.L}]")
    return window


def render(req: PlotRequest) -> None:
    """Render one figure to req.out_path (format from the file suffix)."""
    from .reader import load

    data = load(req.field_path)
    rmin, rmax, zmin, zmax = _clip_window(data, req.window)

    fig, ax = plt.subplots(figsize=(6.0, 6.0 * (zmax - zmin) / max(rmax - rmin, 1e-12)
                                    if (zmax - zmin) / max(rmax - rmin, 1e-12) < 2.0
                                    else 12.0))
    try:
        if req.kind in ("contour-u", "contour-v", "contour-w"):
            comp = {"contour-u": data.u_center, "contour-v": data.v,
                    "contour-w": data.w_center}[req.kind]
            R_, Z_ = np.meshgrid(data.r_centers, data.z_centers, indexing="ij")
            if req.fill:
                cs = ax.contourf(R_, Z_, comp, levels=24)
                fig.colorbar(cs, ax=ax)
            else:
                cs = ax.contour(R_, Z_, comp, levels=16, linewidths=0.8)
                ax.clabel(cs, inline=True, fontsize=6, fmt="%.2g")
            ax.set_title(req.kind.split("-")[1] + " contours")
        elif req.kind == "pressure":
            R_, Z_ = np.meshgrid(data.r_centers, data.z_centers, indexing="ij")
            cs = ax.contourf(R_, Z_, data.p, levels=32)
            fig.colorbar(cs, ax=ax)
            ax.set_title("pressure")
        elif req.kind == "vectors":
            R_, Z_ = np.meshgrid(data.r_centers, data.z_centers, indexing="ij")
            mask = (R_ >= rmin) & (R_ <= rmax) & (Z_ >= zmin) & (Z_ <= zmax)
            # subsample to a readable arrow density
            ii = np.unique(np.linspace(0, data.nr - 1, 28).astype(int))
            jj = np.unique(np.linspace(0, data.nz - 1, 28).astype(int))
            sel = np.ix_(ii, jj)
            ax.quiver(R_[sel], Z_[sel], data.u_center[sel], data.w_center[sel],
                      angles="xy", scale_units="xy", width=0.003)
            ax.set_title("meridional velocity")
            del mask
        elif req.kind == "streamlines":
            psi = stream_function(data)
            R_, Z_ = np.meshgrid(data.r_faces, data.z_faces, indexing="ij")
            peak = np.max(np.abs(psi))
            if peak > 0:
                levels = np.linspace(-peak, peak, 25)
                levels = levels[np.abs(levels) > 1e-3 * peak]
                cs = ax.contour(R_, Z_, psi, levels=levels, linewidths=0.8,
                                cmap="RdBu_r")
                # positive values: counter-clockwise circulation
                fig.colorbar(cs, ax=ax, label="psi (+ counter-clockwise)")
            ax.set_title("meridional streamlines")
        ax.set_xlim(rmin, rmax)
        ax.set_ylim(zmin, zmax)
        ax.set_xlabel("r")
        ax.set_ylabel("z")
        fig.savefig(req.out_path, dpi=130, metadata={"Software": "vortexplot"})
    finally:
        plt.close(fig)

"""Stand-alone parser for the `vortexfield v1` format.

This toolkit deliberately carries its own copy of the parser instead of
importing the solver package: the file format is the only interface between
the two, and a format change should break exactly one parser here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAGIC = "# vortexfield v1"


class ReadError(ValueError):
    pass


@dataclass
class FieldData:
    nr: int
    nz: int
    sigma: float
    R: float
    L: float
    nu: float
    profile: str
    r_centers: np.ndarray
    z_centers: np.ndarray
    r_faces: np.ndarray
    z_faces: np.ndarray
    u_center: np.ndarray   # (nr, nz) interpolated rows
    v: np.ndarray          # (nr, nz)
    w_center: np.ndarray   # (nr, nz)
    p: np.ndarray          # (nr, nz)
    u_stag: np.ndarray     # (nr+1, nz) raw faces
    w_stag: np.ndarray     # (nr, nz+1)
    meta: dict[str, str] = field(default_factory=dict)


def load(path) -> FieldData:
    with open(path) as fh:
        raw = fh.read().splitlines()
    if not raw or raw[0].strip() != MAGIC:
        raise ReadError(f"not a vortexfield v1 file: {path}")
    hdr = {}
    for tok in raw[1][2:].split():
        k, _, v = tok.partition("=")
        hdr[k] = v
    try:
        nr, nz = int(hdr["nr"]), int(hdr["nz"])
        sigma, R, L = float(hdr["sigma"]), float(hdr["R"]), float(hdr["L"])
        nu = float(hdr["nu"])
        profile = hdr.get("profile", "")
    except (KeyError, ValueError) as exc:
        raise ReadError(f"bad header: {raw[1]!r}") from exc
    if raw[2].strip() != "r,z,u,v,w,p":
        raise ReadError(f"bad column header: {raw[2]!r}")
    n_rows = nr * nz
    if len(raw) < 3 + n_rows:
        raise ReadError("truncated rows")
    table = np.empty((n_rows, 6))
    for k in range(n_rows):
        parts = raw[3 + k].split(",")
        if len(parts) != 6:
            raise ReadError(f"row {k}: want 6 columns, got {len(parts)}")
        table[k] = [float(x) for x in parts]

    def grab_section(pos, name, rows, cols):
        if pos >= len(raw) or raw[pos].strip() != name:
            raise ReadError(f"missing {name!r} section")
        if pos + 1 + rows > len(raw):
            raise ReadError(f"truncated {name!r} section")
        out = np.empty((rows, cols))
        for i in range(rows):
            parts = raw[pos + 1 + i].split(",")
            if len(parts) != cols:
                raise ReadError(f"{name} line {i}: want {cols}, got {len(parts)}")
            out[i] = [float(x) for x in parts]
        return out, pos + 1 + rows

    pos = 3 + n_rows
    u_stag, pos = grab_section(pos, "# staggered u", nr + 1, nz)
    w_stag, pos = grab_section(pos, "# staggered w", nr, nz + 1)
    meta = {}
    if pos < len(raw) and raw[pos].strip() == "# meta":
        pos += 1
        while pos < len(raw) and not raw[pos].startswith("#"):
            line = raw[pos].strip()
            if line and "=" in line:
                k, _, v = line.partition("=")
                meta[k] = v
            pos += 1

    # rows are z-major
    def col(k):
        return table[:, k].reshape(nz, nr).T

    dr = (R - sigma) / nr
    dz = L / nz
    return FieldData(
        nr=nr, nz=nz, sigma=sigma, R=R, L=L, nu=nu, profile=profile,
        r_centers=sigma + dr * (np.arange(nr) + 0.5),
        z_centers=dz * (np.arange(nz) + 0.5),
        r_faces=sigma + dr * np.arange(nr + 1),
        z_faces=dz * np.arange(nz + 1),
        u_center=col(2), v=col(3), w_center=col(4), p=col(5),
        u_stag=u_stag, w_stag=w_stag, meta=meta,
    )

"""Field-file serialization, format `vortexfield v1`.

Layout: line 1 magic, line 2 grid/physics header (incl. the profile spec),
line 3 column header `r,z,u,v,w,p`, then nr*nz comma-separated center rows
in z-major order at 17 significant digits. Staggered u and w are appended
raw in `# staggered u` / `# staggered w` sections so reading is lossless;
an optional `# meta` section carries key=value extras (bottom mode,
diagnostics on request), and unknown trailing sections are preserved.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import DomainSpec, StaggeredGrid, build_grid
from .ops import FieldSet

MAGIC = "# vortexfield v1"


class FieldFileError(ValueError):
    """Version mismatch, truncation, or header/row disagreement."""


@dataclass
class FieldFile:
    fields: FieldSet
    domain: DomainSpec
    nr: int
    nz: int
    nu: float
    profile: str
    meta: dict[str, str] = field(default_factory=dict)
    extras: list[str] = field(default_factory=list)

    def grid(self) -> StaggeredGrid:
        return build_grid(self.domain, self.nr, self.nz)


def _fmt(x: float, precision: int = 17) -> str:
    return f"{x:.{precision}g}"


def write_fields(fields: FieldSet, grid: StaggeredGrid, metadata: dict, path,
                 precision: int = 17, extras: list[str] | None = None) -> None:
    """Write the v1 format. metadata must carry `nu` and `profile`; other
    entries go to the `# meta` section."""
    if "nu" not in metadata or "profile" not in metadata:
        raise FieldFileError("metadata needs at least nu and profile")
    meta = dict(metadata)
    nu = float(meta.pop("nu"))
    profile = str(meta.pop("profile"))
    d = grid.domain
    u_c = 0.5 * (fields.u[:-1, :] + fields.u[1:, :])
    w_c = 0.5 * (fields.w[:, :-1] + fields.w[:, 1:])
    p17 = precision
    lines = [
        MAGIC,
        f"# nr={grid.nr} nz={grid.nz} sigma={_fmt(d.sigma)} R={_fmt(d.R)} "
        f"L={_fmt(d.L)} nu={_fmt(nu)} profile={profile}",
        "r,z,u,v,w,p",
    ]
    for j in range(grid.nz):
        z = grid.z_centers[j]
        for i in range(grid.nr):
            row = (grid.r_centers[i], z, u_c[i, j], fields.v[i, j],
                   w_c[i, j], fields.p[i, j])
            lines.append(",".join(_fmt(x, p17) for x in row))
    lines.append("# staggered u")
    for i in range(grid.nr + 1):
        lines.append(",".join(_fmt(x, p17) for x in fields.u[i, :]))
    lines.append("# staggered w")
    for i in range(grid.nr):
        lines.append(",".join(_fmt(x, p17) for x in fields.w[i, :]))
    if meta:
        lines.append("# meta")
        for k in sorted(meta):
            lines.append(f"{k}={meta[k]}")
    if extras:
        lines.extend(extras)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_header(line: str) -> dict[str, str]:
    if not line.startswith("# "):
        raise FieldFileError(f"bad header line: {line!r}")
    out = {}
    for tok in line[2:].split():
        if "=" not in tok:
            raise FieldFileError(f"bad header token {tok!r}")
        k, v = tok.split("=", 1)
        out[k] = v
    return out


def read_fields(path) -> FieldFile:
    """Read a v1 file losslessly (staggered appendices included)."""
    with open(path) as fh:
        raw = fh.read().splitlines()
    if not raw:
        raise FieldFileError("empty file")
    if raw[0].strip() != MAGIC:
        raise FieldFileError(
            f"version mismatch: expected {MAGIC!r}, got {raw[0]!r}")
    if len(raw) < 3:
        raise FieldFileError("truncated file: missing header")
    hdr = _parse_header(raw[1])
    try:
        nr = int(hdr["nr"])
        nz = int(hdr["nz"])
        domain = DomainSpec(sigma=float(hdr["sigma"]), R=float(hdr["R"]),
                            L=float(hdr["L"]))
        nu = float(hdr["nu"])
        profile = hdr["profile"]
    except KeyError as exc:
        raise FieldFileError(f"header missing {exc}") from exc
    if raw[2].strip() != "r,z,u,v,w,p":
        raise FieldFileError(f"bad column header: {raw[2]!r}")

    n_rows = nr * nz
    body = raw[3:]
    if len(body) < n_rows:
        raise FieldFileError(
            f"truncated file: {len(body)} rows, header says {n_rows}")
    v = np.empty((nr, nz))
    p = np.empty((nr, nz))
    for k in range(n_rows):
        parts = body[k].split(",")
        if len(parts) != 6:
            raise FieldFileError(f"row {k}: expected 6 columns, got {len(parts)}")
        j, i = divmod(k, nr)
        try:
            v[i, j] = float(parts[3])
            p[i, j] = float(parts[5])
        except ValueError as exc:
            raise FieldFileError(f"row {k}: bad number") from exc

    pos = 3 + n_rows
    if pos >= len(raw) or raw[pos].strip() != "# staggered u":
        raise FieldFileError("missing '# staggered u' section")
    if pos + 1 + (nr + 1) > len(raw):
        raise FieldFileError("truncated staggered u section")
    u = np.empty((nr + 1, nz))
    for i in range(nr + 1):
        parts = raw[pos + 1 + i].split(",")
        if len(parts) != nz:
            raise FieldFileError(f"staggered u line {i}: {len(parts)} != {nz}")
        u[i, :] = [float(x) for x in parts]
    pos += 1 + (nr + 1)
    if pos >= len(raw) or raw[pos].strip() != "# staggered w":
        raise FieldFileError("missing '# staggered w' section")
    if pos + 1 + nr > len(raw):
        raise FieldFileError("truncated staggered w section")
    w = np.empty((nr, nz + 1))
    for i in range(nr):
        parts = raw[pos + 1 + i].split(",")
        if len(parts) != nz + 1:
            raise FieldFileError(f"staggered w line {i}: {len(parts)} != {nz + 1}")
        w[i, :] = [float(x) for x in parts]
    pos += 1 + nr

    meta: dict[str, str] = {}
    extras: list[str] = []
    if pos < len(raw) and raw[pos].strip() == "# meta":
        pos += 1
        while pos < len(raw) and not raw[pos].startswith("#"):
            line = raw[pos].strip()
            if line:
                if "=" not in line:
                    raise FieldFileError(f"bad meta line {line!r}")
                k, val = line.split("=", 1)
                meta[k] = val
            pos += 1
    extras = [line for line in raw[pos:] if line.strip()]

    fields = FieldSet(u=u, v=v, w=w, p=p)
    return FieldFile(fields=fields, domain=domain, nr=nr, nz=nz, nu=nu,
                     profile=profile, meta=meta, extras=extras)

import numpy as np
import pytest

from vortexplot.reader import ReadError, load


def make_file(path, nr=3, nz=2, extras=(), meta=()):
    """Hand-build a tiny v1 file (the format is the interface)."""
    sigma, R, L = 0.5, 2.0, 1.0
    dr, dz = (R - sigma) / nr, L / nz
    rc = sigma + dr * (np.arange(nr) + 0.5)
    zc = dz * (np.arange(nz) + 0.5)
    lines = [
        "# vortexfield v1",
        f"# nr={nr} nz={nz} sigma={sigma} R={R} L={L} nu=0.01 profile=uniform:g=1",
        "r,z,u,v,w,p",
    ]
    k = 0.0
    for j in range(nz):
        for i in range(nr):
            lines.append(f"{rc[i]:.17g},{zc[j]:.17g},{k},{k+1},{k+2},{k+3}")
            k += 10.0
    lines.append("# staggered u")
    for i in range(nr + 1):
        lines.append(",".join(str(100.0 + i * nz + j) for j in range(nz)))
    lines.append("# staggered w")
    for i in range(nr):
        lines.append(",".join(str(200.0 + i * (nz + 1) + j) for j in range(nz + 1)))
    for k_, v_ in meta:
        if not any(l == "# meta" for l in lines):
            lines.append("# meta")
        lines.append(f"{k_}={v_}")
    lines.extend(extras)
    path.write_text("\n".join(lines) + "\n")
    return path


def test_load_round_values(tmp_path):
    data = load(make_file(tmp_path / "f.dat"))
    assert data.nr == 3 and data.nz == 2
    assert data.v[0, 0] == 1.0
    assert data.v[1, 0] == 11.0
    assert data.v[0, 1] == 31.0  # z-major rows
    assert data.u_stag[0, 0] == 100.0
    assert data.w_stag[2, 2] == 208.0
    assert data.u_stag.shape == (4, 2)
    assert data.w_stag.shape == (3, 3)


def test_load_meta_and_extras(tmp_path):
    p = make_file(tmp_path / "f.dat", meta=[("converged", "true")],
                  extras=["# future", "1,2,3"])
    data = load(p)
    assert data.meta["converged"] == "true"


def test_rejects_other_versions(tmp_path):
    p = make_file(tmp_path / "f.dat")
    p.write_text(p.read_text().replace("v1", "v9"))
    with pytest.raises(ReadError):
        load(p)


def test_rejects_truncation(tmp_path):
    p = make_file(tmp_path / "f.dat")
    lines = p.read_text().splitlines()
    p.write_text("\n".join(lines[:5]))
    with pytest.raises(ReadError):
        load(p)

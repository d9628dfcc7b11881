import numpy as np
import pytest

from vortexflow.grid import DomainSpec, GridError, build_grid


def test_uniform_partition():
    g = build_grid(DomainSpec(sigma=0.1, R=2.1, L=1.0), nr=4, nz=2)
    assert np.allclose(g.r_faces, [0.1, 0.6, 1.1, 1.6, 2.1])
    assert np.allclose(g.z_faces, [0.0, 0.5, 1.0])
    assert np.allclose(g.r_centers, [0.35, 0.85, 1.35, 1.85])
    assert g.dr == pytest.approx(0.5)
    assert g.dz == pytest.approx(0.5)


def test_counts():
    g = build_grid(DomainSpec(sigma=0.1, R=2.1, L=1.0), nr=7, nz=5)
    assert len(g.r_centers) == 7
    assert len(g.r_faces) == 8
    assert len(g.z_centers) == 5
    assert len(g.z_faces) == 6


def test_cell_weight_value():
    # weight = r*dr*dz with the 2*pi factor dropped
    g = build_grid(DomainSpec(sigma=0.75, R=2.75, L=1.0), nr=4, nz=2)
    assert g.r_centers[0] == pytest.approx(1.0)
    assert g.cell_weights()[0, 0] == pytest.approx(0.25)


def test_weights_sum_to_annulus_volume():
    dom = DomainSpec(sigma=0.1, R=4.0, L=10.0)
    g = build_grid(dom, nr=31, nz=17)
    total = g.cell_weights().sum()
    exact = (dom.R**2 - dom.sigma**2) / 2.0 * dom.L
    assert total == pytest.approx(exact, rel=1e-13)


def test_endpoints_exact():
    dom = DomainSpec(sigma=0.1, R=4.0, L=10.0)
    g = build_grid(dom, nr=129, nz=77)
    assert g.r_faces[0] == dom.sigma
    assert g.r_faces[-1] == dom.R
    assert g.z_faces[0] == 0.0
    assert g.z_faces[-1] == dom.L
    assert np.all(np.diff(g.r_faces) > 0)
    assert np.all(np.diff(g.z_faces) > 0)


@pytest.mark.parametrize("sigma,R,L", [(-0.1, 2.0, 1.0), (0.0, 2.0, 1.0),
                                       (2.0, 2.0, 1.0), (2.5, 2.0, 1.0),
                                       (0.1, 2.0, 0.0), (0.1, 2.0, -1.0)])
def test_bad_domain(sigma, R, L):
    with pytest.raises(GridError):
        DomainSpec(sigma=sigma, R=R, L=L)


@pytest.mark.parametrize("nr,nz", [(1, 4), (4, 1), (0, 4), (-2, 4)])
def test_bad_counts(nr, nz):
    with pytest.raises(GridError):
        build_grid(DomainSpec(sigma=0.1, R=2.1, L=1.0), nr=nr, nz=nz)


def test_grid_immutable():
    g = build_grid(DomainSpec(sigma=0.1, R=2.1, L=1.0), nr=4, nz=2)
    with pytest.raises(ValueError):
        g.r_faces[0] = 0.0

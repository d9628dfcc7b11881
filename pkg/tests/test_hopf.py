import math

import numpy as np
import pytest

from vortexflow.hopf import (
    HopfError,
    HopfParams,
    background_swirl,
    theta_eps,
    theta_eps_prime,
    xi_eps,
)

HP = HopfParams(eps=0.5, sigma=0.1, gamma=0.1 * math.pi)


def test_delta_derived():
    assert HP.delta == pytest.approx(math.exp(-2.0))
    assert HopfParams(eps=0.25, sigma=1.0, gamma=1.0).delta == pytest.approx(math.exp(-4.0))


def test_params_validation():
    with pytest.raises(HopfError):
        HopfParams(eps=0.0, sigma=0.1, gamma=1.0)
    with pytest.raises(HopfError):
        HopfParams(eps=1.0, sigma=0.1, gamma=1.0)
    with pytest.raises(HopfError):
        HopfParams(eps=0.5, sigma=-1.0, gamma=1.0)
    with pytest.raises(HopfError):
        xi_eps(HP, 0.05)


def test_xi_branches():
    d = HP.delta
    assert xi_eps(HP, HP.sigma + d * d / 2) == pytest.approx(1.0)
    assert xi_eps(HP, HP.sigma) == pytest.approx(1.0)
    assert xi_eps(HP, HP.sigma + d) == pytest.approx(0.0)
    assert xi_eps(HP, HP.sigma + 2 * d) == pytest.approx(0.0)
    # midpoint in log scale: xi = 1/2 regardless of eps
    for eps in (0.2, 0.5, 0.8):
        hp = HopfParams(eps=eps, sigma=0.1, gamma=1.0)
        r = hp.sigma + hp.delta ** 1.5
        assert xi_eps(hp, r) == pytest.approx(0.5)


def test_xi_continuous_and_monotone():
    d = HP.delta
    r = np.linspace(HP.sigma, HP.sigma + 2 * d, 10001)
    x = xi_eps(HP, r)
    # max slope is eps/(r-sigma) at r-sigma = delta^2
    max_slope = HP.eps / d**2
    dr = r[1] - r[0]
    assert np.max(np.abs(np.diff(x))) <= dr * max_slope * (1 + 1e-9)
    assert np.all(np.diff(x) <= 1e-15)


def test_theta_plateau_and_support():
    d = HP.delta
    r_in = np.linspace(HP.sigma, HP.sigma + d * d / 2, 50)
    assert np.allclose(theta_eps(HP, r_in), 1.0, atol=1e-14)
    r_out = np.linspace(HP.sigma + d + d * d / 2, HP.sigma + 2 * d, 50)
    assert np.allclose(theta_eps(HP, r_out), 0.0, atol=1e-14)
    mid = theta_eps(HP, np.linspace(HP.sigma, HP.sigma + 2 * d, 2001))
    assert np.all((mid >= -1e-14) & (mid <= 1 + 1e-14))


def test_theta_prime_bound_and_fd():
    # |theta'| <= 2*eps/(r-sigma) on the transition zone, and the closed-form
    # derivative matches central finite differences
    d = HP.delta
    r = np.linspace(HP.sigma + d * d / 2 * 1.0001, HP.sigma + d + d * d / 2, 4001)
    tp = theta_eps_prime(HP, r)
    bound = 2.0 * HP.eps / (r - HP.sigma)
    assert np.all(np.abs(tp) <= bound * (1 + 1e-12))
    h = 1e-9
    fd = (theta_eps(HP, r + h) - theta_eps(HP, r - h)) / (2 * h)
    assert np.max(np.abs(fd - tp)) <= 1e-4 * np.max(np.abs(tp)) + 1e-10


def test_background_swirl_values():
    d = HP.delta
    coef = HP.gamma / (2 * math.pi)
    assert background_swirl(HP, HP.sigma) == pytest.approx(coef / HP.sigma)
    r_far = np.linspace(HP.sigma + d + d * d / 2, HP.sigma + 3 * d, 20)
    assert np.allclose(background_swirl(HP, r_far), 0.0, atol=1e-14)
    r_plat = np.linspace(HP.sigma, HP.sigma + d * d / 2, 20)
    assert np.allclose(background_swirl(HP, r_plat), coef / r_plat, atol=1e-13)


def test_background_swirl_transition_bound():
    # |v| <= 2*(eps/(r-sigma) + |phi'(r)|) on the transition zone
    d = HP.delta
    r = np.linspace(HP.sigma + d * d / 2 * 1.0001, HP.sigma + d + d * d / 2, 2001)
    v = background_swirl(HP, r)
    coef = HP.gamma / (2 * math.pi)
    bound = 2.0 * (HP.eps / (r - HP.sigma) + coef / r)
    assert np.all(np.abs(v) <= bound * (1 + 1e-12))

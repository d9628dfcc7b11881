"""Hopf-style corner regularization: cutoff functions and background swirl.

The no-slip plane and the rotating inner wall meet with mismatched swirl
data at the corner (r=sigma, z=0). The classical cure is a background flow
supported in a thin strip next to the cylinder: a logarithmic cutoff
xi_eps, its mollification theta_eps (realized here as an exact sliding
average, so every identity below is closed-form), and the swirl
v = -d(theta_eps * phi)/dr derived from the potential-vortex stream
function phi(r) = -(gamma/2pi) ln r. Used as the optional "hopf" bottom
boundary mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class HopfError(ValueError):
    """Invalid cutoff parameters or evaluation point."""


@dataclass(frozen=True)
class HopfParams:
    """Cutoff parameters: eps in (0,1), derived delta = exp(-1/eps)."""

    eps: float
    sigma: float
    gamma: float

    def __post_init__(self):
        if not (0.0 < self.eps < 1.0):
            raise HopfError(f"need 0 < eps < 1, got {self.eps}")
        if self.sigma <= 0.0:
            raise HopfError(f"need sigma > 0, got {self.sigma}")

    @property
    def delta(self) -> float:
        # always recomputed, never stored independently
        return math.exp(-1.0 / self.eps)


def _check_r(hp: HopfParams, r):
    r = np.asarray(r, dtype=float)
    if np.any(r < hp.sigma - 1e-15 * hp.sigma):
        raise HopfError("evaluation point left of the inner wall")
    return r


def xi_eps(hp: HopfParams, r):
    """Logarithmic cutoff: 1 up to sigma+delta^2, eps*ln(delta/(r-sigma))
    up to sigma+delta, 0 beyond. Continuous, non-increasing."""
    r = _check_r(hp, r)
    d = hp.delta
    t = r - hp.sigma
    out = np.zeros_like(t)
    out[t <= d * d] = 1.0
    mid = (t > d * d) & (t < d)
    out[mid] = hp.eps * np.log(d / t[mid])
    if out.ndim == 0:
        return float(out)
    return out


def _xi_antiderivative(hp: HopfParams, t):
    """Integral of xi_eps from the wall to wall-distance t, with xi extended
    by 1 for t < delta^2 (covers window overhang below the wall)."""
    d = hp.delta
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    lo = t <= d * d
    out[lo] = t[lo]
    hi = t >= d
    out[hi] = hp.eps * (d - d * d)
    mid = ~lo & ~hi
    tm = t[mid]
    out[mid] = hp.eps * (tm * np.log(d / tm) + tm - d * d)
    return out


def theta_eps(hp: HopfParams, r):
    """Mollified cutoff: sliding average of xi_eps with half-width delta^2/2.

    Exactly 1 on [sigma, sigma+delta^2/2] and exactly 0 for
    r >= sigma+delta+delta^2/2; C^1 in between.
    """
    r = _check_r(hp, r)
    d = hp.delta
    h = 0.5 * d * d
    t = np.atleast_1d(r - hp.sigma)
    out = (_xi_antiderivative(hp, t + h) - _xi_antiderivative(hp, t - h)) / (2.0 * h)
    if np.ndim(r) == 0:
        return float(out[0])
    return out


def theta_eps_prime(hp: HopfParams, r):
    """Exact derivative of the sliding average: [xi(t+h) - xi(t-h)]/(2h)."""
    r = _check_r(hp, r)
    d = hp.delta
    h = 0.5 * d * d
    t = np.atleast_1d(r - hp.sigma)

    def xi_ext(s):
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        out[s <= d * d] = 1.0
        mid = (s > d * d) & (s < d)
        out[mid] = hp.eps * np.log(d / s[mid])
        return out

    out = (xi_ext(t + h) - xi_ext(t - h)) / (2.0 * h)
    if np.ndim(r) == 0:
        return float(out[0])
    return out


def background_swirl(hp: HopfParams, r):
    """Swirl of the background flow, v = theta'*(gamma/2pi)*ln r + theta*gamma/(2pi r).

    Equals gamma/(2pi r) on the inner plateau (so gamma/(2pi sigma) at the
    wall) and vanishes for r >= sigma+delta+delta^2/2.
    """
    r = _check_r(hp, r)
    rr = np.atleast_1d(np.asarray(r, dtype=float))
    coef = hp.gamma / (2.0 * math.pi)
    out = theta_eps_prime(hp, rr) * coef * np.log(rr) + np.atleast_1d(
        theta_eps(hp, rr)
    ) * coef / rr
    if np.ndim(r) == 0:
        return float(out[0])
    return out

"""Steady axisymmetric Navier-Stokes solver for the swirling vortex driven by
a rotating cylinder over a perpendicular plane."""

__version__ = "0.1.0"

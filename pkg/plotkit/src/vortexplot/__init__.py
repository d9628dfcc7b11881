"""Rendering toolkit for `vortexfield v1` files."""

__version__ = "0.1.0"

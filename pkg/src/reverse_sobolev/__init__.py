"""Spectral numerics for conformally invariant reverse Sobolev inequalities on spheres."""

__version__ = "0.1.0"

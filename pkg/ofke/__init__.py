"""Orbital-free kinetic-energy functionals, bounds and fits on 1D/radial grids."""

__version__ = "1.0.0"

"""Exact and approximate Nash equilibrium sets of parameterized games on grids."""

__version__ = "0.1.0"

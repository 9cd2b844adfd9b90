"""Numerical laboratory for integrable time-dependent central potentials."""

__version__ = "0.1.0"

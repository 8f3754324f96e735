"""Theta partial sums, their modular companion Omega_s, and continued-fraction dynamics."""

__version__ = "0.1.0"

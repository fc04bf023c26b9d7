"""Dynamics, relative equilibria and stability of the orbitron: an
axisymmetric magnetic rigid body in an axisymmetric, mirror-symmetric field."""

__version__ = "0.1.0"

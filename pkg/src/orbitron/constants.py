"""Numerical tolerances used across the package, kept in one place."""

from dataclasses import dataclass
import math


@dataclass(frozen=True)
class Tolerances:
    # lie algebra
    antisymmetry: float = 1e-10
    orthonormality: float = 1e-12
    reproject: float = 1e-10
    # field
    pole_guard: float = 1e-9          # times h
    fd_rel_step: float = 1e-5         # Richardson base step, relative to length scale
    # relative equilibria
    residual: float = 1e-9
    criticality: float = 1e-6
    # stability
    pivot_zero: float = 1e-12         # times max|Q|
    hessian_symmetry: float = 1e-9
    boundary_margin: float = 1e-9
    # linearization
    eig_re_rel: float = 1e-8          # times spectral radius
    eig_re_floor: float = 1e-12
    complement_rank: float = 1e-12
    eig_max_iter: int = 10_000


TOL = Tolerances()

MU0 = 4.0e-7 * math.pi

# Reference parameter set: h in m, M in kg, mu in A m^2, q in A m, inertias in kg m^2.
FIG3 = dict(h=0.05, M=0.0068, mu0=MU0, mu=-0.18375, q=17.58, I1=0.17e-6, I3=0.1e-6)

"""Regular (orbiting) and singular (on-axis) relative equilibria."""

from dataclasses import dataclass
import math

import numpy as np

from .constants import TOL
from .dynamics import VelocityPair, augmented_hamiltonian
from .errors import SignConstraint
from .field import StandardField
from .lie import E3, PhasePoint, rot_z


@dataclass(frozen=True)
class RelEqBranch:
    z0: PhasePoint
    xi: VelocityPair
    kind: str           # "regular" | "singular"
    field_kind: str     # "standard" | "generalized"
    r: float
    theta0: float
    sign: int

    def __post_init__(self):
        if self.kind not in ("regular", "singular"):
            raise ValueError(f"unknown branch kind {self.kind!r}")
        if (self.kind == "regular") != (self.r > 0):
            raise ValueError("regular branches have r > 0, singular ones r = 0")

    @property
    def Pi0(self):
        return float(self.z0.Pi[2])

    def to_dict(self):
        return {"kind": self.kind, "field_kind": self.field_kind, "r": self.r,
                "theta0": self.theta0, "sign": self.sign,
                "xi1": self.xi.xi1, "xi2": self.xi.xi2, "z0": self.z0.to_dict()}

    @classmethod
    def from_dict(cls, d):
        return cls(PhasePoint.from_dict(d["z0"]), VelocityPair(d["xi1"], d["xi2"]),
                   d["kind"], d["field_kind"], d["r"], d["theta0"], d["sign"])


@dataclass(frozen=True)
class Residual:
    rot: np.ndarray      # derivative in the attitude direction
    pos: np.ndarray      # in the position direction
    ang: np.ndarray      # in the angular-momentum direction
    lin: np.ndarray      # in the linear-momentum direction

    def as_vector(self):
        return np.concatenate([self.rot, self.pos, self.ang, self.lin])


def releq_residual(body, field, z, xi):
    """Gradient of h - J^xi at z, split into its four blocks.

    Attitude variations are taken as A -> exp(hat(a)) A. All four blocks
    vanish exactly at relative equilibria with velocity xi.
    """
    A, x, Pi, p = z.A, z.x, z.Pi, z.p
    B = field.b(x)
    DB = field.db(x)
    Ae3, Ap, APi = A @ E3, A @ p, A @ Pi
    x1 = xi.xi1
    rot = body.mu * np.cross(B, Ae3) + x1 * (np.cross(Ap, np.cross(x, E3)) - np.cross(APi, E3))
    pos = -body.mu * DB.T @ Ae3 - x1 * np.cross(Ap, E3)
    ang = body.inertia_inv @ Pi + xi.xi2 * E3 - x1 * A.T @ E3
    lin = p / body.M - x1 * A.T @ np.cross(E3, x)
    return Residual(rot, pos, ang, lin)


def residual_scales(body, field, z, xi):
    """Natural magnitudes for the four residual blocks."""
    B = np.linalg.norm(field.b(z.x))
    L = getattr(field, "length_scale", 1.0)
    w = max(abs(xi.xi1), abs(xi.xi2), 1e-300)
    force = max(abs(body.mu) * B / L, body.M * w * w * max(np.linalg.norm(z.x), L), 1e-300)
    torque = max(abs(body.mu) * B, w * np.linalg.norm(z.Pi), 1e-300)
    return torque, force, w, w * max(np.linalg.norm(z.x), L)


def scaled_residual(body, field, z, xi):
    res = releq_residual(body, field, z, xi)
    s = residual_scales(body, field, z, xi)
    return max(np.abs(v).max() / sc for v, sc in zip((res.rot, res.pos, res.ang, res.lin), s))


def xi1_standard(body, field, r):
    """Both orbital rates (+, -) of the regular branch at radius r."""
    if not r > 0:
        raise ValueError("r must be positive")
    mq = body.mu * field.q
    if not mq < 0:
        raise SignConstraint("regular orbits need mu*q < 0")
    D = r * r + field.h ** 2
    w = math.sqrt(-3 * field.h * mq * field.mu0 / (2 * math.pi * body.M * D ** 2.5))
    return w, -w


def xi1_generalized(body, prof):
    if not body.mu * prof.f1p < 0:
        raise SignConstraint("regular orbits need mu*f1p < 0")
    w = math.sqrt(-2 * body.mu * prof.f1p / body.M)
    return w, -w


def _pick(pair, sign):
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return pair[0] if sign == 1 else pair[1]


def make_regular(body, field, r, theta0=0.0, sign=1, xi2=0.0):
    """Circular equatorial orbit of radius r, placed at x0 = (r, 0, 0)."""
    if isinstance(field, StandardField):
        xi1 = _pick(xi1_standard(body, field, r), sign)
        kind = "standard"
    else:
        xi1 = _pick(xi1_generalized(body, field.profile(r)), sign)
        kind = "generalized"
    A0 = rot_z(theta0)
    x0 = np.array([r, 0.0, 0.0])
    Pi0 = body.I3 * (xi1 - xi2) * E3
    p0 = body.M * xi1 * A0.T @ np.array([-x0[1], x0[0], 0.0])
    return RelEqBranch(PhasePoint(A0, x0, Pi0, p0), VelocityPair(xi1, xi2),
                       "regular", kind, float(r), float(theta0), sign)


def make_singular(body, field, xi1, xi2, theta0=0.0):
    """Body sitting at the field centre, spinning about the axis."""
    kind = "standard" if isinstance(field, StandardField) else "generalized"
    z0 = PhasePoint(rot_z(theta0), np.zeros(3), body.I3 * (xi1 - xi2) * E3, np.zeros(3))
    return RelEqBranch(z0, VelocityPair(float(xi1), float(xi2)), "singular", kind,
                       0.0, float(theta0), 1 if xi1 >= 0 else -1)


def canonical(branch):
    """The same relative equilibrium moved by the torus so that A0 = I."""
    if abs(branch.theta0) < 1e-15:
        return branch
    from .dynamics import toral_action
    z = toral_action(0.0, branch.theta0, branch.z0)
    return RelEqBranch(z, branch.xi, branch.kind, branch.field_kind, branch.r, 0.0, branch.sign)


def probe_steps(body, field, z):
    """Step sizes for finite differences along the 12 probe directions."""
    L = getattr(field, "length_scale", 1.0)
    sPi = max(np.linalg.norm(z.Pi), body.I1 * 1.0)
    sp = max(np.linalg.norm(z.p), body.M * L)
    return np.concatenate([np.full(3, 1e-5), np.full(3, 1e-5 * L),
                           np.full(3, 1e-5 * sPi), np.full(3, 1e-5 * sp)])


def fd_augmented_gradient(body, field, z, xi, steps=None):
    """Central-difference gradient of h - J^xi along the 12 probe directions."""
    steps = probe_steps(body, field, z) if steps is None else steps
    g = np.empty(12)
    for k in range(12):
        v = np.zeros(12)
        v[k] = steps[k]
        g[k] = (augmented_hamiltonian(body, field, z.perturbed(v), xi)
                - augmented_hamiltonian(body, field, z.perturbed(-v), xi)) / (2 * steps[k])
    return g


def criticality(body, field, z, xi):
    """Largest scaled component of the finite-difference gradient of h - J^xi."""
    g = fd_augmented_gradient(body, field, z, xi)
    s = residual_scales(body, field, z, xi)
    blocks = [g[0:3] / s[0], g[3:6] / s[1], g[6:9] / s[2], g[9:12] / s[3]]
    return float(max(np.abs(b).max() for b in blocks))


def is_closed(branch, body, field, tol=TOL.residual):
    return scaled_residual(body, field, branch.z0, branch.xi) < tol

"""Hamiltonian, equations of motion, toral symmetry and a RK4 flow."""

from dataclasses import dataclass, field as dc_field
import math

import numpy as np

from .constants import TOL
from .errors import PoleSingularity
from .lie import E3, PhasePoint, hat, orthonormality_defect, project_to_so3, rot_z


@dataclass(frozen=True)
class BodyParams:
    M: float
    I1: float
    I3: float
    mu: float

    def __post_init__(self):
        for name in ("M", "I1", "I3"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a positive finite number, got {v!r}")
        if not math.isfinite(self.mu):
            raise ValueError(f"mu must be finite, got {self.mu!r}")

    @property
    def inertia(self):
        return np.diag([self.I1, self.I1, self.I3])

    @property
    def inertia_inv(self):
        return np.diag([1.0 / self.I1, 1.0 / self.I1, 1.0 / self.I3])

    def to_dict(self):
        return {"M": self.M, "I1": self.I1, "I3": self.I3, "mu": self.mu}


@dataclass(frozen=True)
class VelocityPair:
    xi1: float
    xi2: float


@dataclass(frozen=True)
class MomentumValue:
    J1: float
    J2: float


@dataclass(frozen=True)
class Tangent:
    """Time derivative of a phase point; A_dot is a full 3x3 matrix."""
    A_dot: np.ndarray
    x_dot: np.ndarray
    Pi_dot: np.ndarray
    p_dot: np.ndarray

    def to_vector(self):
        return np.concatenate([self.A_dot.ravel(), self.x_dot, self.Pi_dot, self.p_dot])


def _b_db(field, x):
    f = getattr(field, "b_db", None)
    if f is not None:
        return f(x)
    return field.b(x), field.db(x)


def hamiltonian(body, field, z):
    Om = z.Pi @ body.inertia_inv @ z.Pi
    return 0.5 * Om + z.p @ z.p / (2 * body.M) - body.mu * field.b(z.x) @ (z.A @ E3)


def momentum_map(z):
    J1 = (z.A @ z.Pi + np.cross(z.x, z.A @ z.p))[2]
    return MomentumValue(float(J1), float(-z.Pi[2]))


def augmented_hamiltonian(body, field, z, xi):
    J = momentum_map(z)
    return hamiltonian(body, field, z) - xi.xi1 * J.J1 - xi.xi2 * J.J2


def eom_rhs(body, field, z):
    """Hamilton's equations in body coordinates.

    The torque is mu * (e3 x A^T B): the magnetic moment mu*e3 in the body
    frame crossed with the body-frame field.
    """
    A = z.A
    Om = body.inertia_inv @ z.Pi
    B, DB = _b_db(field, z.x)
    Ae3 = A[:, 2]
    return Tangent(
        A_dot=A @ hat(Om),
        x_dot=A @ z.p / body.M,
        Pi_dot=np.cross(z.Pi, Om) + body.mu * np.cross(E3, A.T @ B),
        p_dot=np.cross(z.p, Om) + body.mu * A.T @ (DB.T @ Ae3),
    )


def toral_action(theta_s, theta_b, z):
    Rs, Rb = rot_z(theta_s), rot_z(theta_b)
    return PhasePoint(Rs @ z.A @ Rb.T, Rs @ z.x, Rb @ z.Pi, Rb @ z.p)


def infinitesimal_generator(xi, z):
    """Velocity of the toral orbit through z in direction (xi1, xi2)."""
    e3h = hat(E3)
    return Tangent(
        A_dot=xi.xi1 * e3h @ z.A - xi.xi2 * z.A @ e3h,
        x_dot=xi.xi1 * np.cross(E3, z.x),
        Pi_dot=xi.xi2 * np.cross(E3, z.Pi),
        p_dot=xi.xi2 * np.cross(E3, z.p),
    )


def relative_orbit(z0, xi, t):
    """exp(t xi) . z0: the motion a relative equilibrium must follow."""
    return toral_action(xi.xi1 * t, xi.xi2 * t, z0)


# -- integration ------------------------------------------------------------

def _rhs_flat(body, field, y, xi=None):
    A = y[:9].reshape(3, 3)
    x, Pi, p = y[9:12], y[12:15], y[15:18]
    Om = np.array([Pi[0] / body.I1, Pi[1] / body.I1, Pi[2] / body.I3])
    B, DB = _b_db(field, x)
    Ae3 = A[:, 2]
    out = np.empty(18)
    out[:9] = (A @ hat(Om)).ravel()
    out[9:12] = A @ p / body.M
    out[12:15] = np.cross(Pi, Om) + body.mu * np.cross(E3, A.T @ B)
    out[15:18] = np.cross(p, Om) + body.mu * (A.T @ (DB.T @ Ae3))
    if xi is not None:
        # flow of the augmented Hamiltonian: subtract the generator
        e3h = hat(E3)
        out[:9] -= (xi.xi1 * e3h @ A - xi.xi2 * A @ e3h).ravel()
        out[9:12] -= xi.xi1 * np.cross(E3, x)
        out[12:15] -= xi.xi2 * np.cross(E3, Pi)
        out[15:18] -= xi.xi2 * np.cross(E3, p)
    return out


@dataclass
class Trajectory:
    t: np.ndarray                 # stored times
    states: np.ndarray            # (n, 18) flat phase points
    h: np.ndarray                 # energy at every step
    J: np.ndarray                 # (n_steps, 2) momentum map at every step
    t_full: np.ndarray
    flag: str = "ok"
    message: str = ""
    reprojections: int = 0
    scales: dict = dc_field(default_factory=dict)

    def point(self, i):
        return PhasePoint.from_vector(self.states[i])

    def max_rel_drift(self):
        """Relative drift of h, J1, J2 against their initial values.

        Each quantity is scaled by max(|initial value|, spread of its parts)
        so that values passing near zero do not blow the ratio up.
        """
        out = {}
        for name, series in (("h", self.h), ("J1", self.J[:, 0]), ("J2", self.J[:, 1])):
            ref = max(abs(series[0]), self.scales.get(name, 0.0), 1e-300)
            out[name] = float(np.abs(series - series[0]).max() / ref)
        return out


def _energy_scales(body, field, z):
    """Magnitudes of the individual energy and momentum terms at z."""
    kin = 0.5 * z.Pi @ body.inertia_inv @ z.Pi + z.p @ z.p / (2 * body.M)
    pot = abs(body.mu * field.b(z.x) @ (z.A @ E3))
    Ap = z.A @ z.p
    return {"h": kin + pot,
            "J1": np.linalg.norm(z.A @ z.Pi) + np.linalg.norm(np.cross(z.x, Ap)),
            "J2": np.linalg.norm(z.Pi)}


def _pole_arrays(field):
    """(k, h, guard) arrays when the field is a superposition of pole pairs."""
    from .field import PolePairsField, StandardField
    if type(field) is StandardField:
        parts = [field]
    elif type(field) is PolePairsField:
        parts = field.parts
    else:
        return None
    ks = np.array([p.k for p in parts])
    hs = np.array([p.h for p in parts])
    return ks, hs, TOL.pole_guard * hs


def integrate(body, field, z0, t_end, dt, stride=1, xi=None, compiled=True):
    """Classical RK4 on the 18 ambient coordinates.

    After each step A is projected back to SO(3) if its orthonormality
    defect exceeds the tolerance. Diagnostics are kept at every step;
    states are stored every ``stride`` steps. With ``xi`` the flow of
    h - J^xi is integrated instead. Pole-pair fields run through a
    compiled kernel unless ``compiled`` is false; other fields use the
    Python loop below, which follows the same scheme.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if not t_end >= 0:
        raise ValueError("t_end must be non-negative")
    if int(stride) < 1:
        raise ValueError("stride must be a positive integer")
    stride = int(stride)
    n = int(round(t_end / dt))
    scales = _energy_scales(body, field, z0)
    poles = _pole_arrays(field) if compiled else None
    if poles is not None:
        from . import _kernels
        x1, x2 = (0.0, 0.0) if xi is None else (float(xi.xi1), float(xi.xi2))
        states, ts, hs, Js, nproj, status, done = _kernels.rk4_pole_pairs(
            z0.to_vector().astype(float), n, float(dt), stride, float(body.M),
            float(body.I1), float(body.I3), float(body.mu), *poles, x1, x2,
            xi is not None, TOL.reproject)
        flag, msg = "ok", ""
        if status == _kernels.STATUS_POLE:
            flag = "pole_singularity"
            msg = f"trajectory reached a pole after {done} steps"
        return Trajectory(ts, states, hs, Js, np.arange(done + 1) * dt, flag, msg,
                          int(nproj), scales)
    y = z0.to_vector().copy()
    rhs = lambda u: _rhs_flat(body, field, u, xi)
    hs = np.empty(n + 1)
    Js = np.empty((n + 1, 2))
    ts = [0.0]
    states = [y.copy()]

    def diag(u, i):
        z = PhasePoint.from_vector(u)
        hs[i] = hamiltonian(body, field, z)
        J = momentum_map(z)
        Js[i] = (J.J1, J.J2)

    diag(y, 0)
    flag, msg, nproj = "ok", "", 0
    done = 0
    try:
        for i in range(1, n + 1):
            k1 = rhs(y)
            k2 = rhs(y + 0.5 * dt * k1)
            k3 = rhs(y + 0.5 * dt * k2)
            k4 = rhs(y + dt * k3)
            y = y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            A = y[:9].reshape(3, 3)
            if orthonormality_defect(A) > TOL.reproject:
                y[:9] = project_to_so3(A).ravel()
                nproj += 1
            diag(y, i)
            done = i
            if i % stride == 0 or i == n:
                ts.append(i * dt)
                states.append(y.copy())
    except PoleSingularity as exc:
        flag, msg = "pole_singularity", str(exc)
    return Trajectory(np.array(ts), np.array(states), hs[:done + 1], Js[:done + 1],
                      np.arange(done + 1) * dt, flag, msg, nproj, scales)


TRAJECTORY_COLUMNS = (["t"] + [f"A{i}{j}" for i in range(1, 4) for j in range(1, 4)]
                      + ["x1", "x2", "x3", "Pi1", "Pi2", "Pi3", "p1", "p2", "p3",
                         "h", "J1", "J2"])


def trajectory_rows(traj):
    """Rows (t, A(9), x, Pi, p, h, J1, J2) for the stored states."""
    dt = traj.t_full[1] - traj.t_full[0] if len(traj.t_full) > 1 else 0.0
    for t, s in zip(traj.t, traj.states):
        i = int(round(t / dt)) if dt > 0 else 0
        yield [t, *s, traj.h[i], traj.J[i, 0], traj.J[i, 1]]

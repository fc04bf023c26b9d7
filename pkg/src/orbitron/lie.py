"""Matrix kernel for SO(3) and SE(3): hat/vee, exponential, trivializations.

Vectors are length-3 numpy arrays, matrices are 3x3 arrays. Phase points
are stored in body coordinates: ((A, x), (Pi, p)).
"""

from dataclasses import dataclass

import numpy as np

from .constants import TOL
from .errors import NotAntisymmetric

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def hat(v):
    v1, v2, v3 = v
    return np.array([[0.0, -v3, v2],
                     [v3, 0.0, -v1],
                     [-v2, v1, 0.0]])


def vee(m, tol=TOL.antisymmetry):
    m = np.asarray(m, dtype=float)
    scale = max(1.0, np.abs(m).max())
    if np.abs(m + m.T).max() > tol * scale:
        raise NotAntisymmetric("matrix is not antisymmetric")
    a = 0.5 * (m - m.T)
    return np.array([a[2, 1], a[0, 2], a[1, 0]])


def rot_z(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def exp_so3(v):
    """Rodrigues formula for exp(hat(v))."""
    v = np.asarray(v, dtype=float)
    th = np.linalg.norm(v)
    K = hat(v)
    if th < 1e-8:
        # omitted Taylor terms are O(th^3), below rounding for th < 1e-8
        return np.eye(3) + K + 0.5 * K @ K
    return np.eye(3) + (np.sin(th) / th) * K + ((1.0 - np.cos(th)) / th**2) * (K @ K)


def project_to_so3(A):
    """Nearest rotation in the Frobenius sense (polar factor)."""
    U, _, Vt = np.linalg.svd(A)
    R = U @ Vt
    if np.linalg.det(R) < 0:
        U[:, -1] *= -1.0
        R = U @ Vt
    return R


def orthonormality_defect(A):
    return np.abs(A.T @ A - np.eye(3)).max()


def body_from_space(A, x, Pi_s, p_s):
    """Spatial momenta to body momenta for the configuration (A, x)."""
    Pi_b = A.T @ (Pi_s - np.cross(x, p_s))
    p_b = A.T @ p_s
    return Pi_b, p_b


def space_from_body(A, x, Pi_b, p_b):
    p_s = A @ p_b
    Pi_s = A @ Pi_b + np.cross(x, p_s)
    return Pi_s, p_s


def coad_se3(rho, tau, mu, alpha):
    """ad^* of (rho, tau) in se(3) acting on (mu, alpha) in se(3)^*."""
    return np.cross(mu, rho) + np.cross(alpha, tau), np.cross(alpha, rho)


@dataclass(frozen=True)
class SE3Element:
    A: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "A", _frozen(self.A))
        object.__setattr__(self, "x", _frozen(self.x))

    def is_valid(self, tol=TOL.orthonormality):
        return (orthonormality_defect(self.A) <= tol
                and abs(np.linalg.det(self.A) - 1.0) <= tol)


@dataclass(frozen=True)
class BodyMomentum:
    Pi: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "Pi", _frozen(self.Pi))
        object.__setattr__(self, "p", _frozen(self.p))


@dataclass(frozen=True)
class PhasePoint:
    """Point ((A, x), (Pi, p)) of T*SE(3) in body coordinates."""
    A: np.ndarray
    x: np.ndarray
    Pi: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        for name in ("A", "x", "Pi", "p"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        if self.A.shape != (3, 3) or any(getattr(self, n).shape != (3,) for n in ("x", "Pi", "p")):
            raise ValueError("phase point components have wrong shapes")

    @property
    def g(self):
        return SE3Element(self.A, self.x)

    @property
    def m(self):
        return BodyMomentum(self.Pi, self.p)

    def to_vector(self):
        """Flat 18-vector (A row-major, x, Pi, p)."""
        return np.concatenate([self.A.ravel(), self.x, self.Pi, self.p])

    @classmethod
    def from_vector(cls, y):
        y = np.asarray(y, dtype=float)
        return cls(y[:9].reshape(3, 3), y[9:12], y[12:15], y[15:18])

    def perturbed(self, v):
        """Move along a 12-vector (a, dx, dPi, dp) with A -> exp(hat(a)) A."""
        v = np.asarray(v, dtype=float)
        return PhasePoint(exp_so3(v[:3]) @ self.A, self.x + v[3:6],
                          self.Pi + v[6:9], self.p + v[9:12])

    def to_dict(self):
        return {"A": self.A.tolist(), "x": self.x.tolist(),
                "Pi": self.Pi.tolist(), "p": self.p.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(np.array(d["A"]), np.array(d["x"]), np.array(d["Pi"]), np.array(d["p"]))

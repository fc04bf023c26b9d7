"""Axisymmetric, mirror-symmetric magnetic fields.

Every field exposes ``b(x)``, ``db(x)`` (Jacobian, ``db[i, j] = dB_i/dx_j``)
and ``hess_bz(x)``, plus the equatorial profile ``profile(r)`` of
``B_z(x, y, z) = f(x^2 + y^2, z)`` at ``v = r^2, z = 0``.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import fd
from .constants import MU0, TOL
from .errors import PoleSingularity
from .lie import rot_z


@dataclass(frozen=True)
class EquatorialProfile:
    """f and its derivatives at (v, z) = (r^2, 0)."""
    f0: float
    f1p: float    # df/dv
    f1pp: float   # d2f/dv2
    f2pp: float   # d2f/dz2

    def to_dict(self):
        return {"f0": self.f0, "f1p": self.f1p, "f1pp": self.f1pp, "f2pp": self.f2pp}


def equatorial_jets(prof, x, y):
    """B, DB and Hess(B_z) at (x, y, 0) from the profile at r^2 = x^2 + y^2.

    Uses B_x = B_y = 0 on the mirror plane and curl B = 0.
    """
    a = prof.f1p
    B = np.array([0.0, 0.0, prof.f0])
    DB = np.array([[0.0, 0.0, 2 * x * a],
                   [0.0, 0.0, 2 * y * a],
                   [2 * x * a, 2 * y * a, 0.0]])
    c = prof.f1pp
    H = np.array([[2 * a + 4 * x * x * c, 4 * x * y * c, 0.0],
                  [4 * x * y * c, 2 * a + 4 * y * y * c, 0.0],
                  [0.0, 0.0, prof.f2pp]])
    return B, DB, H


class FieldModel:
    """Interface. Subclasses without a full field set ``has_full_b = False``."""

    has_full_b = True
    length_scale = 1.0

    def b(self, x):
        raise NotImplementedError

    def db(self, x):
        return fd.jacobian(self.b, x, 1e-6 * self.length_scale)

    def hess_bz(self, x):
        step = 1e-4 * self.length_scale
        return fd.jacobian(lambda y: self.db(y)[2], x, step)

    def d2b_contract(self, x, w):
        """d/dx of DB(x)^T w for a fixed vector w (a 3x3 matrix)."""
        step = 1e-4 * self.length_scale
        return fd.jacobian(lambda y: self.db(y).T @ w, x, step)

    def profile(self, r):
        raise NotImplementedError


class StandardField(FieldModel):
    """Two opposite magnetic poles of strength q at (0, 0, +h) and (0, 0, -h)."""

    def __init__(self, q, h, mu0=MU0):
        if not h > 0:
            raise ValueError("h must be positive")
        if not mu0 > 0:
            raise ValueError("mu0 must be positive")
        self.q = float(q)
        self.h = float(h)
        self.mu0 = float(mu0)
        self.k = self.mu0 * self.q / (4 * math.pi)
        self.length_scale = self.h

    def __repr__(self):
        return f"StandardField(q={self.q!r}, h={self.h!r}, mu0={self.mu0!r})"

    def to_dict(self):
        return {"kind": "standard", "q": self.q, "h": self.h, "mu0": self.mu0}

    def _offsets(self, x):
        x = np.asarray(x, dtype=float)
        out = []
        for sgn, c in ((1.0, self.h), (-1.0, -self.h)):
            d = x - np.array([0.0, 0.0, c])
            rho = math.sqrt(d @ d)
            if rho <= TOL.pole_guard * self.h:
                raise PoleSingularity(f"point {x.tolist()} is at a pole")
            out.append((sgn, d, rho))
        return out

    def b(self, x):
        B = np.zeros(3)
        for s, d, rho in self._offsets(x):
            B += s * d / rho**3
        return self.k * B

    def db(self, x):
        J = np.zeros((3, 3))
        for s, d, rho in self._offsets(x):
            J += s * (np.eye(3) / rho**3 - 3 * np.outer(d, d) / rho**5)
        return self.k * J

    def b_db(self, x):
        B = np.zeros(3)
        J = np.zeros((3, 3))
        for s, d, rho in self._offsets(x):
            r3 = rho**3
            B += s * d / r3
            J += s * (np.eye(3) / r3 - 3 * np.outer(d, d) / (r3 * rho * rho))
        return self.k * B, self.k * J

    def d2b(self, x):
        """T[i, j, l] = d^2 B_i / dx_j dx_l (fully symmetric)."""
        T = np.zeros((3, 3, 3))
        I = np.eye(3)
        for s, d, rho in self._offsets(x):
            sym = (np.einsum("ij,l->ijl", I, d) + np.einsum("il,j->ijl", I, d)
                   + np.einsum("jl,i->ijl", I, d))
            T += s * (-3 * sym / rho**5 + 15 * np.einsum("i,j,l->ijl", d, d, d) / rho**7)
        return self.k * T

    def hess_bz(self, x):
        return self.d2b(x)[2]

    def d2b_contract(self, x, w):
        return np.einsum("i,ijl->jl", np.asarray(w, dtype=float), self.d2b(x))

    def f(self, v, z):
        """B_z at a point with x^2 + y^2 = v and height z."""
        h, k = self.h, self.k
        return k * ((z - h) / (v + (z - h) ** 2) ** 1.5 - (z + h) / (v + (z + h) ** 2) ** 1.5)

    def profile(self, r):
        if r < 0:
            raise ValueError("r must be non-negative")
        h, k = self.h, self.k
        D = r * r + h * h
        return EquatorialProfile(
            f0=-2 * k * h / D**1.5,
            f1p=3 * k * h / D**2.5,
            f1pp=-7.5 * k * h / D**3.5,
            f2pp=6 * k * h * (3 * D - 5 * h * h) / D**3.5,
        )


class PolePairsField(FieldModel):
    """Superposition of coaxial pole pairs; keeps both symmetries."""

    def __init__(self, pairs, mu0=MU0):
        if not pairs:
            raise ValueError("need at least one pole pair")
        self.parts = [StandardField(q, h, mu0) for q, h in pairs]
        self.length_scale = min(p.h for p in self.parts)

    def to_dict(self):
        return {"kind": "pole_pairs", "pairs": [[p.q, p.h] for p in self.parts],
                "mu0": self.parts[0].mu0}

    def b(self, x):
        return sum(p.b(x) for p in self.parts)

    def db(self, x):
        return sum(p.db(x) for p in self.parts)

    def d2b(self, x):
        return sum(p.d2b(x) for p in self.parts)

    def hess_bz(self, x):
        return self.d2b(x)[2]

    def d2b_contract(self, x, w):
        return np.einsum("i,ijl->jl", np.asarray(w, dtype=float), self.d2b(x))

    def f(self, v, z):
        return sum(p.f(v, z) for p in self.parts)

    def profile(self, r):
        ps = [p.profile(r) for p in self.parts]
        return EquatorialProfile(*(sum(getattr(p, n) for p in ps)
                                   for n in ("f0", "f1p", "f1pp", "f2pp")))


class ProfileField(FieldModel):
    """Generalized field given through f(v, z) and optional derivatives.

    Missing derivatives fall back to Richardson-extrapolated central
    differences. Without ``full_b`` the field is only known on the mirror
    plane z = 0, which is enough for the stability and linearization layers.
    """

    def __init__(self, f, df_dv=None, d2f_dv2=None, d2f_dz2=None,
                 length_scale=1.0, full_b=None):
        self.f = f
        self._df_dv = df_dv
        self._d2f_dv2 = d2f_dv2
        self._d2f_dz2 = d2f_dz2
        self.length_scale = float(length_scale)
        self._full_b = full_b
        self.has_full_b = full_b is not None

    def _step(self, scale):
        return TOL.fd_rel_step * scale

    def df_dz(self, v):
        return fd.richardson(lambda z: self.f(v, z), 0.0, self._step(self.length_scale))

    def profile(self, r):
        v = r * r
        L = self.length_scale
        dv = self._step(L * L)
        f1p = (self._df_dv(v, 0.0) if self._df_dv
               else fd.richardson(lambda t: self.f(t, 0.0), v, dv))
        f1pp = (self._d2f_dv2(v, 0.0) if self._d2f_dv2
                else fd.richardson(lambda t: self.f(t, 0.0), v, 100 * dv, order=2))
        f2pp = (self._d2f_dz2(v, 0.0) if self._d2f_dz2
                else fd.richardson(lambda z: self.f(v, z), 0.0, 100 * self._step(L), order=2))
        return EquatorialProfile(float(self.f(v, 0.0)), float(f1p), float(f1pp), float(f2pp))

    def _equatorial(self, x):
        x = np.asarray(x, dtype=float)
        if abs(x[2]) > 1e-12 * self.length_scale:
            raise ValueError("profile-only field is defined on the mirror plane z = 0")
        return equatorial_jets(self.profile(math.hypot(x[0], x[1])), x[0], x[1])

    def b(self, x):
        if self._full_b is not None:
            return np.asarray(self._full_b(x), dtype=float)
        return self._equatorial(x)[0]

    def db(self, x):
        if self._full_b is not None:
            return super().db(x)
        return self._equatorial(x)[1]

    def hess_bz(self, x):
        if self._full_b is not None and abs(x[2]) > 1e-12 * self.length_scale:
            return super().hess_bz(x)
        return self._equatorial(x)[2]

    def d2b_contract(self, x, w):
        if self._full_b is not None:
            return super().d2b_contract(x, w)
        if np.allclose(w, [0.0, 0.0, w[2]], atol=1e-14 * max(1.0, abs(w[2]))):
            return w[2] * self.hess_bz(x)
        raise ValueError("profile-only field: contraction needs a vertical vector")


class ConstantProfileField(FieldModel):
    """Field known only through profile constants on the circle of radius r."""

    has_full_b = False

    def __init__(self, prof, r):
        self.prof = prof
        self.r = float(r)
        self.length_scale = max(self.r, 1.0)

    def to_dict(self):
        return {"kind": "profile", "r": self.r, **self.prof.to_dict()}

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        rr = math.hypot(x[0], x[1])
        tol = 1e-9 * max(self.r, 1e-12)
        if abs(x[2]) > tol or abs(rr - self.r) > tol:
            raise ValueError("profile constants are only valid on their equatorial circle")
        return x

    def profile(self, r):
        if abs(r - self.r) > 1e-9 * max(self.r, 1e-12):
            raise ValueError("profile constants are only valid at their own radius")
        return self.prof

    def b(self, x):
        self._check(x)
        return np.array([0.0, 0.0, self.prof.f0])

    def db(self, x):
        x = self._check(x)
        return equatorial_jets(self.prof, x[0], x[1])[1]

    def hess_bz(self, x):
        x = self._check(x)
        return equatorial_jets(self.prof, x[0], x[1])[2]

    def d2b_contract(self, x, w):
        if np.allclose(w[:2], 0.0, atol=1e-14 * max(1.0, abs(w[2]))):
            return w[2] * self.hess_bz(x)
        raise ValueError("profile constants: contraction needs a vertical vector")


def is_standard(field):
    return isinstance(field, StandardField)


@dataclass(frozen=True)
class SymmetryReport:
    equivariance: float
    mirror: float
    curl: float
    divergence: float

    def ok(self, tol=1e-8):
        return max(self.equivariance, self.mirror, self.curl, self.divergence) < tol


def check_symmetries(field, n_samples=1000, seed=0, scale=None):
    """Largest relative violations of the rotation/mirror symmetries and of
    curl B = 0, div B = 0 over random sample points.

    ``field`` is a FieldModel with a full B or a bare callable x -> B.
    """
    if callable(field) and not isinstance(field, FieldModel):
        b = field
        scale = scale or 1.0
        db = lambda x: fd.jacobian(b, x, 1e-6 * scale)
    else:
        if not field.has_full_b:
            raise ValueError("symmetry check needs a full field evaluator")
        b, db = field.b, field.db
        scale = scale or field.length_scale
    rng = np.random.default_rng(seed)
    eq = mir = curl = div = 0.0
    done = 0
    while done < n_samples:
        x = rng.uniform(-2 * scale, 2 * scale, 3)
        try:
            Bx = b(x)
            th = rng.uniform(0, 2 * np.pi)
            R = rot_z(th)
            Brot = b(R @ x)
            xm = x * np.array([1.0, 1.0, -1.0])
            Bm = b(xm)
            J = db(x)
        except PoleSingularity:
            continue
        # skip points pathologically close to a pole
        nB = np.linalg.norm(Bx)
        if nB > 1e12 or not np.all(np.isfinite(J)):
            continue
        ref = max(nB, np.linalg.norm(Brot), 1e-300)
        eq = max(eq, np.linalg.norm(Brot - R @ Bx) / ref if ref > 1e-300 else 0.0)
        mref = max(nB, np.linalg.norm(Bm), 1e-300)
        mviol = np.linalg.norm(Bm - np.array([-Bx[0], -Bx[1], Bx[2]]))
        mir = max(mir, mviol / mref if mviol > 0 else 0.0)
        jn = np.abs(J).max()
        if jn > 0:
            curl = max(curl, np.abs(J - J.T).max() / jn)
            div = max(div, abs(np.trace(J)) / jn)
        done += 1
    return SymmetryReport(eq, mir, curl, div)

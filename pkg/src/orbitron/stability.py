"""Energy-momentum test: augmented Hessian, stability spaces, signature and
the closed-form stability conditions.

Tangent vectors are 12-vectors (a, dx, dPi, dp) meaning the curve
(exp(t hat(a)) A, x + t dx, Pi + t dPi, p + t dp). At a canonically placed
equilibrium (A = I) this agrees with the left-trivialized (body) frame.
"""

from dataclasses import dataclass, field as dc_field
import math

import numpy as np

from .constants import TOL
from .errors import DegenerateVelocity, NotCanonical, SignConstraint
from .field import StandardField
from .lie import E1, E2, E3, hat
from .releq import xi1_generalized, xi1_standard
from .signature import signature_via_pivots

Z3 = np.zeros((3, 3))


def _t_f(field, x, w):
    """T_x F(.)(w): derivative in x of DB(x)^T w, equal to Hess(B_z) when w = e3."""
    if np.allclose(w[:2], 0.0, atol=1e-15 * max(1.0, abs(w[2]))):
        return w[2] * field.hess_bz(x)
    return field.d2b_contract(x, w)


def hessian_blocks(body, field, z, xi):
    """Block matrix of d^2(h - J^xi)(z) as obtained by differentiating the
    gradient along the probe curves (not yet symmetrized)."""
    A, x, Pi, p = z.A, z.x, z.Pi, z.p
    mu, x1 = body.mu, xi.xi1
    B = field.b(x)
    F = field.db(x).T
    Ae3, Ap, APi = A @ E3, A @ p, A @ Pi
    xe3 = np.cross(x, E3)
    H = np.zeros((12, 12))
    H[0:3, 0:3] = -mu * hat(B) @ hat(Ae3) + x1 * (hat(xe3) @ hat(Ap) - hat(E3) @ hat(APi))
    H[0:3, 3:6] = -mu * hat(Ae3) @ F.T - x1 * hat(Ap) @ hat(E3)
    H[0:3, 6:9] = x1 * hat(E3) @ A
    H[0:3, 9:12] = -x1 * hat(xe3) @ A
    H[3:6, 0:3] = mu * F @ hat(Ae3) - x1 * hat(E3) @ hat(Ap)
    H[3:6, 3:6] = -mu * _t_f(field, x, Ae3)
    H[3:6, 9:12] = x1 * hat(E3) @ A
    H[6:9, 0:3] = -x1 * A.T @ hat(E3)
    H[6:9, 6:9] = body.inertia_inv
    H[9:12, 0:3] = x1 * A.T @ hat(xe3)
    H[9:12, 3:6] = -x1 * A.T @ hat(E3)
    H[9:12, 9:12] = np.eye(3) / body.M
    return H


def augmented_hessian(body, field, z, xi):
    """Symmetric 12x12 Hessian of h - J^xi in the exponential chart at z.

    Away from critical points the directional second derivative picks up
    an antisymmetric part from the non-commuting attitude directions; the
    chart Hessian is its symmetric part. At critical points both agree.
    """
    H = hessian_blocks(body, field, z, xi)
    return 0.5 * (H + H.T)


def body_frame(H, A):
    """Re-express a Hessian in body (left-translated) probe directions."""
    T = np.zeros((12, 12))
    T[0:3, 0:3] = A
    T[3:6, 3:6] = A
    T[6:9, 6:9] = np.eye(3)
    T[9:12, 9:12] = np.eye(3)
    return T.T @ H @ T


def momentum_differential(z):
    """2x12 matrix of T_z J."""
    A, x, Pi, p = z.A, z.x, z.Pi, z.p
    APi, Ap = A @ Pi, A @ p
    row = np.zeros(12)
    # d/dt <exp(ta)A Pi + x x exp(ta)A p, e3>
    row[0:3] = np.cross(APi, E3) + np.cross(Ap, np.cross(E3, x))
    row[3:6] = np.cross(Ap, E3)
    row[6:9] = A.T @ E3
    row[9:12] = A.T @ np.cross(E3, x)
    row2 = np.zeros(12)
    row2[8] = -1.0
    return np.vstack([row, row2])


def orbit_tangent(z):
    """12x2 matrix whose columns span the tangent to the torus orbit at z."""
    Ae3 = z.A @ E3
    c1 = np.concatenate([E3, np.cross(E3, z.x), np.zeros(3), np.zeros(3)])
    c2 = np.concatenate([-Ae3, np.zeros(3), np.cross(E3, z.Pi), np.cross(E3, z.p)])
    return np.array([c1, c2]).T


def _vec(a=None, dx=None, dPi=None, dp=None):
    z = np.zeros(3)
    return np.concatenate([z if a is None else a, z if dx is None else dx,
                           z if dPi is None else dPi, z if dp is None else dp])


def _require_canonical(z0, singular):
    if np.abs(z0.A - np.eye(3)).max() > 1e-12:
        raise NotCanonical("stability bases are written for A0 = I; use releq.canonical")
    if singular:
        if np.abs(z0.x).max() > 0 or np.abs(z0.p).max() > 0:
            raise NotCanonical("singular branch needs x0 = p0 = 0")
    elif abs(z0.x[1]) > 0 or abs(z0.x[2]) > 0 or not z0.x[0] > 0:
        raise NotCanonical("regular branch needs x0 = (r, 0, 0)")


def stability_space_regular(z0):
    """Columns u1..u8 of the regular-branch stability space (12x8)."""
    _require_canonical(z0, singular=False)
    r = z0.x[0]
    m_xi = z0.p[1] / r        # M * xi1
    u = [_vec(dx=E1, dp=-m_xi * E2), _vec(a=E3), _vec(dPi=E1), _vec(dPi=E2),
         _vec(dp=E3), _vec(dx=E3), _vec(a=E2), _vec(a=E1)]
    return np.array(u).T


def stability_space_singular(z0=None):
    """Columns u1..u10 of the singular-branch stability space (12x10)."""
    if z0 is not None:
        _require_canonical(z0, singular=True)
    u = [_vec(dp=E3), _vec(dx=E3), _vec(dp=E2), _vec(dp=E1), _vec(dPi=E2),
         _vec(dPi=E1), _vec(dx=E2), _vec(dx=E1), _vec(a=E2), _vec(a=E1)]
    return np.array(u).T


def stability_space(branch):
    if branch.kind == "regular":
        return stability_space_regular(branch.z0)
    return stability_space_singular(branch.z0)


def restrict(H, W):
    W = np.asarray(W, dtype=float)
    Q = W.T @ H @ W
    return 0.5 * (Q + Q.T)


# -- closed-form conditions -------------------------------------------------

@dataclass
class ConditionReport:
    flags: dict
    margins: dict
    extra: dict = dc_field(default_factory=dict)

    @property
    def all_hold(self):
        return all(self.flags.values())

    def near_boundary(self, tol=TOL.boundary_margin):
        return any(abs(m) < tol for m in self.margins.values())


def _rel(lhs, rhs):
    """Signed margin rhs - lhs, relative to the size of both sides."""
    s = max(abs(lhs), abs(rhs), 1e-300)
    return (rhs - lhs) / s


def conditions_standard_regular(body, field, r, xi2, sign=1):
    if not body.mu * field.q < 0:
        raise SignConstraint("regular orbits need mu*q < 0")
    h = field.h
    xi1 = xi1_standard(body, field, r)[0 if sign == 1 else 1]
    t = r * r / (h * h)
    den = 3 * r * r - 2 * h * h
    D = r * r + h * h
    bracket = (body.I1 - body.I3) + (2.0 / 3.0) * body.M * D * h * h / den if den != 0 else math.inf
    lhs = math.copysign(1.0, xi1) * body.I3 * xi2
    rhs = -abs(xi1) * bracket
    flags = {"kozorez_left": t > 2.0 / 3.0, "kozorez_right": t < 4.0, "spin": lhs < rhs}
    margins = {"kozorez_left": t - 2.0 / 3.0, "kozorez_right": 4.0 - t, "spin": _rel(lhs, rhs)}
    return ConditionReport(flags, margins, {"xi1": xi1, "spin_bound": rhs / (math.copysign(1.0, xi1) * body.I3)})


def conditions_generalized_regular(body, prof, r, xi2, sign=1):
    mu = body.mu
    a, c, f2, f0 = prof.f1p, prof.f1pp, prof.f2pp, prof.f0
    flags = {"existence": mu * a < 0,
             "kozorez": mu * (2 * a + r * r * c) < 0,
             "vertical": mu * f2 < 0}
    scale1 = max(abs(mu * a), 1e-300)
    margins = {"existence": -mu * a / scale1,
               "kozorez": -mu * (2 * a + r * r * c) / max(abs(mu * 2 * a), abs(mu * r * r * c), 1e-300),
               "vertical": -mu * f2 / max(abs(mu * f2), 1e-300)}
    extra = {}
    if flags["existence"]:
        xi1 = xi1_generalized(body, prof)[0 if sign == 1 else 1]
        if f2 != 0:
            bracket = (body.I1 - body.I3) + 0.5 * body.M * (f0 / a + 4 * r * r * a / f2)
        else:
            bracket = math.inf
        lhs = math.copysign(1.0, xi1) * body.I3 * xi2
        rhs = -abs(xi1) * bracket
        flags["spin"] = lhs < rhs
        margins["spin"] = _rel(lhs, rhs)
        extra["xi1"] = xi1
    else:
        flags["spin"] = False
        margins["spin"] = -math.inf
    return ConditionReport(flags, margins, extra)


def conditions_generalized_singular(body, prof0, xi1, xi2):
    mu, M, I1 = body.mu, body.M, body.I1
    a, f2, f0 = prof0.f1p, prof0.f2pp, prof0.f0
    if xi1 == 0:
        raise DegenerateVelocity("the spin condition divides by |xi1|")
    Pi0 = body.I3 * (xi1 - xi2)
    lhs3, rhs3 = xi1 * xi1, -2 * mu * a / M
    lhs4 = math.copysign(1.0, xi1) * Pi0
    rhs4 = (I1 * xi1 * xi1 - mu * f0) / abs(xi1)
    flags = {"radial": mu * a < 0, "vertical": mu * f2 < 0,
             "orbital_rate": lhs3 < rhs3, "spin": lhs4 > rhs4}
    margins = {"radial": -mu * a / max(abs(mu * a), 1e-300),
               "vertical": -mu * f2 / max(abs(mu * f2), 1e-300),
               "orbital_rate": _rel(lhs3, rhs3), "spin": -_rel(lhs4, rhs4)}
    applicable = mu * f0 < 0 and f0 / a < 2 * I1 / M if a != 0 else False
    bound = 2 * math.sqrt(-mu * f0 * I1) if mu * f0 <= 0 else math.nan
    extra = {"Pi0": Pi0, "optimal_applicable": applicable,
             "optimal_xi1": math.sqrt(-mu * f0 / I1) if mu * f0 <= 0 else math.nan,
             "optimal_bound": bound,
             "optimal_flag": bool(applicable and abs(Pi0) > bound)}
    return ConditionReport(flags, margins, extra)


def singular_spin_bound(body, prof0, xi1):
    """The xi1-dependent lower bound on sign(xi1) Pi0."""
    return (body.I1 * xi1 * xi1 - body.mu * prof0.f0) / abs(xi1)


# -- reports ----------------------------------------------------------------

@dataclass
class StabilityReport:
    pivots: tuple
    signature: tuple
    definite: bool
    marginal: bool
    condition_flags: dict
    margins: dict
    Q: np.ndarray = None

    def to_dict(self):
        return {"pivots": list(self.pivots), "signature": list(self.signature),
                "definite": self.definite, "marginal": self.marginal,
                "condition_flags": dict(self.condition_flags),
                "margins": {k: float(v) for k, v in self.margins.items()}}


def stability_form(branch, body, field):
    H = augmented_hessian(body, field, branch.z0, branch.xi)
    return restrict(H, stability_space(branch))


def branch_conditions(branch, body, field):
    if branch.kind == "regular":
        if isinstance(field, StandardField):
            return conditions_standard_regular(body, field, branch.r, branch.xi.xi2, branch.sign)
        return conditions_generalized_regular(body, field.profile(branch.r), branch.r,
                                              branch.xi.xi2, branch.sign)
    prof = field.profile(0.0)
    return conditions_generalized_singular(body, prof, branch.xi.xi1, branch.xi.xi2)


def stability_report(branch, body, field):
    Q = stability_form(branch, body, field)
    sig = signature_via_pivots(Q)
    try:
        cond = branch_conditions(branch, body, field)
        flags, margins = cond.flags, cond.margins
    except DegenerateVelocity:
        flags, margins = {}, {}
    return StabilityReport(sig.pivots, sig.counts, sig.definite, sig.marginal,
                           flags, margins, Q)


def j_value_regular(body, r, xi1, xi2):
    """Momentum value of the regular branch, written out by hand."""
    return (body.I3 * (xi1 - xi2) + body.M * r * r * xi1, -body.I3 * (xi1 - xi2))


def check_in_kernel(z0, W):
    return np.abs(momentum_differential(z0) @ W).max()

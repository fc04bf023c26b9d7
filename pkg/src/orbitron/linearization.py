"""Linearized dynamics at relative equilibria and its projection to the
stability space.

Everything is written in the body (left-translated) frame at the
equilibrium, with tangent coordinates (rho, tau, dPi, dp): rho and tau form
the Lie-algebra part and (dPi, dp) the dual part.
"""

from dataclasses import dataclass, field as dc_field
import cmath
import math

import numpy as np

from .constants import TOL
from .errors import ComplementDegenerate, EigenFailure, NotCritical
from .field import StandardField
from .lie import E1, E2, E3, hat
from .releq import canonical, scaled_residual
from .stability import augmented_hessian, body_frame, stability_report, stability_space


def full_linearization(body, field, z0, xi, check=True):
    """12x12 linear vector field of h - J^xi at the equilibrium z0."""
    if check:
        c = scaled_residual(body, field, z0, xi)
        if c > TOL.criticality:
            raise NotCritical(f"z0 is not critical for h - J^xi (scaled gradient {c:.3e})")
    H = body_frame(augmented_hessian(body, field, z0, xi), z0.A)
    Pi0h, p0h = hat(z0.Pi), hat(z0.p)
    hA, hx, hPi, hp = H[0:3], H[3:6], H[6:9], H[9:12]
    X = np.empty((12, 12))
    X[0:3] = hPi
    X[3:6] = hp
    X[6:9] = -hA + Pi0h @ hPi + p0h @ hp
    X[9:12] = -hx + p0h @ hPi
    return X


def symplectic_matrix(z0):
    """Omega with omega(v, w) = v^T Omega w on the body-frame tangent space."""
    Om = np.zeros((12, 12))
    Om[0:6, 6:12] = np.eye(6)
    Om[6:12, 0:6] = -np.eye(6)
    Om[0:3, 0:3] = -hat(z0.Pi)
    Om[0:3, 3:6] = -hat(z0.p)
    Om[3:6, 0:3] = -hat(z0.p)
    return Om


def symplectic_complement(W, Om):
    """Basis (columns) of {v : omega(w, v) = 0 for all columns w of W}."""
    C = W.T @ Om
    _, s, Vt = np.linalg.svd(C)
    rank = int((s > TOL.complement_rank * max(s.max(), 1e-300)).sum())
    return Vt[rank:].T


def _vec(a=None, dx=None, dPi=None, dp=None):
    z = np.zeros(3)
    return np.concatenate([z if a is None else a, z if dx is None else dx,
                           z if dPi is None else dPi, z if dp is None else dp])


def complement_regular(z0):
    """tau_1..tau_4 spanning the symplectic complement of the regular space."""
    r = z0.x[0]
    m_r_xi = z0.p[1]          # M r xi1
    t = [_vec(a=E3, dx=r * E2), _vec(a=-E3, dp=-m_r_xi * E1), _vec(dp=E2),
         _vec(dx=E1, dPi=-m_r_xi * E3)]
    return np.array(t).T


def complement_singular():
    return np.array([_vec(a=E3), _vec(dPi=E3)]).T


def projection_matrix(W, C):
    """Rows of [W | C]^{-1} belonging to W: the projection onto W along C."""
    Mfull = np.hstack([W, C])
    if Mfull.shape[0] != Mfull.shape[1]:
        raise ComplementDegenerate("W and its complement do not fill the space")
    s = np.linalg.svd(Mfull, compute_uv=False)
    if s.min() <= TOL.complement_rank * s.max():
        raise ComplementDegenerate("[i_W | i_Wc] is rank deficient")
    return np.linalg.inv(Mfull)[: W.shape[1]]


def project_xq(X, W, C=None):
    """X_Q = P_W X i_W. With C omitted, W must span the whole space."""
    W = np.asarray(W, dtype=float)
    if C is None:
        if W.shape[1] != W.shape[0]:
            raise ComplementDegenerate("complement basis required for a proper subspace")
        P = np.linalg.inv(W)
    else:
        P = projection_matrix(W, np.asarray(C, dtype=float))
    return P @ X @ W


def complement(branch):
    if branch.kind == "regular":
        return complement_regular(branch.z0)
    return complement_singular()


def projected_linearization(branch, body, field):
    """X_Q at a branch point, built from the Hessian (no closed forms)."""
    b = canonical(branch)
    X = full_linearization(body, field, b.z0, b.xi)
    return project_xq(X, stability_space(b), complement(b))


# -- closed forms -------------------------------------------------------------

def _regular_common(X, xi1, r, Pi0, body):
    """Entries shared by the standard and generalized regular matrices."""
    I1, M = body.I1, body.M
    X[0, 1] = -xi1 * r
    X[2, 3] = xi1 - Pi0 / I1
    X[3, 2] = -xi1 + Pi0 / I1
    X[4, 2] = -M * xi1 * r / I1
    X[5, 4] = 1.0 / M
    X[5, 7] = xi1 * r
    X[6, 3] = 1.0 / I1
    X[6, 7] = -xi1
    X[7, 2] = 1.0 / I1
    X[7, 6] = xi1


def _singular_matrix(body, xi1, Pi0, vert, radial, axial):
    """Singular X_Q from mu f2pp, 2 mu f1p and -mu f0."""
    M, I1 = body.M, body.I1
    X = np.zeros((10, 10))
    X[0, 1] = vert
    X[1, 0] = 1.0 / M
    X[2, 3] = -xi1
    X[2, 6] = radial
    X[3, 2] = xi1
    X[3, 7] = radial
    X[4, 5] = -xi1 + Pi0 / I1
    X[4, 8] = axial
    X[5, 4] = xi1 - Pi0 / I1
    X[5, 9] = axial
    X[6, 2] = 1.0 / M
    X[6, 7] = -xi1
    X[7, 3] = 1.0 / M
    X[7, 6] = xi1
    X[8, 4] = 1.0 / I1
    X[8, 9] = -xi1
    X[9, 5] = 1.0 / I1
    X[9, 8] = xi1
    return X


def xq_standard_regular(body, field, r, xi1, xi2):
    h, M = field.h, body.M
    Pi0 = body.I3 * (xi1 - xi2)
    D = r * r + h * h
    X = np.zeros((8, 8))
    _regular_common(X, xi1, r, Pi0, body)
    X[1, 0] = xi1 * (4 * h * h - r * r) / (r * D)
    X[2, 7] = -xi1 * xi1 * M * D / 3.0
    X[3, 5] = -xi1 * xi1 * M * r
    X[3, 6] = -xi1 * xi1 * M * D / 3.0
    X[4, 5] = xi1 * xi1 * M * (2 * h * h - 3 * r * r) / D
    X[4, 6] = -2 * xi1 * xi1 * M * r
    return X


def xq_generalized_regular(body, prof, r, xi1, xi2):
    mu, M = body.mu, body.M
    Pi0 = body.I3 * (xi1 - xi2)
    X = np.zeros((8, 8))
    _regular_common(X, xi1, r, Pi0, body)
    X[1, 0] = -4 * mu * (2 * prof.f1p + r * r * prof.f1pp) / (M * r * xi1)
    X[2, 7] = -mu * prof.f0
    X[3, 5] = 2 * mu * r * prof.f1p
    X[3, 6] = -mu * prof.f0
    X[4, 5] = mu * prof.f2pp
    X[4, 6] = 4 * mu * r * prof.f1p
    return X


def xq_standard_singular(body, field, xi1, xi2):
    c = field.mu0 * body.mu * field.q / math.pi
    h = field.h
    Pi0 = body.I3 * (xi1 - xi2)
    return _singular_matrix(body, xi1, Pi0, -3 * c / h**4, 1.5 * c / h**4, 0.5 * c / h**2)


def xq_generalized_singular(body, prof0, xi1, xi2):
    mu = body.mu
    Pi0 = body.I3 * (xi1 - xi2)
    return _singular_matrix(body, xi1, Pi0, mu * prof0.f2pp, 2 * mu * prof0.f1p, -mu * prof0.f0)


def xq_closed_form(branch, body, field):
    """The closed-form X_Q for the branch's kind and field kind."""
    xi1, xi2 = branch.xi.xi1, branch.xi.xi2
    standard = branch.field_kind == "standard" and isinstance(field, StandardField)
    if branch.kind == "regular":
        if standard:
            return xq_standard_regular(body, field, branch.r, xi1, xi2)
        return xq_generalized_regular(body, field.profile(branch.r), branch.r, xi1, xi2)
    if standard:
        return xq_standard_singular(body, field, xi1, xi2)
    return xq_generalized_singular(body, field.profile(0.0), xi1, xi2)


# -- spectra ------------------------------------------------------------------

@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray      # complex, sorted by (Re, Im)
    max_re: float
    classification: str          # spectrally_stable | spectrally_unstable | marginal
    tol_re: float

    def to_dict(self):
        return {"eigenvalues": [[float(v.real), float(v.imag)] for v in self.eigenvalues],
                "max_re": self.max_re, "classification": self.classification,
                "tol_re": self.tol_re}


def _sort_key(v):
    return (v.real, v.imag)


def eigenvalues(X, rel_tol=TOL.eig_re_rel, floor=TOL.eig_re_floor):
    """Spectrum of a small dense matrix and its stability class.

    Unstable when some real part exceeds rel_tol times the spectral radius
    (with an absolute floor); marginal when otherwise stable but some
    eigenvalue is zero within the same tolerance.
    """
    X = np.asarray(X, dtype=float)
    if not np.all(np.isfinite(X)):
        raise EigenFailure("matrix has non-finite entries")
    try:
        w = np.linalg.eigvals(X)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(f"eigenvalue iteration did not converge: {exc}") from exc
    w = np.array(sorted(w.astype(complex), key=_sort_key))
    radius = float(np.abs(w).max()) if w.size else 0.0
    tol = max(rel_tol * radius, floor)
    max_re = float(w.real.max()) if w.size else 0.0
    if max_re > tol:
        cls = "spectrally_unstable"
    elif w.size and np.abs(w).min() <= tol:
        cls = "marginal"
    else:
        cls = "spectrally_stable"
    return SpectrumReport(w, max_re, cls, tol)


def _pm(z):
    return [z, -z]


def eig_regular_standard(xi1, r, h):
    """The real (or imaginary) pair of the radial 2x2 block."""
    return _pm(xi1 * cmath.sqrt((r * r - 4 * h * h) / (r * r + h * h)))


def eig_regular_generalized(body, prof, r):
    return _pm(2 * cmath.sqrt(body.mu * (2 * prof.f1p + r * r * prof.f1pp) / body.M))


def eig_singular_standard(body, field, xi1):
    """lambda_1 and lambda_2 of the standard singular spectrum."""
    c = field.mu0 * body.mu * field.q
    h, M = field.h, body.M
    lam1 = cmath.sqrt(-3 * c / (M * math.pi)) / h**2
    lam2 = cmath.sqrt(-(xi1 - cmath.sqrt(-3 * c / (2 * M * math.pi)) / h**2) ** 2)
    return [lam1, lam2]


def eig_singular_generalized(body, prof0, xi1, xi2):
    """All ten eigenvalues of the generalized singular X_Q.

    The third family carries 1/I1^2 under the outer root; with 1/I1 it
    would only be right for I1 = 1.
    """
    M, I1, mu = body.M, body.I1, body.mu
    Pi0 = body.I3 * (xi1 - xi2)
    out = _pm(cmath.sqrt(mu * prof0.f2pp / M))
    s2 = cmath.sqrt(-2 * mu * prof0.f1p)
    for s in (1, -1):
        out += _pm(cmath.sqrt(-((xi1 * math.sqrt(M) + s * s2) ** 2) / M))
    s3 = cmath.sqrt(4 * mu * prof0.f0 * I1 + Pi0 * Pi0)
    for s in (1, -1):
        out += _pm(0.5 * cmath.sqrt(-(((2 * xi1 * I1 - Pi0) + s * s3) ** 2) / (I1 * I1)))
    return out


def match_multiset(a, b):
    """Largest relative distance after greedy nearest matching of a to b."""
    a, b = list(a), list(b)
    if len(a) != len(b):
        raise ValueError("multisets differ in size")
    scale = max(max((abs(v) for v in a), default=0.0), max((abs(v) for v in b), default=0.0), 1e-300)
    worst = 0.0
    for v in a:
        j = min(range(len(b)), key=lambda k: abs(b[k] - v))
        worst = max(worst, abs(b[j] - v) / scale)
        b.pop(j)
    return worst


def contains(spectrum, values, rel=1e-9):
    """True when every value is within rel (of the spectral radius) of some eigenvalue."""
    scale = max(float(np.abs(spectrum).max()), 1e-300)
    return all(float(np.abs(np.asarray(spectrum) - v).min()) <= rel * scale for v in values)


# -- verdict ------------------------------------------------------------------

@dataclass
class BranchVerdict:
    nonlinear: object            # StabilityReport
    spectrum: SpectrumReport
    verdict: str                 # nonlinearly_stable | nonlinearly_unstable | undecided
    notes: list = dc_field(default_factory=list)

    def to_dict(self):
        return {"verdict": self.verdict, "notes": list(self.notes),
                "nonlinear": self.nonlinear.to_dict(), "spectrum": self.spectrum.to_dict()}


def classify_branch(branch, body, field):
    """Combine the energy-momentum test with the spectrum of X_Q.

    A definite stability form proves nonlinear stability; an eigenvalue
    with positive real part proves nonlinear instability. Anything else
    is left undecided (a stability gap when the spectrum is imaginary).
    """
    b = canonical(branch)
    rep = stability_report(b, body, field)
    spec = eigenvalues(projected_linearization(b, body, field))
    notes = []
    if rep.definite:
        verdict = "nonlinearly_stable"
        if spec.classification == "spectrally_unstable":
            notes.append("definite form with unstable spectrum: check tolerances")
    elif spec.classification == "spectrally_unstable":
        verdict = "nonlinearly_unstable"
    else:
        verdict = "undecided"
        if spec.classification == "spectrally_stable":
            notes.append("stability gap: indefinite form, imaginary spectrum")
        else:
            notes.append("zero eigenvalue: linear test inconclusive")
    return BranchVerdict(rep, spec, verdict, notes)

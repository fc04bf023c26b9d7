"""Compiled RK4 for coaxial pole-pair fields (the standard field included).

Same scheme as the generic Python loop in ``dynamics.integrate``; kept in
step with it by tests.
"""

import math

import numpy as np
from numba import njit

STATUS_OK = 0
STATUS_POLE = 1


@njit(cache=True)
def _field(x, ks, hs, guard):
    B = np.zeros(3)
    DB = np.zeros((3, 3))
    for n in range(ks.shape[0]):
        for s, c in ((1.0, hs[n]), (-1.0, -hs[n])):
            d0, d1, d2 = x[0], x[1], x[2] - c
            rho2 = d0 * d0 + d1 * d1 + d2 * d2
            rho = math.sqrt(rho2)
            if rho <= guard[n]:
                return B, DB, False
            r3 = rho2 * rho
            r5 = r3 * rho2
            w = s * ks[n]
            d = (d0, d1, d2)
            for i in range(3):
                B[i] += w * d[i] / r3
                for j in range(3):
                    DB[i, j] -= w * 3.0 * d[i] * d[j] / r5
                DB[i, i] += w / r3
    return B, DB, True


@njit(cache=True)
def _rhs(y, M, I1, I3, mu, ks, hs, guard, xi1, xi2, aug, out):
    A = y[:9].reshape((3, 3))
    x = y[9:12]
    Pi = y[12:15]
    p = y[15:18]
    B, DB, ok = _field(x, ks, hs, guard)
    if not ok:
        return False
    Om0, Om1, Om2 = Pi[0] / I1, Pi[1] / I1, Pi[2] / I3
    # A hat(Om)
    for i in range(3):
        a0, a1, a2 = A[i, 0], A[i, 1], A[i, 2]
        out[3 * i + 0] = a1 * Om2 - a2 * Om1
        out[3 * i + 1] = a2 * Om0 - a0 * Om2
        out[3 * i + 2] = a0 * Om1 - a1 * Om0
    for i in range(3):
        out[9 + i] = (A[i, 0] * p[0] + A[i, 1] * p[1] + A[i, 2] * p[2]) / M
    # body-frame field b = A^T B and w = A^T DB^T A e3
    b0 = A[0, 0] * B[0] + A[1, 0] * B[1] + A[2, 0] * B[2]
    b1 = A[0, 1] * B[0] + A[1, 1] * B[1] + A[2, 1] * B[2]
    g = np.zeros(3)
    for j in range(3):
        g[j] = DB[0, j] * A[0, 2] + DB[1, j] * A[1, 2] + DB[2, j] * A[2, 2]
    w = np.zeros(3)
    for i in range(3):
        w[i] = A[0, i] * g[0] + A[1, i] * g[1] + A[2, i] * g[2]
    out[12] = Pi[1] * Om2 - Pi[2] * Om1 - mu * b1
    out[13] = Pi[2] * Om0 - Pi[0] * Om2 + mu * b0
    out[14] = Pi[0] * Om1 - Pi[1] * Om0
    out[15] = p[1] * Om2 - p[2] * Om1 + mu * w[0]
    out[16] = p[2] * Om0 - p[0] * Om2 + mu * w[1]
    out[17] = p[0] * Om1 - p[1] * Om0 + mu * w[2]
    if aug:
        # subtract the generator: xi1 hat(e3) A - xi2 A hat(e3), etc.
        for j in range(3):
            out[0 + j] -= -xi1 * A[1, j]
            out[3 + j] -= xi1 * A[0, j]
        for i in range(3):
            out[3 * i + 0] -= -xi2 * A[i, 1]
            out[3 * i + 1] -= xi2 * A[i, 0]
        out[9] -= -xi1 * x[1]
        out[10] -= xi1 * x[0]
        out[12] -= -xi2 * Pi[1]
        out[13] -= xi2 * Pi[0]
        out[15] -= -xi2 * p[1]
        out[16] -= xi2 * p[0]
    return True


@njit(cache=True)
def _defect(A):
    m = 0.0
    for i in range(3):
        for j in range(3):
            s = 0.0
            for k in range(3):
                s += A[k, i] * A[k, j]
            if i == j:
                s -= 1.0
            m = max(m, abs(s))
    return m


@njit(cache=True)
def _polar(A):
    for _ in range(20):
        AtA = A.T @ A
        A = 0.5 * A @ (3.0 * np.eye(3) - AtA)
        if _defect(A) < 1e-15:
            break
    return A


@njit(cache=True)
def _diag(y, M, I1, I3, mu, ks, hs, guard):
    A = y[:9].reshape((3, 3))
    x = y[9:12]
    Pi = y[12:15]
    p = y[15:18]
    B, DB, ok = _field(x, ks, hs, guard)
    kin = 0.5 * (Pi[0] ** 2 / I1 + Pi[1] ** 2 / I1 + Pi[2] ** 2 / I3)
    kin += (p[0] ** 2 + p[1] ** 2 + p[2] ** 2) / (2.0 * M)
    pot = -mu * (B[0] * A[0, 2] + B[1] * A[1, 2] + B[2] * A[2, 2])
    APi2 = A[2, 0] * Pi[0] + A[2, 1] * Pi[1] + A[2, 2] * Pi[2]
    Ap0 = A[0, 0] * p[0] + A[0, 1] * p[1] + A[0, 2] * p[2]
    Ap1 = A[1, 0] * p[0] + A[1, 1] * p[1] + A[1, 2] * p[2]
    J1 = APi2 + x[0] * Ap1 - x[1] * Ap0
    return kin + pot, J1, -Pi[2]


@njit(cache=True)
def rk4_pole_pairs(y0, n, dt, stride, M, I1, I3, mu, ks, hs, guard,
                   xi1, xi2, aug, reproject_tol):
    nstore = n // stride + 2
    states = np.empty((nstore, 18))
    times = np.empty(nstore)
    hh = np.empty(n + 1)
    JJ = np.empty((n + 1, 2))
    y = y0.copy()
    k1 = np.empty(18)
    k2 = np.empty(18)
    k3 = np.empty(18)
    k4 = np.empty(18)
    states[0] = y
    times[0] = 0.0
    e, j1, j2 = _diag(y, M, I1, I3, mu, ks, hs, guard)
    hh[0] = e
    JJ[0, 0] = j1
    JJ[0, 1] = j2
    ns = 1
    nproj = 0
    status = STATUS_OK
    done = 0
    for i in range(1, n + 1):
        if not _rhs(y, M, I1, I3, mu, ks, hs, guard, xi1, xi2, aug, k1):
            status = STATUS_POLE
            break
        if not _rhs(y + 0.5 * dt * k1, M, I1, I3, mu, ks, hs, guard, xi1, xi2, aug, k2):
            status = STATUS_POLE
            break
        if not _rhs(y + 0.5 * dt * k2, M, I1, I3, mu, ks, hs, guard, xi1, xi2, aug, k3):
            status = STATUS_POLE
            break
        if not _rhs(y + dt * k3, M, I1, I3, mu, ks, hs, guard, xi1, xi2, aug, k4):
            status = STATUS_POLE
            break
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        A = y[:9].reshape((3, 3)).copy()
        if _defect(A) > reproject_tol:
            y[:9] = _polar(A).ravel()
            nproj += 1
        _, _, ok = _field(y[9:12], ks, hs, guard)
        if not ok:
            status = STATUS_POLE
            break
        e, j1, j2 = _diag(y, M, I1, I3, mu, ks, hs, guard)
        hh[i] = e
        JJ[i, 0] = j1
        JJ[i, 1] = j2
        done = i
        if i % stride == 0 or i == n:
            states[ns] = y
            times[ns] = i * dt
            ns += 1
    return states[:ns], times[:ns], hh[:done + 1], JJ[:done + 1], nproj, status, done

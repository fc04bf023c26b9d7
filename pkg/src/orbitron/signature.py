"""Inertia of symmetric matrices through symmetric elimination.

``ldlt_bunch_kaufman`` factors P Q P^T = L D L^T with 1x1 and 2x2 pivots
(partial pivoting of Bunch and Kaufman). By Sylvester's law of inertia the
sign counts of D are those of Q, so no eigenvalues are needed.
"""

from dataclasses import dataclass
import math

import numpy as np

from .constants import TOL

ALPHA = (1.0 + math.sqrt(17.0)) / 8.0


@dataclass(frozen=True)
class Signature:
    pivots: tuple          # 1x1 pivot values; a 2x2 block adds its two eigenvalues
    n_plus: int
    n_minus: int
    n_zero: int
    blocks: tuple = ()     # sizes of the pivot blocks in elimination order

    @property
    def definite(self):
        return self.n_minus == 0 and self.n_zero == 0

    @property
    def marginal(self):
        return self.n_zero > 0

    @property
    def counts(self):
        return (self.n_plus, self.n_minus, self.n_zero)


def ldlt_bunch_kaufman(Q):
    """Return (perm, L, D) with Q[perm][:, perm] = L @ D @ L.T.

    D is block diagonal with 1x1 and 2x2 blocks.
    """
    A = np.array(Q, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("matrix must be square")
    perm = np.arange(n)
    L = np.eye(n)
    D = np.zeros((n, n))
    k = 0

    def swap(i, j):
        if i == j:
            return
        A[[i, j], :] = A[[j, i], :]
        A[:, [i, j]] = A[:, [j, i]]
        L[[i, j], :k] = L[[j, i], :k]
        perm[[i, j]] = perm[[j, i]]

    while k < n:
        if k == n - 1:
            D[k, k] = A[k, k]
            k += 1
            continue
        col = np.abs(A[k + 1:, k])
        r = k + 1 + int(np.argmax(col))
        lam = col.max()
        akk = abs(A[k, k])
        if lam == 0.0 or akk >= ALPHA * lam:
            size = 1
        else:
            row = np.abs(A[k:, r])
            row[r - k] = 0.0
            sigma = row.max()
            if akk * sigma >= ALPHA * lam * lam:
                size = 1
            elif abs(A[r, r]) >= ALPHA * sigma:
                size = 1
                swap(k, r)
            else:
                size = 2
                swap(k + 1, r)
        if size == 1:
            d = A[k, k]
            D[k, k] = d
            if d != 0.0:
                l = A[k + 1:, k] / d
                L[k + 1:, k] = l
                A[k + 1:, k + 1:] -= np.outer(l, A[k, k + 1:])
            A[k + 1:, k] = 0.0
            A[k, k + 1:] = 0.0
            k += 1
        else:
            E = A[k:k + 2, k:k + 2].copy()
            D[k:k + 2, k:k + 2] = E
            C = A[k + 2:, k:k + 2]
            l = np.linalg.solve(E, C.T).T
            L[k + 2:, k:k + 2] = l
            A[k + 2:, k + 2:] -= l @ C.T
            A[k + 2:, k:k + 2] = 0.0
            A[k:k + 2, k + 2:] = 0.0
            k += 2
    return perm, L, D


def equilibrate(Q):
    """S Q S with S_ii = 1/sqrt(max_j |Q_ij|), so every entry is at most 1.

    A diagonal congruence keeps the inertia, and it stops entries measured
    in very different units from hiding small but genuine pivots.
    """
    Q = np.asarray(Q, dtype=float)
    rowmax = np.abs(Q).max(axis=1) if Q.size else np.zeros(0)
    s = np.where(rowmax > 0, 1.0 / np.sqrt(np.where(rowmax > 0, rowmax, 1.0)), 1.0)
    return Q * np.outer(s, s)


def signature_via_pivots(Q, rel_zero=TOL.pivot_zero, scaled=True):
    """Inertia from LDL^T pivots; zero threshold rel_zero * max|Q|.

    With ``scaled`` the form is first equilibrated (see ``equilibrate``).
    """
    Q = np.asarray(Q, dtype=float)
    n = Q.shape[0]
    if n == 0:
        return Signature((), 0, 0, 0)
    if scaled:
        Q = equilibrate(Q)
    scale = np.abs(Q).max()
    thresh = rel_zero * scale
    _, _, D = ldlt_bunch_kaufman(Q)
    pivots, blocks = [], []
    k = 0
    while k < n:
        if k + 1 < n and D[k + 1, k] != 0.0:
            w = np.linalg.eigvalsh(D[k:k + 2, k:k + 2])
            pivots.extend(float(v) for v in w)
            blocks.append(2)
            k += 2
        else:
            pivots.append(float(D[k, k]))
            blocks.append(1)
            k += 1
    npos = sum(1 for p in pivots if p > thresh)
    nneg = sum(1 for p in pivots if p < -thresh)
    return Signature(tuple(pivots), npos, nneg, n - npos - nneg, tuple(blocks))


def gaussian_pivots(Q):
    """Pivots of symmetric elimination in the given order, no pivoting.

    Returns None entries after a zero pivot is met.
    """
    A = np.array(Q, dtype=float)
    n = A.shape[0]
    out = []
    for k in range(n):
        d = A[k, k]
        out.append(float(d))
        if d == 0.0:
            out.extend([None] * (n - k - 1))
            break
        l = A[k + 1:, k] / d
        A[k + 1:, k + 1:] -= np.outer(l, A[k, k + 1:])
    return out


def eigen_counts(Q, rel_zero=TOL.pivot_zero, scaled=True):
    """Oracle: sign counts of the eigenvalues."""
    Q = np.asarray(Q, dtype=float)
    if scaled and Q.size:
        Q = equilibrate(Q)
    w = np.linalg.eigvalsh(0.5 * (Q + Q.T))
    t = rel_zero * max(np.abs(Q).max(), 1e-300)
    return int((w > t).sum()), int((w < -t).sum()), int((np.abs(w) <= t).sum())

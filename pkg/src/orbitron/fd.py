"""Small finite-difference helpers (central differences, Richardson)."""

import numpy as np


def richardson(g, t0, step, order=1):
    """Derivative of a scalar function of one variable, one Richardson level.

    Central differences at step and step/2 are combined to cancel the
    leading O(step^2) term.
    """
    def central(s):
        if order == 1:
            return (g(t0 + s) - g(t0 - s)) / (2 * s)
        if order == 2:
            return (g(t0 + s) - 2 * g(t0) + g(t0 - s)) / s**2
        raise ValueError("order must be 1 or 2")
    d1, d2 = central(step), central(step / 2)
    return (4 * d2 - d1) / 3


def jacobian(func, x, step):
    """Central-difference Jacobian of a vector function."""
    x = np.asarray(x, dtype=float)
    f0 = np.atleast_1d(func(x))
    J = np.empty((f0.size, x.size))
    for k in range(x.size):
        dx = np.zeros_like(x)
        dx[k] = step
        J[:, k] = (np.atleast_1d(func(x + dx)) - np.atleast_1d(func(x - dx))) / (2 * step)
    return J


def gradient(func, x, step):
    return jacobian(lambda y: np.array([func(y)]), x, step)[0]


def hessian(func, x, steps):
    """Symmetric central-difference Hessian of a scalar function.

    steps may be a scalar or a per-coordinate array.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    s = np.broadcast_to(np.asarray(steps, dtype=float), (n,))
    H = np.empty((n, n))
    f0 = func(x)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = s[i]
        H[i, i] = (func(x + ei) - 2 * f0 + func(x - ei)) / s[i] ** 2
        for j in range(i):
            ej = np.zeros(n)
            ej[j] = s[j]
            val = (func(x + ei + ej) - func(x + ei - ej)
                   - func(x - ei + ej) + func(x - ei - ej)) / (4 * s[i] * s[j])
            H[i, j] = H[j, i] = val
    return H

"""Overflow-safe exponential primitives.

Every exponential in the package goes through :func:`decay` or
:func:`one_minus_decay`, both of which only accept non-negative rates, so
``exp`` is never called with a positive argument.  Small ``eps`` (down to
1e-300) therefore produces underflow to zero instead of ``inf``/``nan``.
"""

import numpy as np


def decay(t):
    """exp(-t) for t >= 0 (t may be +inf)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("decay() called with a negative rate")
    out = np.exp(-t)
    return out if out.ndim else float(out)


def one_minus_decay(t):
    """1 - exp(-t) for t >= 0, accurate for small t."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("one_minus_decay() called with a negative rate")
    out = -np.expm1(-t)
    return out if out.ndim else float(out)


def ratio(a, eps):
    """a / eps with 0/0 -> 0 and a/0 -> inf, for a >= 0."""
    a = np.asarray(a, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = np.where(a == 0.0, 0.0, a / eps)
    return out if out.ndim else float(out)


def langevin(z):
    """coth(z) - 1/z, stable near z = 0 and for z = inf."""
    z = float(z)
    if z < 0:
        raise ValueError("langevin() expects z >= 0")
    if z < 1e-3:
        # series: z/3 - z^3/45 + 2 z^5/945
        z2 = z * z
        return z * (1.0 / 3.0 - z2 * (1.0 / 45.0 - z2 * 2.0 / 945.0))
    if np.isinf(z):
        return 1.0
    return 1.0 / np.tanh(z) - 1.0 / z


def z_minus_tanh(z):
    """z - tanh(z), stable near z = 0."""
    z = float(z)
    if z < 1e-2:
        z2 = z * z
        # z^3/3 - 2 z^5/15 + 17 z^7/315
        return z * z2 * (1.0 / 3.0 - z2 * (2.0 / 15.0 - z2 * 17.0 / 315.0))
    return z - np.tanh(z)

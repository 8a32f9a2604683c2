"""Smooth cutoff functions built from the ``exp(-1/x)`` gluing.

All profiles are fixed closed-form expressions so that every run is
reproducible bit-for-bit:

    psi(x)   = exp(-1/x) for x > 0, else 0
    step(x)  = psi(x) / (psi(x) + psi(1 - x))      (0 for x <= 0, 1 for x >= 1)
    eta(t)   = step(2 - |t|)                        (1 on [-1, 1], 0 off (-2, 2))
    eta_T(t) = eta(t / T)
    rho(y)   = step(y + 1)                          (0 for y <= -1, 1 for y >= 0)
    chi(t)   = 1 for t >= 0, else 0
"""

from dataclasses import dataclass

import numpy as np


def _psi(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def smooth_step(x):
    """C-infinity step, 0 for ``x <= 0`` and 1 for ``x >= 1``."""
    x = np.asarray(x, dtype=float)
    a = _psi(x)
    b = _psi(1.0 - x)
    return a / (a + b)


def eta(t):
    return smooth_step(2.0 - np.abs(np.asarray(t, dtype=float)))


def eta_T(t, T):
    if T <= 0:
        raise ValueError("T must be positive")
    return eta(np.asarray(t, dtype=float) / T)


def rho(y):
    return smooth_step(np.asarray(y, dtype=float) + 1.0)


def chi(t):
    return (np.asarray(t, dtype=float) >= 0).astype(float)


def bump(t, a, b):
    """Smooth bump supported in ``[a, b]`` with maximum 1 at the midpoint."""
    t = np.asarray(t, dtype=float)
    u = (t - a) / (b - a)
    out = np.zeros_like(t)
    inside = (u > 0) & (u < 1)
    ui = u[inside]
    out[inside] = np.exp(4.0 - 1.0 / ui - 1.0 / (1.0 - ui))
    return out


@dataclass(frozen=True)
class CutoffProfile:
    """The cutoffs used by one run; ``T`` sets the scale of ``eta_T``."""

    T: float = 1.0

    def eta(self, t):
        return eta(t)

    def eta_T(self, t):
        return eta_T(t, self.T)

    def rho(self, y):
        return rho(y)

    def check(self, n=4001):
        """Return the support/range predicates as a dict of booleans."""
        t = np.linspace(-3.0, 3.0, n)
        e = eta(t)
        y = np.linspace(-2.0, 2.0, n)
        r = rho(y)
        inner = np.abs(t) <= 1
        outer = np.abs(t) >= 2
        return {
            "eta_one_on_unit": bool(np.all(e[inner] == 1.0)),
            "eta_zero_outside": bool(np.all(e[outer] == 0.0)),
            "eta_in_unit_interval": bool(np.all((e >= 0) & (e <= 1))),
            "eta_even": bool(np.array_equal(e, eta(-t))),
            "rho_one_on_halfline": bool(np.all(r[y >= 0] == 1.0)),
            "rho_zero_left": bool(np.all(r[y <= -1] == 0.0)),
            "rho_in_unit_interval": bool(np.all((r >= 0) & (r <= 1))),
        }

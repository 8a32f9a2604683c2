"""Travelling waves of u_t + u_xxx + (u^4)_x = 0.

``Q_c(y) = [(5c/2) sech^2(3 sqrt(c) y / 2)]^{1/3}`` solves
``Q'' - c Q + Q^4 = 0``, so ``Q_c(x - ct)`` is a right-moving solution.
Nothing here is trusted until :func:`certify` has measured the residual.
"""

import numpy as np

from .linear import BoundaryData
from .spectral import GridFunction, SpatialGrid, spectral_derivative


def profile(y, c):
    y = np.asarray(y, dtype=float)
    k = 1.5 * np.sqrt(c)
    # sech^2 = 4 e^{-2|ky|} / (1 + e^{-2|ky|})^2, no overflow in the tails
    e = np.exp(-2.0 * np.abs(k * y))
    return np.cbrt(2.5 * c * 4.0 * e / (1.0 + e) ** 2)


def exact(x, t, c, x0):
    return profile(np.asarray(x) - x0 - c * t, c)


def travelling_residual(c, grid, x0=0.0):
    """Relative sup of ``u_t + u_xxx + (u^4)_x`` at ``t = 0`` with ``u_t = -c u_x``."""
    q = GridFunction(grid, profile(grid.x - x0, c))
    qx = spectral_derivative(q, 1).values
    qxxx = spectral_derivative(q, 3).values
    q4x = spectral_derivative(GridFunction(grid, q.values ** 4), 1).values
    r = -c * qx + qxxx + q4x
    return float(np.abs(r).max() / np.abs(qx).max())


def certify(c, half_width=64.0, n_points=2048, tol=1e-8):
    """Residual on a refined grid; raises if the profile is not a solution to ``tol``."""
    r = travelling_residual(c, SpatialGrid(half_width, n_points))
    if not r < tol:
        raise ArithmeticError(f"travelling-wave residual {r:.3e} exceeds {tol:.1e} for c={c}")
    return r


def data(c, x0, grid):
    """Whole-line initial data ``Q_c(x - x0)`` and the exact boundary trace."""
    u0e = GridFunction(grid, profile(grid.x - x0, c))
    g = BoundaryData.from_function(lambda t: profile(-x0 - c * np.asarray(t), c))
    return u0e, g

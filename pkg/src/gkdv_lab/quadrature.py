"""Composite Gauss-Legendre rules and exponential-integrator weights."""

from functools import lru_cache
from math import factorial

import numpy as np
from numpy.polynomial.legendre import leggauss


@lru_cache(maxsize=None)
def _gl(order):
    x, w = leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_rule(edges, order=16):
    """Nodes and weights of a Gauss-Legendre rule on every panel ``[e_i, e_{i+1}]``."""
    e = np.asarray(edges, dtype=float)
    x, w = _gl(order)
    mid = 0.5 * (e[1:] + e[:-1])
    hw = 0.5 * (e[1:] - e[:-1])
    return (mid[:, None] + hw[:, None] * x).ravel(), (hw[:, None] * w).ravel()


def uniform_panels(a, b, width, order=16):
    n = max(1, int(np.ceil((b - a) / width - 1e-12)))
    return panel_rule(np.linspace(a, b, n + 1), order)


def graded_edges(h, levels=40):
    """Edges ``0, h 2^-levels, ..., h/2, h``: geometric refinement towards 0."""
    return np.concatenate([[0.0], h * 2.0 ** -np.arange(levels, -1, -1)])


def ray_rule(y0, doublings=80, order=16):
    """Rule on ``[0, y0 2^doublings]`` with one panel ``[0, y0]`` then dyadic panels."""
    edges = np.concatenate([[0.0], y0 * 2.0 ** np.arange(doublings + 1)])
    return panel_rule(edges, order)


def phi_functions(z, kmax):
    """``phi_0..phi_kmax`` at ``z``; ``phi_0 = exp``, ``phi_{j+1} = (phi_j - 1/j!) / z``.

    Taylor series for ``|z| < 4`` (the recurrence cancels there), the
    recurrence elsewhere.  Returns an array of shape ``(kmax+1,) + z.shape``.
    """
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    z = z.ravel()
    out = np.empty((kmax + 1, z.size), dtype=complex)
    small = np.abs(z) < 4.0
    big = ~small
    if big.any():
        zb = z[big]
        p = np.exp(zb)
        out[0][big] = p
        for j in range(kmax):
            p = (p - 1.0 / factorial(j)) / zb
            out[j + 1][big] = p
    if small.any():
        zs = z[small]
        nterms = 60
        for j in range(kmax + 1):
            # Horner on sum_n z^n / (n+j)!
            acc = np.zeros_like(zs)
            for n in range(nterms - 1, -1, -1):
                acc = acc * zs + 1.0 / factorial(n + j)
            out[j][small] = acc
    return out.reshape((kmax + 1,) + shape)


@lru_cache(maxsize=None)
def _lagrange_monomials(offsets):
    o = np.array(offsets, dtype=float)
    V = o[:, None] ** np.arange(len(o))[None, :]
    # column m of inv(V) holds the monomial coefficients of the m-th cardinal polynomial
    return np.linalg.inv(V)


def exp_step_weights(z, offsets):
    """Weights ``W_m(z)`` with ``int_0^1 e^{z(1-th)} p(th) d th = sum_m W_m p(o_m)``.

    ``p`` is any polynomial of degree below ``len(offsets)``; ``offsets`` are
    the stencil nodes in step units.  Shape ``(len(offsets),) + z.shape``.
    """
    offsets = tuple(float(o) for o in offsets)
    coef = _lagrange_monomials(offsets)
    n = len(offsets)
    phis = phi_functions(z, n)
    # int_0^1 e^{z(1-th)} th^k d th = k! phi_{k+1}(z)
    moments = np.stack([factorial(k) * phis[k + 1] for k in range(n)])
    return np.tensordot(coef.T, moments, axes=(1, 0))


def stencil_offsets(i, n, width=6, backward=False):
    """Stencil node offsets (relative to node ``i``) for the step leaving ``i``.

    Forward steps go ``i -> i+1`` and backward steps ``i -> i-1``; offsets
    are measured in units of the signed step, so the target is always at 1.
    The stencil is centred on the step and shifted to stay inside ``[0, n)``.
    """
    half = width // 2
    if not backward:
        lo = i - half + 1
        lo = min(max(lo, 0), n - width)
        return tuple(j - i for j in range(lo, lo + width))
    lo = i - half
    lo = min(max(lo, 0), n - width)
    return tuple(i - j for j in range(lo, lo + width))

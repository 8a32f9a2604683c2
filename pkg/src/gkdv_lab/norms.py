"""Discrete Sobolev, mixed and restriction norms.

Every norm carries the Plancherel factor ``1/(2 pi)`` per transformed
variable, so that ``h_norm(f, 0)`` is the L^2 norm of the samples and
``xsb_norm(u, 0, 0)`` is the L^2_{x,t} norm.
"""

import csv
import warnings

import numpy as np

from .spectral import (
    GridFunction,
    SpaceTimeField,
    forward_transform,
    japanese,
)


class TimeDecayWarning(UserWarning):
    """A space-time field does not vanish at the edges of its time window."""


def _weighted_l2(spec_abs2, weight2, measure):
    return float(np.sqrt(measure * np.sum(weight2 * spec_abs2)))


def h_norm(f, s):
    grid = f.grid
    spec = forward_transform(f)
    return _weighted_l2(np.abs(spec) ** 2, japanese(grid.xi) ** (2 * s), grid.dxi / (2 * np.pi))


def homogeneous_h_norm(f, s):
    grid = f.grid
    spec = forward_transform(f)
    xi = np.abs(grid.xi)
    with np.errstate(divide="ignore"):
        w = np.where(xi > 0, xi ** (2.0 * s), 0.0 if s > 0 else (1.0 if s == 0 else np.inf))
    if s < 0 and np.abs(spec[xi == 0]).max() > 0:
        return float("inf")
    w = np.where(np.isfinite(w), w, 0.0)
    return _weighted_l2(np.abs(spec) ** 2, w, grid.dxi / (2 * np.pi))


def time_h_norm(series, dt, b):
    """H^b norm in ``t`` of samples on a uniform periodic grid with step ``dt``."""
    series = np.asarray(series)
    n = series.shape[-1]
    tau = 2.0 * np.pi * np.fft.fftfreq(n, d=dt)
    spec = np.fft.fft(series, axis=-1) * dt
    dtau = 2.0 * np.pi / (n * dt)
    return np.sqrt(dtau / (2 * np.pi) * np.sum(japanese(tau) ** (2 * b) * np.abs(spec) ** 2, axis=-1))


def edge_decay(u, edge_fraction=0.02):
    """Largest |u| in the outer ``edge_fraction`` of the time window, relative to max |u|."""
    vals = np.abs(u.values)
    peak = vals.max()
    if peak == 0:
        return 0.0
    m = max(1, int(round(edge_fraction * u.time.n_t)))
    edge = max(vals[:, :m].max(), vals[:, -m:].max())
    return float(edge / peak)


def xsb_norm(u, s, b, decay_tol=1e-8):
    """Restriction norm with weight ``<xi>^s <tau - xi^3>^b``.

    Emits :class:`TimeDecayWarning` (and still returns the norm) when the
    field has not decayed at the edges of its time window.
    """
    if edge_decay(u) > decay_tol:
        warnings.warn(
            f"field not localised in its time window (edge ratio {edge_decay(u):.2e})",
            TimeDecayWarning,
            stacklevel=2,
        )
    spec = forward_transform(u)
    xi = u.grid.xi[:, None]
    tau = u.time.tau[None, :]
    w2 = japanese(xi) ** (2 * s) * japanese(tau - xi ** 3) ** (2 * b)
    measure = u.grid.dxi * u.time.dtau / (2 * np.pi) ** 2
    return _weighted_l2(np.abs(spec) ** 2, w2, measure)


def mixed_norm_LinfH(u, b, columns=None):
    """``sup_x || u(x, .) ||_{H^b_t}`` over grid points (optionally a subset)."""
    vals = u.values if columns is None else u.values[columns]
    if vals.size == 0:
        return 0.0
    return float(np.max(time_h_norm(vals, u.time.dt, b)))


def mixed_norm_LpLq(u, p, q):
    """Discrete ``L^p_t L^q_x`` (``np.inf`` allowed for either exponent)."""
    a = np.abs(u.values)
    if q == np.inf:
        inner = a.max(axis=0)
    else:
        inner = (u.grid.dx * np.sum(a ** q, axis=0)) ** (1.0 / q)
    if p == np.inf:
        return float(inner.max())
    return float((u.time.dt * np.sum(inner ** p)) ** (1.0 / p))


def sup_t_h_norm(u, s, time_mask=None):
    """``sup_t ||u(., t)||_{H^s}`` over the time samples (a C^0_t H^s_x surrogate)."""
    spec = np.fft.fft(u.values, axis=0) * u.grid.dx
    w = japanese(u.grid.xi) ** (2 * s)
    per_t = np.sqrt(u.grid.dxi / (2 * np.pi) * np.sum(w[:, None] * np.abs(spec) ** 2, axis=0))
    if time_mask is not None:
        per_t = per_t[time_mask]
    return float(per_t.max()) if per_t.size else 0.0


def halfline_l2(samples, dx):
    return float(np.sqrt(dx * np.sum(np.abs(np.asarray(samples)) ** 2)))


def halfline_norm(samples, grid, s, strategies=None, return_all=False):
    """Upper bound for the H^s(R^+) norm: the least H^s norm over extensions.

    The half-line norm is an infimum over all extensions; this returns the
    minimum over the supplied :class:`~gkdv_lab.extension.ExtensionStrategy`
    set (zero, even reflection and a cubic-order reflection by default), so
    it is always an upper bound.  Strategies that do not apply at this ``s``
    are skipped; if none applies a ``ValueError`` is raised.
    """
    from .extension import ExtensionStrategy, InapplicableStrategy, extend

    if s <= -0.5:
        raise ValueError("half-line Sobolev norms need s > -1/2")
    if strategies is None:
        strategies = [ExtensionStrategy("zero"), ExtensionStrategy("even"),
                      ExtensionStrategy("hestenes", 3)]
    values = {}
    for strat in strategies:
        try:
            ext = extend(samples, grid, s, strat)
        except InapplicableStrategy:
            continue
        values[strat.label] = h_norm(ext, s)
    if not values:
        raise ValueError(f"no extension strategy applies at s={s}")
    best = min(values.values())
    return (best, values) if return_all else best


def write_norm_report(path, rows):
    """CSV with one row per norm: name, indices, value and grid metadata."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["norm", "s", "b", "value", "L", "n", "t_min", "t_max", "n_t"])
        for r in rows:
            w.writerow([r.get("norm"), r.get("s", ""), r.get("b", ""), repr(float(r["value"])),
                        r.get("L", ""), r.get("n", ""), r.get("t_min", ""), r.get("t_max", ""),
                        r.get("n_t", "")])


def norm_row(name, value, field, s=None, b=None):
    row = {"norm": name, "value": value, "s": "" if s is None else s, "b": "" if b is None else b,
           "L": field.grid.half_width, "n": field.grid.n_points}
    if isinstance(field, SpaceTimeField):
        row.update(t_min=field.time.t_min, t_max=field.time.t_max, n_t=field.time.n_t)
    return row


__all__ = [
    "GridFunction",
    "TimeDecayWarning",
    "edge_decay",
    "h_norm",
    "halfline_l2",
    "halfline_norm",
    "homogeneous_h_norm",
    "mixed_norm_LinfH",
    "mixed_norm_LpLq",
    "norm_row",
    "sup_t_h_norm",
    "time_h_norm",
    "write_norm_report",
    "xsb_norm",
]

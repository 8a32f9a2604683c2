"""Duhamel integrals, the fixed-point map and the Picard solver.

The unknown is split as ``u = L + v`` with ``L = W_0^t(u0, g)`` frozen and

    Phi(v) = -eta_T(t) [ D(G) - W_0^t(0, h) ],
    G = eta_T(t) d_x[(v + L)^4],
    D(G)(t) = int_0^t W_R^{t-t'} G(t') dt',
    h(t) = eta_T(t) D(G)(0, t),  t >= 0.

The overall minus sign makes ``L + v`` solve ``u_t + u_xxx + (u^4)_x = 0``
on ``[0, T]``.  All fields live on ``[-L, L) x [-2T, 2T)``; ``t = 0`` is a grid node.

Time integration is mode by mode with the exact integrating factor
``e^{i xi^3 h}`` and a six-point Lagrange interpolant of ``G_hat`` on each
step, marched forward and backward from ``t = 0``.
"""

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import norms
from .cutoffs import eta_T
from .extension import ExtensionStrategy, extend
from .linear import BoundaryData, QuadratureSpec, boundary_evolution, full_linear_solution
from .quadrature import exp_step_weights, stencil_offsets
from .spectral import GridFunction, SpaceTimeField, SpatialGrid, TimeGrid, japanese, padded_product

POWER = 4
STENCIL = 6


class AliasingWarning(UserWarning):
    pass


class PicardNonConvergence(RuntimeError):
    def __init__(self, message, history):
        super().__init__(message)
        self.history = list(history)


class PicardDivergence(RuntimeError):
    def __init__(self, message, history, suggested_T):
        super().__init__(message)
        self.history = list(history)
        self.suggested_T = suggested_T


@dataclass(frozen=True)
class SolverConfig:
    s: float = 0.0
    T: float = None
    picard_tol: float = 1e-8
    max_iters: int = 8
    half_width: float = 16.0
    n_points: int = 256
    n_t: int = 512
    strategy: ExtensionStrategy = ExtensionStrategy("hestenes", 3)
    quad: QuadratureSpec = QuadratureSpec()
    grid_tol: float = 1e-6
    alias_tol: float = 1e-8
    nonlinear: bool = True
    T_scale: float = 0.5
    T_exponent: float = 3.0
    xsb_b: float = 0.55

    def __post_init__(self):
        if self.T is not None and not 0 < self.T <= 1:
            raise ValueError("T must lie in (0, 1]")
        for name in ("picard_tol", "grid_tol", "alias_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.n_t % 2:
            raise ValueError("n_t must be even so that t = 0 is a node")

    @property
    def grid(self):
        return SpatialGrid(self.half_width, self.n_points)

    def time_grid(self, T):
        return TimeGrid.symmetric(2.0 * T, self.n_t)


@dataclass
class PicardState:
    v: SpaceTimeField
    L: SpaceTimeField
    T: float
    config: SolverConfig
    G: SpaceTimeField = None
    h: BoundaryData = None
    residuals: list = field(default_factory=list)
    norms: list = field(default_factory=list)
    converged: bool = False

    @property
    def iterations(self):
        return len(self.residuals)

    @property
    def contraction_ratios(self):
        r = self.residuals
        return [b / a if a > 0 else 0.0 for a, b in zip(r[:-1], r[1:])]


# ------------------------------------------------------------------ Duhamel


def _weights_cache(omega, h, n_t, backward):
    cache = {}
    z = 1j * omega * (-h if backward else h)
    for i in range(n_t):
        if (backward and i == 0) or (not backward and i == n_t - 1):
            continue
        offs = stencil_offsets(i, n_t, STENCIL, backward)
        if offs not in cache:
            cache[offs] = exp_step_weights(z, offs)
    return cache


def duhamel_integral(N):
    """``int_0^t W_R^{t-t'} N(t') dt'`` on every node of ``N``'s time grid."""
    time = N.time
    i0 = time.zero_index
    if i0 is None:
        raise ValueError("t = 0 must be a node of the time grid")
    n_t = time.n_t
    h = time.dt
    omega = N.grid.xi ** 3
    Nh = np.fft.fft(N.values, axis=0)
    D = np.zeros_like(Nh)
    prop_f = np.exp(1j * omega * h)
    prop_b = np.conj(prop_f)
    wf = _weights_cache(omega, h, n_t, False)
    for i in range(i0, n_t - 1):
        offs = stencil_offsets(i, n_t, STENCIL, False)
        W = wf[offs]
        acc = sum(W[m] * Nh[:, i + o] for m, o in enumerate(offs))
        D[:, i + 1] = prop_f * D[:, i] + h * acc
    wb = _weights_cache(omega, h, n_t, True)
    for i in range(i0, 0, -1):
        offs = stencil_offsets(i, n_t, STENCIL, True)
        W = wb[offs]
        acc = sum(W[m] * Nh[:, i - o] for m, o in enumerate(offs))
        D[:, i - 1] = prop_b * D[:, i] - h * acc
    out = np.fft.ifft(D, axis=0)
    if not np.iscomplexobj(N.values):
        out = out.real
    return N.with_values(out)


# ------------------------------------------------------------- nonlinearity


def _derivative_x(values, grid):
    spec = np.fft.fft(values, axis=0) * (1j * grid.xi)[:, None]
    n = grid.n_points
    spec[n // 2] = 0.0  # Nyquist mode has no real derivative
    out = np.fft.ifft(spec, axis=0)
    return out.real if not np.iscomplexobj(values) else out


def alias_fraction(values):
    """Share of spectral energy in the top third of the modes, worst time slice."""
    spec = np.abs(np.fft.fft(values, axis=0)) ** 2
    n = values.shape[0]
    k = np.abs(np.fft.fftfreq(n, 1.0 / n))
    top = k > n / 3
    tot = spec.sum(axis=0)
    frac = np.where(tot > 0, spec[top].sum(axis=0) / np.where(tot > 0, tot, 1.0), 0.0)
    return float(frac.max())


def nonlinearity_G(v, L, T, alias_tol=1e-8):
    """``eta_T(t) d_x[(v + L)^4]`` with the power dealiased by zero padding.

    Warns when more than ``alias_tol`` of the energy of ``(v + L)^4`` lies
    beyond the grid band (and is therefore dropped).
    """
    w = v.values + L.values
    spec, lost = padded_product([w] * POWER)
    if lost > alias_tol:
        warnings.warn(f"(v+L)^{POWER} has {lost:.2e} of its energy beyond the grid band",
                      AliasingWarning, stacklevel=2)
    spec = spec * (1j * v.grid.xi)[:, None]
    spec[v.grid.n_points // 2] = 0.0
    vals = np.fft.ifft(spec, axis=0)
    if not np.iscomplexobj(w):
        vals = vals.real
    vals = vals * eta_T(v.t, T)[None, :]
    return v.with_values(vals, alias_fraction=lost)


def boundary_correction_h(G, T, D=None):
    """``h(t) = eta_T(t) D(G)(0, t)`` on the nodes ``t >= 0`` as boundary data."""
    if D is None:
        D = duhamel_integral(G)
    i0 = G.time.zero_index
    t = G.t[i0:]
    trace = np.real(D.values[G.grid.origin_index, i0:]) * eta_T(t, T)
    # h vanishes past 2T; padding with zeros keeps the spline end flat
    pad = G.time.dt * np.arange(1, 33)
    t = np.concatenate([t, t[-1] + pad])
    trace = np.concatenate([trace, np.zeros(pad.size)])
    return BoundaryData.from_samples(t, trace)


def _phi(v, L, T, config):
    G = nonlinearity_G(v, L, T, config.alias_tol)
    D = duhamel_integral(G)
    h = boundary_correction_h(G, T, D)
    window = -eta_T(v.t, T)[None, :]
    if h.scale() == 0:
        vals = window * D.values
    else:
        # h only has to be resolved to the Picard tolerance
        quad = replace(config.quad, cutoff_tol=max(config.quad.cutoff_tol, 1e-2 * config.picard_tol))
        bnd = boundary_evolution(h, v.grid, v.time, quad)
        vals = window * (D.values - bnd.values)
    return v.with_values(vals), G, h


def apply_Phi(state):
    out, G, h = _phi(state.v, state.L, state.T, state.config)
    state.G = G
    state.h = h
    return out


# ------------------------------------------------------------------- solver


def default_T(u0e, g, s, config):
    size = norms.h_norm(u0e, s)
    tt = np.linspace(0.0, 2.0, 2049)[:-1]
    size += float(norms.time_h_norm(g(tt), tt[1] - tt[0], (s + 1.0) / 3.0))
    return min(1.0, config.T_scale * (1.0 + size) ** (-config.T_exponent))


def _as_whole_line(u0, grid, config):
    if isinstance(u0, GridFunction):
        return u0
    return extend(np.asarray(u0), grid, config.s, config.strategy)


def linear_part(u0, g, config, T):
    grid = config.grid
    u0e = _as_whole_line(u0, grid, config)
    return full_linear_solution(u0e, g, grid, config.time_grid(T), config.strategy, config.s,
                                config.quad)


def picard_solve(u0, g, config=SolverConfig(), L=None):
    """Solve on ``[0, T]``; returns ``(u, state)`` with ``u = L + v``.

    ``u0`` is half-line samples (extended with ``config.strategy``) or an
    already extended :class:`GridFunction`; ``g`` is :class:`BoundaryData`.
    """
    s = config.s
    if not -1.0 / 6.0 < s < 2.0:
        warnings.warn(f"s={s} is outside (-1/6, 2); attempting anyway", stacklevel=2)
    grid = config.grid
    u0e = _as_whole_line(u0, grid, config)
    T = config.T if config.T is not None else default_T(u0e, g, s, config)
    if L is None:
        L = linear_part(u0e, g, config, T)
    state = PicardState(v=L.with_values(np.zeros(L.values.shape)), L=L, T=T, config=config)
    if not config.nonlinear:
        state.converged = True
        state.residuals.append(0.0)
        return L.with_values(L.values, T=T), state
    mask = L.time.between(0.0, T)
    for it in range(config.max_iters):
        new = apply_Phi(state)
        diff = norms.sup_t_h_norm(new - state.v, s)
        size = norms.sup_t_h_norm(new, s)
        res = diff / size if size > 0 else 0.0
        state.residuals.append(res)
        state.norms.append({"sup_t_Hs": size, "sup_t_Hs_window": norms.sup_t_h_norm(new, s, mask)})
        state.v = new
        if not np.isfinite(res):
            raise PicardDivergence("non-finite residual", state.residuals, T / 2)
        if res < config.picard_tol:
            state.converged = True
            break
        r = state.residuals
        if len(r) >= 3 and r[-1] > r[-2] > r[-3]:
            raise PicardDivergence(
                f"residual grew twice running ({r[-3]:.2e} -> {r[-2]:.2e} -> {r[-1]:.2e}); "
                f"try T={T / 2:g}",
                r,
                T / 2,
            )
    if not state.converged:
        raise PicardNonConvergence(
            f"no convergence in {config.max_iters} iterations (last residual {state.residuals[-1]:.2e})",
            state.residuals,
        )
    u = L + state.v
    return u.with_values(u.values, T=T, iterations=state.iterations), state


def xsb_report(state, b=None):
    b = state.config.xsb_b if b is None else b
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", norms.TimeDecayWarning)
        return {"v": norms.xsb_norm(state.v, state.config.s, b), "b": b}


# ------------------------------------------------------------- diagnostics


def tail_slope(spectrum_abs2, xi, band, n_bins=12):
    """Least-squares slope of ``log|f_hat|`` against ``log<xi>`` over ``band``.

    ``spectrum_abs2`` is ``|f_hat|^2`` (any shape with ``xi`` on axis 0).
    Trailing axes are averaged, then ``|xi|`` is grouped into ``n_bins``
    bins of equal width in ``log<xi>`` and the mean power of each bin is fitted.
    """
    lo, hi = band
    a = spectrum_abs2.reshape(spectrum_abs2.shape[0], -1).mean(axis=1)
    lk = np.log(japanese(np.abs(xi)))
    edges = np.linspace(np.log(japanese(lo)), np.log(japanese(hi)), n_bins + 1)
    X, Y = [], []
    for a0, a1 in zip(edges[:-1], edges[1:]):
        sel = (lk >= a0) & (lk <= a1)
        if sel.any() and a[sel].mean() > 0:
            X.append(lk[sel].mean())
            Y.append(0.5 * np.log(a[sel].mean()))
    if len(X) < 2:
        raise ValueError("frequency band holds fewer than two populated bins")
    slope, _ = np.polyfit(X, Y, 1)
    return float(slope)


def smoothing_diagnostic(u, u0, g, a_grid, config, L=None, band=None, t_fraction=(0.5, 1.0)):
    """Compare ``d = u - W_0^t(u0, g)`` with ``u``.

    Reports ``sup_t ||d(t)||_{H^{s+a}}`` on ``[0, T]`` for each ``a`` and
    the fitted tail slopes of ``d`` and ``u`` (time-averaged over
    ``t in [f0 T, f1 T]``) on the frequency ``band``.  ``decay_gain`` is
    ``slope(u) - slope(d)``, the extra decay exponent of ``d``.
    """
    T = u.meta.get("T", config.T)
    if L is None:
        L = linear_part(u0, g, config, T)
    d = u - L
    mask = u.time.between(0.0, T)
    sob = {float(a): norms.sup_t_h_norm(d, config.s + a, mask) for a in a_grid}
    grid = u.grid
    if band is None:
        # the quartic is formed without aliasing, so every grid mode is usable
        band = (2.0, grid.xi_max)
    tmask = u.time.between(t_fraction[0] * T, t_fraction[1] * T)
    du = np.abs(np.fft.fft(d.values[:, tmask], axis=0)) ** 2
    uu = np.abs(np.fft.fft(u.values[:, tmask], axis=0)) ** 2
    if not du.any():
        return {"sobolev": sob, "slope_d": None, "slope_u": None, "decay_gain": None,
                "band": list(band)}
    sd = tail_slope(du, grid.xi, band)
    su = tail_slope(uu, grid.xi, band)
    return {"sobolev": sob, "slope_d": sd, "slope_u": su, "decay_gain": su - sd, "band": list(band)}


def fd_weights(offsets, order):
    """Finite-difference weights for the ``order``-th derivative on ``offsets`` (unit spacing)."""
    o = np.asarray(offsets, dtype=float)
    V = o[None, :] ** np.arange(len(o))[:, None]
    rhs = np.zeros(len(o))
    rhs[order] = float(np.prod(np.arange(1, order + 1)))
    return np.linalg.solve(V, rhs)


def _time_derivative(series, dt, width=7):
    # sixth-order differences, centred where possible
    n = series.shape[-1]
    out = np.empty(series.shape)
    for i in range(n):
        lo = min(max(i - width // 2, 0), n - width)
        w = fd_weights(np.arange(lo, lo + width) - i, 1)
        out[..., i] = series[..., lo:lo + width] @ w / dt
    return out


# Gregory end corrections: int_0^inf f = dx [sum' f_j + sum_k g_k (-1)^{k+1} Delta^k f_0]
_GREGORY = np.array([1.0 / 12.0, 1.0 / 24.0, 19.0 / 720.0, 3.0 / 160.0, 863.0 / 60480.0])


def halfline_integral(values, dx):
    """``int_0^inf f dx`` from samples at ``x = 0, dx, 2dx, ...`` (f decayed at the far end)."""
    f = np.asarray(values)
    total = f.sum(axis=0) - 0.5 * f[0]
    cur = f[:len(_GREGORY) + 1]
    corr = 0.0
    for k, gk in enumerate(_GREGORY, start=1):
        cur = np.diff(cur, axis=0)
        corr = corr + (-1) ** (k + 1) * gk * cur[0]
    return dx * (total + corr)


def mass_dissipation_check(u, T=None, width=10, nonlinear=True):
    """Defect of the half-line mass identity on the nodes of ``[0, T]``.

    ``r(t) = dM/dt + u_x(0)^2 - (8/5) u(0)^5 - 2 u(0) u_xx(0)`` with
    ``M(t) = int_0^inf u^2 dx``; ``r = 0`` for exact solutions.  All
    derivatives are one-sided so that only ``x >= 0``, ``t >= 0`` samples
    enter (the field is not a solution outside that quadrant).  With
    ``nonlinear=False`` the quintic flux term is dropped (linear flow).
    """
    T = u.meta.get("T") if T is None else T
    grid = u.grid
    o = grid.origin_index
    i0 = u.time.zero_index
    vals = np.real(u.values[:, i0:])
    t = u.t[i0:]
    M = halfline_integral(vals[o:] ** 2, grid.dx)
    dM = _time_derivative(M, u.time.dt)
    off = np.arange(width)
    edge = vals[o:o + width]
    ux = fd_weights(off, 1) @ edge / grid.dx
    uxx = fd_weights(off, 2) @ edge / grid.dx ** 2
    u0t = vals[o]
    r = dM + ux ** 2 - 2.0 * u0t * uxx
    if nonlinear:
        r = r - 1.6 * u0t ** 5
    mask = u.time.between(0.0, T)[i0:] if T is not None else np.ones(t.size, bool)
    return t[mask], r[mask]

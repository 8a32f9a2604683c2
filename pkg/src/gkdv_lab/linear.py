"""Linear flows: the Airy group on the line and the half-line boundary operator.

Boundary operator
-----------------
For boundary data ``phi`` on ``t >= 0`` (zero for ``t < 0``) the solution of
the linear problem with zero initial data is evaluated as

    W(x, t) = (1/pi) Re int_0^inf e^{izt} F(z, x) phi_hat(z) dz,
    F(z, x) = exp(-z^{1/3} x e^{i pi/6}) rho(z^{1/3} x),

where ``phi_hat(z) = int_0^inf e^{-izs} phi(s) ds``.  This is the ``mu``
integral after ``z = mu^3``.  The ``z`` axis is split at ``Z``:

* ``[0, Z]``: Gauss-Legendre panels, geometrically graded near 0 (``F``
  has a ``z^{1/3}`` branch point there) and uniform after that.
  ``phi_hat`` is computed at the nodes by Gauss-Legendre quadrature in
  ``s``.
* ``[Z, inf)``: ``phi_hat`` is replaced by its endpoint expansion
  ``sum_k phi^{(k)}(0+) (iz)^{-(k+1)}`` (the "jet").  For ``x >= 0`` the
  integrand is analytic in the right half plane and the integral is taken
  along the vertical ray ``z = Z + iy`` (``Z - iy`` when ``t < 0``), where it
  decays exponentially.  For ``-Z^{-1/3} < x < 0`` the cutoff ``rho`` is
  not analytic and the jet is integrated along the real axis up to
  ``|x|^{-3}``, where ``rho`` switches the integrand off.

The leading jet term is not absolutely integrable at ``(x, t) = (0, 0)``;
its real-axis contribution there is purely imaginary and is dropped.
"""

import json
import warnings
from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial import chebyshev as C
from math import factorial

from scipy.interpolate import PPoly, make_interp_spline

from .cutoffs import CutoffProfile, eta, rho
from .extension import ExtensionStrategy, extend
from .quadrature import graded_edges, panel_rule, ray_rule, uniform_panels
from .spectral import GridFunction, SpaceTimeField, apply_multiplier

_ROT = np.exp(1j * np.pi / 6)
_COS30 = np.cos(np.pi / 6)
# |F| < exp(-37) ~ 1e-16 once cos(pi/6) z^{1/3} x > 37
_DECAY_REACH = 43.0
# piecewise-polynomial data: closed-form transform for |z| above this
PIECEWISE_SWITCH = 200.0


class QuadratureError(RuntimeError):
    def __init__(self, message, achieved):
        super().__init__(message)
        self.achieved = achieved


class CompatibilityWarning(UserWarning):
    pass


# ---------------------------------------------------------------- Airy group


def airy_propagate(u0, t):
    """``W_R^t u0``; real input stays real (the Nyquist mode then evolves as ``cos(t xi_N^3)``)."""
    return apply_multiplier(u0, lambda xi: np.exp(1j * t * xi ** 3))


def airy_field(u0, time):
    """``W_R^t u0`` on every node of ``time`` as a :class:`SpaceTimeField`."""
    xi = u0.grid.xi
    spec = np.fft.fft(u0.values)
    vals = np.fft.ifft(spec[:, None] * np.exp(1j * np.outer(xi ** 3, time.t)), axis=0)
    if not np.iscomplexobj(u0.values):
        vals = vals.real
    return SpaceTimeField(u0.grid, time, vals)


def origin_modes(u0):
    """Coefficients ``c_k`` with ``u0(x) = sum_k c_k e^{i xi_k x}`` (phase-shifted to x=0)."""
    grid = u0.grid
    return np.fft.fft(u0.values) / grid.n_points * np.where(grid.k % 2 == 0, 1.0, -1.0)


# ------------------------------------------------------------ boundary data


def _jet_from_function(f, delta=0.1, degree=40, order=5):
    cheb = C.Chebyshev.interpolate(f, degree, domain=[0.0, delta])
    return tuple(float(np.real(cheb.deriv(k)(0.0))) if k else float(np.real(cheb(0.0)))
                 for k in range(order))


@dataclass(frozen=True, eq=False)
class BoundaryData:
    """Boundary values ``phi(t)`` for ``t >= 0``, zero-extended to ``t < 0``.

    ``func`` is evaluated only on ``[0, support]``; ``jet`` holds the
    one-sided derivatives ``phi^{(k)}(0+)``; ``breakpoints`` are points where
    ``phi`` is only piecewise smooth (spline knots), used as panel edges.
    ``pieces`` (a :class:`scipy.interpolate.PPoly`) marks piecewise
    polynomial data, whose transform is summed exactly from the derivative
    jumps at the knots.
    """

    func: object
    jet: tuple = (0.0,)
    support: float = 2.0
    breakpoints: tuple = ()
    s: float = None
    max_frequency: float = None
    parts: tuple = ()
    pieces: object = None

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        inside = (t >= 0) & (t <= self.support)
        if inside.any():
            out[inside] = np.real(self.func(t[inside]))
        return out

    # construction

    @classmethod
    def zero(cls):
        return cls(lambda t: np.zeros_like(t), (0.0,), 0.0)

    @classmethod
    def from_function(cls, g, window=True, jet=None, support=2.0, s=None, jet_order=5):
        """Wrap a callable ``g``; with ``window`` it is multiplied by ``eta``.

        ``eta = 1`` on ``[0, 1]`` so the window does not change the values the
        half-line problem sees on ``[0, 1]``; it only makes the data compactly
        supported.
        """
        if window:
            phi = lambda t: eta(t) * g(t)  # noqa: E731
            support = min(support, 2.0)
        else:
            phi = g
        if jet is None:
            jet = _jet_from_function(phi, order=jet_order)
        return cls(phi, tuple(float(j) for j in jet), float(support), (), s)

    @classmethod
    def from_samples(cls, t, values, window=False, s=None, k=5):
        """Quintic interpolating spline through samples on ``t >= 0``.

        The spline is taken as zero past the last sample, so samples should
        have decayed there.
        """
        t = np.asarray(t, dtype=float)
        values = np.real(np.asarray(values))
        if t[0] != 0.0:
            raise ValueError("samples must start at t = 0")
        spline = make_interp_spline(t, values, k=k)
        if window:
            phi = lambda tt: eta(tt) * spline(tt)  # noqa: E731
            pieces = None
        else:
            phi = spline
            pieces = PPoly.from_spline(spline)
        jet = tuple(float(spline(0.0, nu=j)) for j in range(k + 1 if pieces is not None else k))
        return cls(phi, jet, float(t[-1]), tuple(t), s, pieces=pieces)

    def _combine(self, other, a, b):
        f1, f2 = self, other

        def func(t):
            return a * f1(t) + b * f2(t)

        n = max(len(f1.jet), len(f2.jet))
        j1 = np.pad(np.asarray(f1.jet), (0, n - len(f1.jet)))
        j2 = np.pad(np.asarray(f2.jet), (0, n - len(f2.jet)))
        bps = tuple(sorted(set(f1.breakpoints) | set(f2.breakpoints)))
        return BoundaryData(func, tuple(a * j1 + b * j2), max(f1.support, f2.support), bps, self.s,
                            parts=(f1, f2))

    def __add__(self, other):
        return self._combine(other, 1.0, 1.0)

    def __sub__(self, other):
        return self._combine(other, 1.0, -1.0)

    def __mul__(self, alpha):
        f = self
        return BoundaryData(lambda t: alpha * f(t), tuple(alpha * np.asarray(f.jet)),
                            f.support, f.breakpoints, f.s, f.max_frequency, (f,))

    __rmul__ = __mul__

    # transforms

    def s_rule(self, z_top, order=16, max_width=0.05):
        """Gauss-Legendre rule on ``[0, support]`` resolving ``e^{-izs}`` up to ``z_top``."""
        if self.support <= 0:
            return np.zeros(0), np.zeros(0)
        width = min(max_width, 12.0 / max(z_top, 1.0))
        edges = [0.0, self.support]
        edges += [b for b in self.breakpoints if 0.0 < b < self.support]
        edges = np.unique(edges)
        fine = []
        for a, b in zip(edges[:-1], edges[1:]):
            m = max(1, int(np.ceil((b - a) / width)))
            fine.append(np.linspace(a, b, m + 1)[:-1])
        fine.append([edges[-1]])
        return panel_rule(np.concatenate(fine), order)

    def _knot_jumps(self):
        pp = self.pieces
        knots = pp.x
        deg = pp.c.shape[0] - 1
        h = np.diff(knots)
        # derivative k at the left and right ends of every piece
        left = np.array([factorial(k) * pp.c[deg - k] for k in range(deg + 1)])
        right = np.empty_like(left)
        for k in range(deg + 1):
            acc = np.zeros(h.size)
            for m in range(deg, k - 1, -1):
                acc = acc * h + pp.c[deg - m] * factorial(m) / factorial(m - k)
            right[k] = acc
        jumps = np.zeros((deg + 1, knots.size))
        jumps[:, :-1] += left
        jumps[:, 1:] -= right
        return knots, jumps

    def _exact_transform(self, z):
        # int e^{-izs} phi = sum_knots sum_k J_k e^{-iz t_j} (iz)^{-(k+1)}
        knots, jumps = self._knot_jumps()
        out = np.empty(z.size, dtype=complex)
        for i in range(0, z.size, 2048):
            zz = z[i:i + 2048]
            E = np.exp(-1j * np.outer(zz, knots))
            acc = np.zeros(zz.size, dtype=complex)
            for k in range(jumps.shape[0] - 1, -1, -1):
                acc = (acc + E @ jumps[k]) / (1j * zz)
            out[i:i + 2048] = acc
        return out

    def transform(self, z, z_top=None):
        """``phi_hat(z) = int_0^support e^{-izs} phi(s) ds`` at real ``z``."""
        z = np.asarray(z, dtype=float)
        if self.pieces is not None:
            # closed form away from 0, where the knot sum does not cancel
            flat = z.ravel()
            big = np.abs(flat) >= PIECEWISE_SWITCH
            out = np.empty(flat.size, dtype=complex)
            if big.any():
                out[big] = self._exact_transform(flat[big])
            if (~big).any():
                out[~big] = replace(self, pieces=None).transform(flat[~big], PIECEWISE_SWITCH)
            return out.reshape(z.shape)
        s, w = self.s_rule(z_top if z_top is not None else np.abs(z).max(initial=1.0))
        if s.size == 0:
            return np.zeros(z.shape, dtype=complex)
        wf = w * self(s)
        out = np.empty(z.size, dtype=complex)
        flat = z.ravel()
        chunk = max(1, min(512, 2_000_000 // s.size))
        for i in range(0, flat.size, chunk):
            out[i:i + chunk] = np.exp(-1j * np.outer(flat[i:i + chunk], s)) @ wf
        return out.reshape(z.shape)

    def asymptotic(self, z):
        """Endpoint expansion ``sum_k phi^{(k)}(0+) (iz)^{-(k+1)}`` (complex ``z`` allowed)."""
        iz = 1j * np.asarray(z, dtype=complex)
        out = np.zeros(iz.shape, dtype=complex)
        p = 1.0 / iz
        for a in self.jet:
            out = out + a * p
            p = p / iz
        return out

    def scale(self):
        s, w = self.s_rule(1.0)
        return float(np.abs(self(s)).max(initial=0.0))


# ----------------------------------------------------------- quadrature spec


@dataclass(frozen=True)
class QuadratureSpec:
    """Quadrature of the ``z`` (or ``mu``) integral.

    ``n_panels`` counts uniform panels on ``[0, Z]`` (``None``: choose the
    width from the oscillation rate of the integrand).  ``z_max`` is the
    truncation ``Z`` (``None``: from the decay of the data's transform
    beyond its jet).  With ``substitution=False`` the same integral is
    computed in the original ``mu`` variable, panels uniform in ``mu``.
    """

    substitution: bool = True
    n_panels: int = None
    order: int = 16
    z_max: float = None
    tol: float = 1e-8
    grading_levels: int = 40
    tail: bool = True
    cutoff_tol: float = 1e-12

    def doubled(self, n_panels):
        return replace(self, n_panels=2 * n_panels)


def choose_cutoff(g, tol=1e-12, z_lo=16.0, z_cap=2.0 ** 17):
    """Smallest ``Z`` beyond which ``z |phi_hat(z) - jet(z)|`` stays below ``tol * max|phi|``.

    Sums and multiples take the largest cutoff of their parts.  Data with a
    known top frequency (finite sums of ``e^{i omega t}`` windowed by
    ``eta``) use ``Z = max(800, 4 omega_max)``, where a 30-term jet is exact
    to roundoff.
    """
    if g.parts:
        return max(choose_cutoff(p, tol, z_lo, z_cap) for p in g.parts)
    if g.max_frequency is not None:
        return max(800.0, 4.0 * g.max_frequency)
    scale = g.scale()
    if scale == 0:
        return z_lo
    zs = np.geomspace(z_lo, z_cap, 69)
    r = np.abs(g.transform(zs, z_top=z_cap) - g.asymptotic(zs))
    s, w = g.s_rule(1.0)
    floor = 100 * np.finfo(float).eps * np.sum(w * np.abs(g(s)))
    bad = np.flatnonzero((zs * r > tol * scale) & (r > floor))
    if bad.size == 0:
        return z_lo
    if bad[-1] == zs.size - 1:
        warnings.warn(f"boundary data transform not resolved below z={z_cap:g}", stacklevel=2)
        return z_cap
    return float(zs[bad[-1] + 1])


def _z_nodes(quad, Z, t_reach):
    """Nodes, weights and per-node panel index on ``[0, Z]``."""
    order = quad.order
    if quad.substitution:
        if quad.n_panels is None:
            width = min(4.0, 12.0 / max(t_reach, 1e-3))
            n_pan = max(1, int(np.ceil(Z / width)))
        else:
            n_pan = quad.n_panels
        h0 = Z / n_pan
        zg, wg = panel_rule(graded_edges(h0, quad.grading_levels), order)
        zu, wu = uniform_panels(h0, Z, h0, order) if n_pan > 1 else (np.zeros(0), np.zeros(0))
        return np.concatenate([zg, zu]), np.concatenate([wg, wu]), n_pan, (h0, zu.size)
    # mu variable: integrand 3 mu^2 (...) d mu, uniform panels in mu
    M = Z ** (1.0 / 3.0)
    if quad.n_panels is None:
        width = min(0.25, 4.0 / max(3.0 * M ** 2 * t_reach, 1e-3))
        n_pan = max(1, int(np.ceil(M / width)))
    else:
        n_pan = quad.n_panels
    mu, wm = uniform_panels(0.0, M, M / n_pan, order)
    return mu ** 3, 3.0 * mu ** 2 * wm, n_pan, None


def _transform_at_nodes(g, z, layout, order, Z):
    """``phi_hat`` at the ``z`` nodes; uniform panels use a factored exponential."""
    if layout is None or g.pieces is not None:
        return g.transform(z, z_top=Z)
    h0, n_uniform = layout
    n_graded = z.size - n_uniform
    out = np.empty(z.size, dtype=complex)
    out[:n_graded] = g.transform(z[:n_graded], z_top=Z)
    if n_uniform:
        s, w = g.s_rule(Z, order)
        wf = w * g(s)
        n_pan = n_uniform // order
        centres = h0 + h0 * (np.arange(n_pan) + 0.5)
        local = z[n_graded:n_graded + order] - centres[0]
        B = np.exp(-1j * np.outer(s, local))
        step = np.exp(-1j * h0 * s)
        row = np.exp(-1j * centres[0] * s) * wf
        blk = np.empty((n_pan, order), dtype=complex)
        for p in range(n_pan):
            if p % 64 == 0:
                # refresh to keep the running product exact
                row = np.exp(-1j * centres[p] * s) * wf
            blk[p] = row @ B
            row = row * step
        out[n_graded:] = blk.ravel()
    return out


def _F(z, x):
    y = np.multiply.outer(np.cbrt(z) if np.isrealobj(z) else z ** (1.0 / 3.0), x)
    out = np.exp(-y * _ROT)
    if np.isrealobj(z):
        neg = x < 0
        if neg.any():
            out[:, neg] *= rho(y[:, neg])
    return out


def _active_columns(x, z_lo):
    # F vanishes for x > reach / z^{1/3} (decay) and x <= -1 / z^{1/3} (rho)
    r = max(z_lo, 1e-300) ** (1.0 / 3.0)
    return np.flatnonzero((x <= _DECAY_REACH / r) & (x > -1.0 / r))


def _main_part(t, x, z, w, ghat, block=1024):
    out = np.zeros((t.size, x.size))
    coeff = w * ghat
    for i in range(0, z.size, block):
        zb = z[i:i + block]
        cols = _active_columns(x, zb.min())
        if cols.size == 0:
            continue
        E = np.exp(1j * np.outer(t, zb)) * coeff[i:i + block]
        out[:, cols] += (E @ _F(zb, x[cols])).real
    return out / np.pi


def _ray_tail(g, t, x, Z, order):
    """Jet contribution beyond ``Z`` for ``x >= 0`` along ``Z +- iy``."""
    out = np.zeros((t.size, x.size))
    cols = np.flatnonzero(x >= 0)
    if cols.size == 0:
        return out
    y, wy = ray_rule(1e-6 * Z, 80, order)
    for sgn, rows in ((1.0, t >= 0), (-1.0, t < 0)):
        if not rows.any():
            continue
        zc = Z + sgn * 1j * y
        J = g.asymptotic(zc)
        tt = t[rows]
        F = np.exp(-np.multiply.outer(zc ** (1.0 / 3.0), x[cols]) * _ROT)
        E = np.exp(1j * np.outer(tt, zc)) * (wy * sgn * 1j * J)
        vals = (E @ F).real / np.pi
        out[np.ix_(np.flatnonzero(rows), cols)] = vals
    corner = (t == 0.0)
    if corner.any() and (x == 0.0).any() and g.jet and g.jet[0] != 0.0:
        # drop the leading term at (0, 0): its real-axis value is purely imaginary
        j0 = BoundaryData(None, (g.jet[0],))
        zc = Z + 1j * y
        lead = (wy * 1j * j0.asymptotic(zc)).sum().real / np.pi
        out[np.ix_(np.flatnonzero(corner), np.flatnonzero(x == 0.0))] -= lead
    return out


def _negative_tail(g, t, x, Z, order):
    """Jet contribution on ``[Z, |x|^-3]`` for columns with ``-Z^{-1/3} < x < 0``."""
    out = np.zeros((t.size, x.size))
    t_reach = max(np.abs(t).max(initial=0.0), 1e-3)
    if not np.any(g.jet):
        return out
    for c in np.flatnonzero((x < 0) & (x > -Z ** (-1.0 / 3.0))):
        top = abs(x[c]) ** -3.0
        z, w = uniform_panels(Z, top, min(4.0, 12.0 / t_reach), order)
        coeff = w * g.asymptotic(z) * _F(z, x[c:c + 1])[:, 0]
        for i in range(0, z.size, 4096):
            out[:, c] += (np.exp(1j * np.outer(t, z[i:i + 4096])) @ coeff[i:i + 4096]).real
        out[:, c] /= np.pi
    return out


def _evaluate(g, grid, time, quad):
    t = time.t
    x = grid.x
    Z = quad.z_max if quad.z_max is not None else choose_cutoff(g, quad.cutoff_tol)
    t_reach = np.abs(t).max() + g.support
    z, w, n_pan, layout = _z_nodes(quad, Z, t_reach)
    ghat = _transform_at_nodes(g, z, layout, quad.order, Z)
    vals = _main_part(t, x, z, w, ghat)
    if quad.tail:
        vals += _ray_tail(g, t, x, Z, quad.order)
        vals += _negative_tail(g, t, x, Z, quad.order)
    info = {"z_max": float(Z), "n_panels": int(n_pan), "n_nodes": int(z.size),
            "order": quad.order, "substitution": quad.substitution, "tail": quad.tail}
    return vals, info


def boundary_evolution(g, grid, time, quad=QuadratureSpec(), check=False):
    """``W_0^t(0, g)`` on the ``(x, t)`` grid.

    With ``check`` the panel count is doubled once and the change is
    compared with ``quad.tol``; a larger change raises
    :class:`QuadratureError`.  Diagnostics are stored in ``field.meta``.
    """
    if g.support <= 0 or g.scale() == 0:
        return SpaceTimeField(grid, time, np.zeros((grid.n_points, time.n_t)),
                              {"quadrature": {"z_max": 0.0, "n_panels": 0, "n_nodes": 0}})
    vals, info = _evaluate(g, grid, time, quad)
    if check:
        q2 = replace(quad, z_max=info["z_max"], n_panels=2 * info["n_panels"])
        vals2, _ = _evaluate(g, grid, time, q2)
        change = float(np.abs(vals2 - vals).max())
        info["self_convergence"] = change
        if change > quad.tol:
            raise QuadratureError(
                f"panel doubling changed the boundary field by {change:.3e} > tol {quad.tol:.1e}",
                change,
            )
        vals = vals2
        info["n_panels"] = q2.n_panels
    return SpaceTimeField(grid, time, vals.T, {"quadrature": info})


def self_convergence_table(g, grid, time, n_panels, z_max, doublings=3, quad=QuadratureSpec()):
    """Successive differences under panel doubling and their ratios."""
    fields = []
    counts = [n_panels * 2 ** k for k in range(doublings + 1)]
    for n in counts:
        v, _ = _evaluate(g, grid, time, replace(quad, n_panels=n, z_max=z_max))
        fields.append(v)
    diffs = [float(np.abs(b - a).max()) for a, b in zip(fields[:-1], fields[1:])]
    ratios = [a / b if b > 0 else np.inf for a, b in zip(diffs[:-1], diffs[1:])]
    return {"panels": counts, "differences": diffs, "factors": ratios}


def write_quadrature_report(path, field_or_info):
    info = field_or_info.meta.get("quadrature", {}) if hasattr(field_or_info, "meta") else field_or_info
    with open(path, "w") as fh:
        json.dump(info, fh, indent=2, sort_keys=True)


# ------------------------------------------------------------- composition


def trace_at_origin(field, window=CutoffProfile()):
    o = field.grid.origin_index
    if field.grid.x[o] != 0.0:
        raise ValueError("x = 0 is not a grid point")
    return window.eta(field.t) * field.values[o, :]


def airy_trace(u0e, mode_tol=1e-12):
    """``p(t) = eta(t) [W_R^t u0e](0)`` as :class:`BoundaryData` with its jet.

    High modes are dropped while their summed amplitude stays below
    ``mode_tol`` times the total; this bounds the change in ``p`` and keeps
    the top frequency (and so the ``z`` cutoff) finite for smooth data.
    """
    c = origin_modes(u0e)
    om = u0e.grid.xi ** 3
    order = np.argsort(-np.abs(om))
    dropped = np.cumsum(np.abs(c[order]))
    n_drop = int(np.searchsorted(dropped, mode_tol * max(dropped[-1], 1e-300), side="right"))
    keep = np.sort(order[n_drop:])
    c = c[keep]
    om = om[keep]

    def series(t):
        t = np.asarray(t, dtype=float)
        out = np.empty(t.shape)
        flat = t.ravel()
        for i in range(0, flat.size, 2048):
            out.ravel()[i:i + 2048] = (np.exp(1j * np.outer(flat[i:i + 2048], om)) @ c).real
        return out

    jet = tuple(float(np.real(np.sum(c * (1j * om) ** j))) for j in range(30))
    top = float(np.abs(om).max(initial=0.0))
    return BoundaryData(lambda t: eta(t) * series(t), jet, 2.0, max_frequency=top)


def full_linear_solution(u0, g, grid, time, strategy=ExtensionStrategy(), s=0.0,
                         quad=QuadratureSpec(), compat_tol=1e-6):
    """``W_0^t(u0, g) = W_0^t(0, g - p) + W_R^t u0e`` with ``p`` the trace of the Airy flow.

    ``u0`` holds half-line samples (``x >= 0``) or is a :class:`GridFunction`
    already extended to the whole line.
    """
    if isinstance(u0, GridFunction):
        u0e = u0
        edge = u0.values[grid.origin_index]
    else:
        u0e = extend(u0, grid, s, strategy)
        edge = np.asarray(u0)[0]
    if s > 0.5 and abs(g(np.array([0.0]))[0] - np.real(edge)) > compat_tol:
        warnings.warn(
            f"incompatible data: g(0)={g(np.array([0.0]))[0]!r} but u0(0)={np.real(edge)!r}",
            CompatibilityWarning,
            stacklevel=2,
        )
    p = airy_trace(u0e)
    lin = airy_field(u0e, time)
    bnd = boundary_evolution(g - p, grid, time, quad)
    vals = lin.values + bnd.values
    if not np.iscomplexobj(u0e.values):
        vals = np.real(vals)
    return SpaceTimeField(grid, time, vals, {"quadrature": bnd.meta.get("quadrature", {}),
                                             "extension": getattr(strategy, "label", "given")})


__all__ = [
    "BoundaryData",
    "CompatibilityWarning",
    "QuadratureError",
    "QuadratureSpec",
    "airy_field",
    "airy_propagate",
    "airy_trace",
    "boundary_evolution",
    "choose_cutoff",
    "full_linear_solution",
    "self_convergence_table",
    "trace_at_origin",
    "write_quadrature_report",
]

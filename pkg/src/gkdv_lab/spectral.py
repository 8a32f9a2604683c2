"""Uniform periodic grids, Fourier transforms and Fourier multipliers.

The real line is modelled by the torus ``[-L, L)`` sampled at ``n`` points
``x_j = -L + j*dx``.  Transforms follow the non-unitary convention

    f_hat(xi) = int exp(-i x xi) f(x) dx,

approximated by the Riemann sum ``dx * sum_j f_j exp(-i xi_k x_j)`` on the
frequencies ``xi_k = pi k / L``.  The only place the conversion between
``numpy.fft`` coefficients and continuum samples happens is
:func:`_continuum_scale`.  With this convention Parseval reads

    sum_j |f_j|^2 dx = (1 / 2pi) * sum_k |f_hat_k|^2 dxi,   dxi = pi / L.

Space-time fields use the same convention in ``t`` on a periodic window
``[t_min, t_max)``; the time-frequency variable is ``tau`` and the
transform kernel is ``exp(-i t tau)``.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SpatialGrid:
    half_width: float
    n_points: int

    def __post_init__(self):
        n = self.n_points
        if n < 2 or n & (n - 1):
            raise ValueError(f"n_points must be a power of two, got {n}")
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")

    @property
    def L(self):
        return self.half_width

    @property
    def n(self):
        return self.n_points

    @property
    def dx(self):
        return 2.0 * self.half_width / self.n_points

    @property
    def x(self):
        return -self.half_width + self.dx * np.arange(self.n_points)

    @property
    def k(self):
        """Integer mode numbers in ``numpy.fft`` order."""
        return np.fft.fftfreq(self.n_points, d=1.0 / self.n_points).astype(int)

    @property
    def xi(self):
        """Frequencies ``pi k / L`` in ``numpy.fft`` order."""
        return np.pi * self.k / self.half_width

    @property
    def dxi(self):
        return np.pi / self.half_width

    @property
    def origin_index(self):
        return self.n_points // 2

    @property
    def xi_max(self):
        return np.pi / self.dx


@dataclass(frozen=True)
class TimeGrid:
    """Uniform periodic time samples ``t_j = t_min + j*dt`` on ``[t_min, t_max)``."""

    t_min: float
    t_max: float
    n_t: int

    def __post_init__(self):
        if not self.t_max > self.t_min:
            raise ValueError("empty time window")
        if self.n_t < 2:
            raise ValueError("need at least two time samples")

    @classmethod
    def symmetric(cls, half_window, n_t):
        if n_t % 2:
            raise ValueError("symmetric windows need an even sample count so t=0 is a node")
        return cls(-half_window, half_window, n_t)

    @property
    def dt(self):
        return (self.t_max - self.t_min) / self.n_t

    @property
    def t(self):
        return self.t_min + self.dt * np.arange(self.n_t)

    @property
    def tau(self):
        return 2.0 * np.pi * np.fft.fftfreq(self.n_t, d=self.dt)

    @property
    def dtau(self):
        return 2.0 * np.pi / (self.t_max - self.t_min)

    def between(self, lo, hi):
        """Mask of nodes in ``[lo, hi]``, endpoints included despite rounding."""
        eps = 1e-9 * self.dt
        t = self.t
        return (t >= lo - eps) & (t <= hi + eps)

    @property
    def zero_index(self):
        j = -self.t_min / self.dt
        jr = int(round(j))
        if abs(j - jr) > 1e-9 or not 0 <= jr < self.n_t:
            return None
        return jr


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: SpatialGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.grid.n_points,):
            raise ValueError(f"expected {self.grid.n_points} samples, got shape {v.shape}")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, grid, f):
        return cls(grid, f(grid.x))

    @property
    def x(self):
        return self.grid.x

    def with_values(self, values):
        return GridFunction(self.grid, values)

    def __add__(self, other):
        _check_same_grid(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        _check_same_grid(self, other)
        return self.with_values(self.values - other.values)

    def __mul__(self, alpha):
        return self.with_values(alpha * self.values)

    __rmul__ = __mul__

    def l2_norm(self):
        return float(np.sqrt(self.grid.dx * np.sum(np.abs(self.values) ** 2)))


@dataclass(frozen=True, eq=False)
class SpaceTimeField:
    """Samples ``u(x_j, t_m)`` stored as an ``(n_x, n_t)`` array."""

    grid: SpatialGrid
    time: TimeGrid
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.grid.n_points, self.time.n_t):
            raise ValueError(
                f"expected shape {(self.grid.n_points, self.time.n_t)}, got {v.shape}"
            )
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def t(self):
        return self.time.t

    @property
    def x(self):
        return self.grid.x

    def with_values(self, values, **meta):
        return SpaceTimeField(self.grid, self.time, values, {**self.meta, **meta})

    def __add__(self, other):
        _check_same_grid(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        _check_same_grid(self, other)
        return self.with_values(self.values - other.values)

    def __mul__(self, alpha):
        return self.with_values(alpha * self.values)

    __rmul__ = __mul__

    def slice_at(self, m):
        return GridFunction(self.grid, self.values[:, m])

    def column(self, j):
        return self.values[j, :]

    def origin_trace(self):
        return self.values[self.grid.origin_index, :]

    def l2_norm(self):
        return float(np.sqrt(self.grid.dx * self.time.dt * np.sum(np.abs(self.values) ** 2)))


def _check_same_grid(a, b):
    if a.grid != b.grid:
        raise ValueError("grid mismatch")
    if isinstance(a, SpaceTimeField) or isinstance(b, SpaceTimeField):
        if getattr(a, "time", None) != getattr(b, "time", None):
            raise ValueError("time grid mismatch")


def _continuum_scale(grid):
    # fft coefficient -> continuum sample f_hat(xi_k); the (-1)^k is exp(i xi_k L)
    return grid.dx * np.where(grid.k % 2 == 0, 1.0, -1.0)


def _time_scale(time):
    return time.dt * np.exp(-1j * time.tau * time.t_min)


def forward_transform(f):
    """Continuum-normalised transform ``f_hat(xi_k)``, ``numpy.fft`` order.

    For a :class:`SpaceTimeField` the transform is taken in both variables and
    the result has shape ``(n_x, n_t)`` indexed by ``(xi, tau)``.
    """
    if isinstance(f, SpaceTimeField):
        spec = np.fft.fft2(f.values)
        return spec * _continuum_scale(f.grid)[:, None] * _time_scale(f.time)[None, :]
    return np.fft.fft(f.values) * _continuum_scale(f.grid)


def inverse_transform(spectrum, grid, time=None):
    if time is None:
        return GridFunction(grid, np.fft.ifft(np.asarray(spectrum) / _continuum_scale(grid)))
    coeffs = np.asarray(spectrum) / _continuum_scale(grid)[:, None] / _time_scale(time)[None, :]
    return SpaceTimeField(grid, time, np.fft.ifft2(coeffs))


def _evaluate_multiplier(m, grid, time=None):
    """Return ``(values, x_only)``; ``values`` is 1-D when ``x_only``."""
    xi = grid.xi
    x_only = True
    if callable(m):
        vals = None
        if time is not None:
            try:
                vals = m(xi[:, None], time.tau[None, :])
                x_only = False
            except TypeError:
                vals = None
        if vals is None:
            vals = m(xi)
    else:
        vals = np.asarray(m)
        x_only = vals.ndim == 1
    shape = xi.shape if x_only else (xi.size, time.tau.size)
    vals = np.broadcast_to(np.asarray(vals, dtype=complex), shape)
    bad = ~np.isfinite(vals)
    if bad.any():
        if x_only:
            i = int(np.flatnonzero(bad)[0])
            raise ValueError(f"multiplier is not finite at xi={float(xi[i])!r}")
        i, j = np.argwhere(bad)[0]
        raise ValueError(
            f"multiplier is not finite at (xi, tau)=({float(xi[i])!r}, {float(time.tau[j])!r})"
        )
    return vals, x_only


def apply_multiplier(f, m, keep_real=None):
    """Multiply the spectrum of ``f`` pointwise by ``m``.

    ``m`` is an array over the frequencies or a callable ``m(xi)``; for
    space-time fields ``m(xi, tau)`` is tried first and a function of ``xi``
    alone acts in ``x`` only.  Real input with a multiplier satisfying
    ``m(-xi) = conj(m(xi))`` gives real output (the Nyquist mode is
    symmetrised); pass ``keep_real`` to force either behaviour.
    """
    real_in = not np.iscomplexobj(f.values)
    time = f.time if isinstance(f, SpaceTimeField) else None
    vals, x_only = _evaluate_multiplier(m, f.grid, time)
    if time is None:
        out = np.fft.ifft(np.fft.fft(f.values) * vals)
    elif x_only:
        out = np.fft.ifft(np.fft.fft(f.values, axis=0) * vals[:, None], axis=0)
    else:
        out = np.fft.ifft2(np.fft.fft2(f.values) * vals)
    if keep_real is None:
        keep_real = real_in and x_only and _hermitian(vals)
    if keep_real:
        out = out.real
    return f.with_values(out)


def _hermitian(v):
    n = v.size
    idx = np.arange(1, n // 2)
    # phases like t xi^3 lose ~|phase| eps in exp, so the test is not exact
    scale = max(float(np.abs(v).max(initial=0.0)), 1e-300)
    return bool(
        np.allclose(v[idx], np.conj(v[n - idx]), rtol=1e-10, atol=1e-12 * scale)
        and abs(v[0].imag) <= 1e-12 * max(1.0, abs(v[0]))
    )


def japanese(xi):
    """``<xi> = sqrt(1 + xi^2)``."""
    return np.sqrt(1.0 + np.asarray(xi, dtype=float) ** 2)


def spectral_derivative(f, order=1):
    return apply_multiplier(f, lambda xi: (1j * xi) ** order)


def fractional_D(f, s):
    """Bessel potential ``D^s``: multiplier ``<xi>^s``."""
    return apply_multiplier(f, lambda xi: japanese(xi) ** s)


def homogeneous_I_half(f):
    """``I^{1/2}``: multiplier ``|xi|^{1/2}``."""
    return apply_multiplier(f, lambda xi: np.sqrt(np.abs(xi)))


def bilinear_I_minus_half(f, g):
    """Weighted bilinear form ``I_-^{1/2}(f, g)``.

    The output spectrum at ``xi`` is the sum over represented pairs
    ``xi_1 + xi_2 = xi`` (no wrap-around) of ``|2 xi_1 - xi|^{1/2}`` times
    the product of the input spectra.  It is normalised so that a unit weight
    would reproduce the pointwise product ``f g``; this is the continuum
    formula divided by ``2 pi``, the factor from the convolution theorem.
    """
    if f.grid != g.grid:
        raise ValueError("grid mismatch")
    grid = f.grid
    n = grid.n_points
    cf = np.fft.fftshift(np.fft.fft(f.values) / n)
    cg = np.fft.fftshift(np.fft.fft(g.values) / n)
    k = np.arange(-n // 2, n // 2)
    k1 = k[:, None]
    k2 = k[None, :]
    ksum = k1 + k2
    weight = np.sqrt(np.abs(k1 - k2) * (np.pi / grid.half_width))
    prod = weight * cf[:, None] * cg[None, :]
    ok = (ksum >= -n // 2) & (ksum < n // 2)
    out = np.zeros(n, dtype=complex)
    np.add.at(out, ksum[ok] + n // 2, prod[ok])
    return GridFunction(grid, np.fft.ifft(np.fft.ifftshift(out) * n))


def _pad_axis(spec, axis, m):
    n = spec.shape[axis]
    half = n // 2
    spec = np.moveaxis(spec, axis, 0)
    out = np.zeros((m,) + spec.shape[1:], dtype=complex)
    out[:half] = spec[:half]
    out[m - half + 1:] = spec[half + 1:]
    # split the Nyquist mode between +-half so real signals stay real
    out[half] = 0.5 * spec[half]
    out[m - half] = 0.5 * spec[half]
    return np.moveaxis(out, 0, axis)


def _truncate_axis(spec, axis, n):
    m = spec.shape[axis]
    half = n // 2
    spec = np.moveaxis(spec, axis, 0)
    out = np.zeros((n,) + spec.shape[1:], dtype=complex)
    out[:half] = spec[:half]
    out[half + 1:] = spec[m - half + 1:]
    out[half] = spec[half] + spec[m - half]
    return np.moveaxis(out, 0, axis)


def padded_product(arrays, axes=(0,)):
    """``numpy.fft`` coefficients of the pointwise product, free of aliasing.

    Each factor is zero-padded along ``axes`` to ``(p+1)/2`` times its
    length (``p`` factors), which holds every product mode; the product is
    then truncated back to the original modes.  Returns ``(spec, lost)``
    where ``lost`` is the largest (over the other axes) share of the
    product's energy that falls outside the original band.
    """
    arrays = [np.asarray(a) for a in arrays]
    shape = arrays[0].shape
    p = len(arrays)
    real = not any(np.iscomplexobj(a) for a in arrays)
    sizes = {ax: 2 * (((p + 1) * shape[ax] + 3) // 4) for ax in axes}
    prod = None
    for a in arrays:
        spec = np.fft.fftn(a, axes=axes)
        for ax in axes:
            spec = _pad_axis(spec, ax, sizes[ax])
        fine = np.fft.ifftn(spec, axes=axes) * np.prod([sizes[ax] / shape[ax] for ax in axes])
        if real:
            fine = fine.real
        prod = fine if prod is None else prod * fine
    pspec = np.fft.fftn(prod, axes=axes) * np.prod([shape[ax] / sizes[ax] for ax in axes])
    out = pspec
    for ax in axes:
        out = _truncate_axis(out, ax, shape[ax])
    e_all = np.sum(np.abs(pspec) ** 2, axis=axes)
    e_kept = np.sum(np.abs(out) ** 2, axis=axes)
    with np.errstate(invalid="ignore", divide="ignore"):
        lost = np.where(e_all > 0, 1.0 - e_kept / e_all, 0.0)
    return out, float(np.clip(lost, 0.0, 1.0).max(initial=0.0))


def plane_wave(grid, k):
    """``exp(i xi_k x)`` for the integer mode ``k``."""
    return GridFunction(grid, np.exp(1j * np.pi * k / grid.half_width * grid.x))


def tail_mass_fraction(f, inner=0.5):
    """Fraction of the L^2 mass of ``f`` outside ``[-inner*L, inner*L]``."""
    x = f.grid.x
    vals = f.values if isinstance(f, GridFunction) else f.values
    w = np.abs(vals) ** 2
    if w.ndim == 2:
        w = w.sum(axis=1)
    total = w.sum()
    if total == 0:
        return 0.0
    outside = np.abs(x) > inner * f.grid.half_width
    return float(w[outside].sum() / total)


def assert_effectively_supported(f, tol=1e-10, inner=0.5):
    frac = tail_mass_fraction(f, inner)
    if frac > tol:
        raise ValueError(
            f"field carries relative mass {frac:.3e} outside |x| <= {inner}L; "
            "enlarge the domain"
        )
    return frac

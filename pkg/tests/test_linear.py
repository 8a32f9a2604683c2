import json
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gkdv_lab import linear, norms
from gkdv_lab.cutoffs import CutoffProfile, bump, eta, smooth_step
from gkdv_lab.extension import ExtensionStrategy
from gkdv_lab.linear import (
    BoundaryData,
    CompatibilityWarning,
    QuadratureError,
    QuadratureSpec,
    airy_field,
    airy_propagate,
    airy_trace,
    boundary_evolution,
    full_linear_solution,
    self_convergence_table,
    trace_at_origin,
    write_quadrature_report,
)
from gkdv_lab.spectral import GridFunction, SpaceTimeField, SpatialGrid, TimeGrid, plane_wave

GRID = SpatialGrid(16.0, 128)
BUMP = BoundaryData.from_function(lambda t: bump(t, 0.2, 0.8))


def test_plane_waves_small_grid():
    for k in (1, -5, 40):
        u = airy_propagate(plane_wave(GRID, k), 0.5)
        xi = GRID.xi[k]
        ref = np.exp(1j * (xi * GRID.x + xi ** 3 * 0.5))
        assert np.abs(u.values - ref).max() < 1e-10


def test_real_data_without_nyquist_mode_is_isometric(rng):
    c = np.fft.fft(rng.standard_normal(128))
    c[64] = 0.0
    f = GridFunction(GRID, np.fft.ifft(c).real)
    u = airy_propagate(f, 0.37)
    assert not np.iscomplexobj(u.values)
    assert norms.h_norm(u, 0.5) == pytest.approx(norms.h_norm(f, 0.5), rel=1e-12)


def test_identity_at_zero(rng):
    f = GridFunction(GRID, rng.standard_normal(128))
    assert np.allclose(airy_propagate(f, 0.0).values, f.values, atol=1e-14)


def complex_data(seed):
    rng = np.random.default_rng(seed)
    return GridFunction(GRID, rng.standard_normal(128) + 1j * rng.standard_normal(128))


@given(st.floats(-1, 1), st.floats(-1, 1), st.integers(0, 2 ** 32 - 1))
def test_group_law(t1, t2, seed):
    f = complex_data(seed)
    a = airy_propagate(airy_propagate(f, t1), t2).values
    b = airy_propagate(f, t1 + t2).values
    assert np.abs(a - b).max() < 1e-11 * np.abs(f.values).max()


@given(st.floats(-2, 2), st.floats(-1, 1), st.integers(0, 2 ** 32 - 1))
def test_isometry(s, t, seed):
    f = complex_data(seed)
    assert norms.h_norm(airy_propagate(f, t), s) == pytest.approx(norms.h_norm(f, s), rel=1e-12)


def test_airy_gaussian_against_quadrature(frozen):
    grid = SpatialGrid(512.0, 8192)
    f = GridFunction.from_function(grid, lambda x: np.exp(-x ** 2))
    u = airy_propagate(f, 1.0)
    ref = frozen["airy_gaussian_t1"]
    for x, v in zip(ref["x"], ref["values"]):
        j = int(np.flatnonzero(grid.x == x)[0])
        assert abs(u.values[j].real - v) < 1e-10


def test_trace_at_origin(frozen):
    time = TimeGrid(0.0, 2.0, 20)
    zero = SpaceTimeField(GRID, time, np.zeros((128, 20)))
    assert not trace_at_origin(zero).any()
    const = SpaceTimeField(GRID, time, np.full((128, 20), 3.0))
    assert np.allclose(trace_at_origin(const), 3.0 * eta(time.t))
    grid = SpatialGrid(512.0, 8192)
    f = GridFunction.from_function(grid, lambda x: np.exp(-x ** 2))
    ref = frozen["airy_gaussian_trace"]
    tr = trace_at_origin(airy_field(f, TimeGrid(0.0, 1.2, 12)), CutoffProfile())
    for t, v in zip(ref["t"], ref["values"]):
        m = int(round(t / 0.1))
        assert abs(tr[m] - eta(t) * v) < 1e-10


def test_airy_field_matches_propagate(rng):
    f = GridFunction(GRID, rng.standard_normal(128))
    time = TimeGrid(-0.5, 0.5, 10)
    u = airy_field(f, time)
    for m, t in enumerate(time.t):
        assert np.allclose(u.values[:, m], airy_propagate(f, t).values.real, atol=1e-12)


def test_zero_boundary_data():
    u = boundary_evolution(BoundaryData.zero(), GRID, TimeGrid(0.0, 1.0, 10))
    assert not u.values.any()


def test_boundary_data_basics():
    t = np.linspace(-1, 3, 41)
    g = BoundaryData.from_function(lambda s: np.cos(s))
    vals = g(t)
    assert not vals[t < 0].any() and not vals[t > 2].any()
    assert g.jet[0] == pytest.approx(1.0, abs=1e-9) and g.jet[2] == pytest.approx(-1.0, abs=1e-5)
    both = (g * 2.0 - g)(t)
    assert np.allclose(both, vals)


def test_piecewise_transform_matches_quadrature():
    t = np.linspace(0.0, 1.5, 61)
    g = BoundaryData.from_samples(t, np.sin(3 * t) * (1.5 - t) ** 3)
    z = np.array([0.5, 30.0, 250.0, 900.0, 5000.0])
    exact = g.transform(z)
    # composite Gauss-Legendre on the knots of the spline
    x, w = np.polynomial.legendre.leggauss(40)
    acc = np.zeros(z.size, complex)
    edges = np.linspace(0.0, 1.5, 60 * 16 + 1)
    for a, b in zip(edges[:-1], edges[1:]):
        s = 0.5 * (b - a) * x + 0.5 * (a + b)
        acc += 0.5 * (b - a) * (np.exp(-1j * np.outer(z, s)) @ (w * g(s)))
    assert np.abs(exact - acc).max() < 1e-10


@pytest.mark.parametrize("t_top", [0.6, 1.0])
def test_bump_trace_recovery(t_top):
    time = TimeGrid(0.0, t_top, 30)
    u = boundary_evolution(BUMP, SpatialGrid(8.0, 64), time)
    assert np.abs(u.origin_trace() - bump(time.t, 0.2, 0.8)).max() < 1e-7


def test_substitution_and_mu_routes_agree():
    grid, time = SpatialGrid(8.0, 64), TimeGrid(0.0, 1.0, 20)
    a = boundary_evolution(BUMP, grid, time)
    Z = a.meta["quadrature"]["z_max"]
    b = boundary_evolution(BUMP, grid, time, QuadratureSpec(substitution=False, z_max=Z))
    assert np.abs(a.values - b.values).max() < 1e-8


def test_boundary_linearity():
    grid, time = SpatialGrid(8.0, 64), TimeGrid(0.0, 1.0, 16)
    g2 = BoundaryData.from_function(lambda t: bump(t, 0.1, 0.6) * np.cos(9 * t))
    q = QuadratureSpec(z_max=4000.0)
    lhs = boundary_evolution(BUMP * 2.0 + g2 * -0.5, grid, time, q).values
    rhs = 2.0 * boundary_evolution(BUMP, grid, time, q).values - 0.5 * boundary_evolution(g2, grid, time, q).values
    assert np.abs(lhs - rhs).max() < 1e-10


def test_rho_realisation_only_matters_for_negative_x(monkeypatch):
    grid, time = SpatialGrid(8.0, 64), TimeGrid(0.0, 1.0, 12)
    a = boundary_evolution(BUMP, grid, time).values
    # another admissible rho: 1 on [-1/2, inf), 0 on (-inf, -1]
    monkeypatch.setattr(linear, "rho", lambda y: smooth_step(2.0 * (np.asarray(y) + 1.0)))
    b = boundary_evolution(BUMP, grid, time).values
    o = grid.origin_index
    assert np.array_equal(a[o:], b[o:])
    assert np.abs(a[:o] - b[:o]).max() > 1e-6


def test_decay_in_x():
    grid, time = SpatialGrid(16.0, 128), TimeGrid(0.0, 1.0, 40)
    u = boundary_evolution(BUMP, grid, time)
    o = grid.origin_index
    env = np.abs(u.values[o:o + 64]).max(axis=1)
    logs = np.log10(env + 1e-300)
    # envelope over t is nonincreasing in x up to a tenth of a decade
    assert np.all(np.diff(logs) < 0.1)
    assert env[-1] < 1e-3 * env[0]


def test_quadrature_self_convergence_and_error(tmp_path):
    grid, time = SpatialGrid(8.0, 64), TimeGrid(0.0, 1.0, 20)
    table = self_convergence_table(BUMP, grid, time, 8, 852.0, doublings=3)
    assert all(f >= 10 for f in table["factors"])
    with pytest.raises(QuadratureError) as err:
        boundary_evolution(BUMP, grid, time, QuadratureSpec(n_panels=2, tol=1e-14), check=True)
    assert err.value.achieved > 1e-14
    ok = boundary_evolution(BUMP, grid, time, QuadratureSpec(tol=1e-8), check=True)
    assert ok.meta["quadrature"]["self_convergence"] < 1e-8
    p = tmp_path / "q.json"
    write_quadrature_report(p, ok)
    assert json.load(open(p))["n_panels"] == ok.meta["quadrature"]["n_panels"]


def test_full_solution_with_matching_trace_is_free_flow():
    grid, time = SpatialGrid(16.0, 128), TimeGrid(0.0, 1.0, 20)
    u0e = GridFunction.from_function(grid, lambda x: np.exp(-(x - 3) ** 2))
    u = full_linear_solution(u0e, airy_trace(u0e), grid, time)
    assert np.abs(u.values - airy_field(u0e, time).values).max() < 1e-9


def test_full_solution_without_initial_data_is_boundary_flow():
    grid, time = SpatialGrid(8.0, 64), TimeGrid(0.0, 1.0, 12)
    u = full_linear_solution(np.zeros(32), BUMP, grid, time, ExtensionStrategy("even"))
    assert np.abs(u.values - boundary_evolution(BUMP, grid, time).values).max() < 1e-12


def test_compatibility_warning():
    grid, time = SpatialGrid(8.0, 64), TimeGrid(0.0, 0.5, 8)
    xh = grid.x[grid.origin_index:]
    g = BoundaryData.from_function(lambda t: 0.5 + 0 * t)
    with pytest.warns(CompatibilityWarning):
        full_linear_solution(np.exp(-xh ** 2), g, grid, time, ExtensionStrategy("even"), s=1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error", CompatibilityWarning)
        full_linear_solution(np.exp(-xh ** 2), g, grid, time, ExtensionStrategy("even"), s=0.0)

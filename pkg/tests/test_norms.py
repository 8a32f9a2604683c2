import csv
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gkdv_lab import norms
from gkdv_lab.cutoffs import eta
from gkdv_lab.extension import ExtensionStrategy
from gkdv_lab.spectral import GridFunction, SpaceTimeField, SpatialGrid, TimeGrid, apply_multiplier

GRID = SpatialGrid(16.0, 128)
TIME = TimeGrid.symmetric(3.0, 256)


def random_field(rng, grid=GRID, time=TIME):
    return SpaceTimeField(grid, time, rng.standard_normal((grid.n_points, time.n_t)))


def l2(f):
    return np.sqrt(f.grid.dx * np.sum(np.abs(f.values) ** 2))


def test_h_norm_basics(rng):
    f = GridFunction(GRID, rng.standard_normal(128))
    assert norms.h_norm(GridFunction(GRID, np.zeros(128)), 1.3) == 0.0
    assert abs(norms.h_norm(f, 0.0) - l2(f)) < 1e-12 * l2(f)


def test_h1_gaussian_against_quadrature(frozen):
    f = GridFunction.from_function(SpatialGrid(16.0, 256), lambda x: np.exp(-x ** 2))
    assert abs(norms.h_norm(f, 1.0) - frozen["h1_gaussian"]) < 1e-12


@given(st.floats(-2, 2), st.floats(0, 2), st.integers(0, 2 ** 32 - 1))
def test_h_norm_monotone_in_s(s, ds, seed):
    f = GridFunction(GRID, np.random.default_rng(seed).standard_normal(128))
    assert norms.h_norm(f, s) <= norms.h_norm(f, s + ds) * (1 + 1e-12)


@given(st.floats(-1, 2), st.floats(-3, 3), st.integers(0, 2 ** 32 - 1))
def test_norm_axioms(s, alpha, seed):
    rng = np.random.default_rng(seed)
    f = GridFunction(GRID, rng.standard_normal(128))
    g = GridFunction(GRID, rng.standard_normal(128))
    nf = norms.h_norm(f, s)
    assert nf >= 0
    assert abs(norms.h_norm(f * alpha, s) - abs(alpha) * nf) <= 1e-12 * (1 + nf)
    assert norms.h_norm(f + g, s) <= nf + norms.h_norm(g, s) + 1e-12


def test_homogeneous_norm(rng):
    zero_mode = GridFunction(GRID, np.full(128, 3.0))
    assert norms.homogeneous_h_norm(zero_mode, 0.7) == 0.0
    f = GridFunction(GRID, rng.standard_normal(128))
    assert abs(norms.homogeneous_h_norm(f, 0.0) - l2(f)) < 1e-12 * l2(f)
    # |xi|^{1/2} applied twice gives the H-dot^1 norm
    twice = apply_multiplier(apply_multiplier(f, lambda xi: np.sqrt(np.abs(xi))),
                             lambda xi: np.sqrt(np.abs(xi)))
    assert abs(norms.homogeneous_h_norm(f, 1.0) - l2(twice)) < 1e-10 * l2(twice)


def test_xsb_trivial_cases(rng):
    u = random_field(rng)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", norms.TimeDecayWarning)
        v = norms.xsb_norm(u, 0.0, 0.0)
        l2xt = np.sqrt(GRID.dx * TIME.dt * np.sum(u.values ** 2))
        assert abs(v - l2xt) < 1e-12 * l2xt
        assert norms.xsb_norm(u * 0.0, 1.0, 0.5) == 0.0


def test_xsb_warns_without_decay(rng):
    with pytest.warns(norms.TimeDecayWarning):
        norms.xsb_norm(random_field(rng), 0.0, 0.5)


def test_xsb_b0_is_fubini(rng):
    vals = rng.standard_normal((128, 256)) * eta(TIME.t)[None, :]
    u = SpaceTimeField(GRID, TIME, vals)
    per_t = [norms.h_norm(GridFunction(GRID, vals[:, m]), 0.8) for m in range(256)]
    fubini = np.sqrt(TIME.dt * np.sum(np.square(per_t)))
    assert abs(norms.xsb_norm(u, 0.8, 0.0) - fubini) < 1e-12 * fubini


def test_xsb_single_mode_against_quadrature(frozen):
    k = 3
    xi = GRID.xi[k]
    assert abs(xi - frozen["eta_norms"]["xi_k3"]) < 1e-15
    # the periodic tau sum converges to the integral as the window grows;
    # on [-12, 12) the wrap-around of the <tau>^b weight is below 1e-12
    time = TimeGrid.symmetric(12.0, 2048)
    vals = eta(time.t)[None, :] * np.exp(1j * (xi * GRID.x[:, None] + xi ** 3 * time.t[None, :]))
    u = SpaceTimeField(GRID, time, vals)
    for s, b, key in ((0.0, 0.0, "b0"), (0.7, 0.55, "b055")):
        ref = (1 + xi * xi) ** (s / 2) * np.sqrt(2 * GRID.L * frozen["eta_norms"][key])
        assert abs(norms.xsb_norm(u, s, b) - ref) < 1e-9 * ref


@given(st.floats(0, 1), st.floats(0, 0.4), st.integers(0, 2 ** 32 - 1))
def test_xsb_monotone_in_b(b, db, seed):
    rng = np.random.default_rng(seed)
    u = SpaceTimeField(GRID, TIME, rng.standard_normal((128, 256)) * eta(TIME.t)[None, :])
    assert norms.xsb_norm(u, 0.0, b) <= norms.xsb_norm(u, 0.0, b + db) * (1 + 1e-12)


def test_mixed_LinfH(rng):
    u = random_field(rng)
    assert norms.mixed_norm_LinfH(u * 0.0, 0.5) == 0.0
    col = norms.time_h_norm(u.values[7], TIME.dt, 0.4)
    assert norms.mixed_norm_LinfH(u, 0.4, columns=[7]) == pytest.approx(col, rel=1e-14)
    slices = [norms.time_h_norm(u.values[j], TIME.dt, 0.4) for j in range(128)]
    assert norms.mixed_norm_LinfH(u, 0.4) == pytest.approx(max(slices), rel=1e-14)


def test_time_h_norm_single_column_oracle():
    # direct Riemann sum of the defining integral for one column
    t = TIME.t
    series = eta(t) * np.cos(5 * t)
    tau = 2 * np.pi * np.fft.fftfreq(t.size, TIME.dt)
    hat = np.array([TIME.dt * np.sum(series * np.exp(-1j * w * t)) for w in tau])
    ref = np.sqrt(np.sum((1 + tau ** 2) ** 0.3 * np.abs(hat) ** 2) / (t.size * TIME.dt))
    assert norms.time_h_norm(series, TIME.dt, 0.3) == pytest.approx(ref, rel=1e-12)


def test_mixed_LpLq(rng):
    u = random_field(rng)
    assert norms.mixed_norm_LpLq(u * 0.0, 3, 4) == 0.0
    l2xt = np.sqrt(GRID.dx * TIME.dt * np.sum(u.values ** 2))
    assert norms.mixed_norm_LpLq(u, 2, 2) == pytest.approx(l2xt, rel=1e-13)
    bump = SpaceTimeField(GRID, TIME, np.exp(-GRID.x[:, None] ** 2 - TIME.t[None, :] ** 2))
    inner = (GRID.dx * np.sum(bump.values ** 6, axis=0)) ** (1 / 6)
    ref = (TIME.dt * np.sum(inner ** 8)) ** (1 / 8)
    assert norms.mixed_norm_LpLq(bump, 8, 6) == pytest.approx(ref, rel=1e-13)
    assert norms.mixed_norm_LpLq(bump, np.inf, np.inf) == pytest.approx(1.0)


def test_halfline_norms():
    grid = SpatialGrid(16.0, 256)
    xh = grid.x[grid.origin_index:]
    f = np.exp(-((xh - 4) ** 2))
    zero = ExtensionStrategy("zero")
    assert norms.halfline_norm(f, grid, 0.0, [zero]) == pytest.approx(norms.halfline_l2(f, grid.dx),
                                                                      rel=1e-13)
    assert norms.halfline_norm(np.zeros_like(f), grid, 1.0) == 0.0
    best, all_ = norms.halfline_norm(np.exp(-xh) * (1 + xh), grid, 1.0, return_all=True)
    assert best == min(all_.values())
    assert all(np.isfinite(v) for v in all_.values())
    assert max(all_.values()) / best < 50
    with pytest.raises(ValueError):
        norms.halfline_norm(f, grid, -0.6)


def test_norm_report(tmp_path, rng):
    u = SpaceTimeField(GRID, TIME, rng.standard_normal((128, 256)) * eta(TIME.t)[None, :])
    rows = [norms.norm_row("xsb", norms.xsb_norm(u, 0, 0.5), u, 0, 0.5)]
    p = tmp_path / "n.csv"
    norms.write_norm_report(p, rows)
    got = list(csv.DictReader(open(p)))
    assert got[0]["norm"] == "xsb" and float(got[0]["value"]) == rows[0]["value"]

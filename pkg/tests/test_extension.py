import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gkdv_lab import norms
from gkdv_lab.extension import (
    ExtensionStrategy,
    ExtensionWarning,
    InapplicableStrategy,
    extend,
    extension_report,
    hestenes_coefficients,
    restrict_to_halfline,
)
from gkdv_lab.spectral import GridFunction, SpatialGrid

GRID = SpatialGrid(16.0, 256)
XH = GRID.x[GRID.origin_index:]
STRATEGIES = [ExtensionStrategy("zero"), ExtensionStrategy("even"), ExtensionStrategy("hestenes", 3),
              ExtensionStrategy("hestenes", 1)]


@given(st.integers(0, 3), st.integers(0, 2 ** 32 - 1))
def test_exact_on_halfline(i, seed):
    u0 = np.random.default_rng(seed).standard_normal(XH.size)
    ext = extend(u0, GRID, 0.0, STRATEGIES[i])
    assert np.array_equal(ext.values[GRID.origin_index:], u0)
    assert np.array_equal(restrict_to_halfline(ext), u0)


def test_zero_extension_pads():
    u0 = np.where((XH > 1) & (XH < 6), np.sin(XH) ** 2, 0.0)
    ext = extend(u0, GRID, 0.0, ExtensionStrategy("zero"))
    assert not ext.values[:GRID.origin_index].any()
    assert not extend(np.zeros(XH.size), GRID, 1.0, ExtensionStrategy("even")).values.any()


def test_restrict_is_index_slice(rng):
    f = GridFunction(GRID, rng.standard_normal(256))
    assert np.array_equal(restrict_to_halfline(f), f.values[128:])
    assert not restrict_to_halfline(GridFunction(GRID, np.zeros(256))).any()


def test_even_reflection_h1_against_closed_form(frozen):
    grid = SpatialGrid(64.0, 8192)
    xh = grid.x[grid.origin_index:]
    ext = extend(xh * np.exp(-xh), grid, 1.0, ExtensionStrategy("even"))
    assert abs(ext.values[grid.origin_index - 1] - ext.values[grid.origin_index + 1]) < 1e-15
    # the kink at 0 limits spectral accuracy to O(dx)
    assert abs(norms.h_norm(ext, 1.0) - frozen["h1_abs_x_exp"]) < 2 * grid.dx


def test_hestenes_coefficients_match_derivatives():
    for m in (1, 2, 3):
        c = hestenes_coefficients(m)
        j = np.arange(1, m + 2)
        for k in range(m + 1):
            assert abs(np.sum(c * (-j) ** k) - 1.0) < 1e-10
    assert np.allclose(hestenes_coefficients(3), [10, -20, 15, -4])


def test_hestenes_reproduces_one_sided_derivatives():
    grid = SpatialGrid(16.0, 2048)
    o = grid.origin_index
    xh = grid.x[o:]
    u0 = np.exp(-xh) * np.cos(xh)
    ext = extend(u0, grid, 2.0, ExtensionStrategy("hestenes", 3)).values
    h = grid.dx
    # left and right one-sided differences at 0 agree to O(h)
    d1l = (ext[o] - ext[o - 1]) / h
    d1r = (ext[o + 1] - ext[o]) / h
    d2l = (ext[o] - 2 * ext[o - 1] + ext[o - 2]) / h ** 2
    d2r = (ext[o + 2] - 2 * ext[o + 1] + ext[o]) / h ** 2
    assert abs(d1l - d1r) < 10 * h
    assert abs(d2l - d2r) < 100 * h


def test_inapplicable_strategies():
    u0 = np.exp(-XH)
    with pytest.raises(InapplicableStrategy):
        extend(u0, GRID, 1.0, ExtensionStrategy("zero"))
    with pytest.raises(InapplicableStrategy):
        extend(u0, GRID, 2.0, ExtensionStrategy("even"))
    with pytest.raises(ValueError):
        extend(u0, GRID, -0.5, ExtensionStrategy("even"))
    with pytest.raises(ValueError):
        ExtensionStrategy("odd")


def test_report_flags_inflation():
    u0 = np.exp(-XH) * np.cos(3 * XH)
    rep = extension_report(u0, GRID, 0.0, ExtensionStrategy("even"))
    assert rep["status"] == "ok" and np.isfinite(rep["ratio"])
    with pytest.warns(ExtensionWarning):
        rep = extension_report(u0, GRID, 0.0, ExtensionStrategy("hestenes", 3), ratio_bound=1.01)
    assert rep["status"] == "warning"


def test_parse_labels():
    assert ExtensionStrategy.parse("hestenes5").m == 5
    assert ExtensionStrategy.parse("even").label == "even"

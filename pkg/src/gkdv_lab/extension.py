"""Whole-line extensions of half-line samples.

Half-line data are the samples at the grid points ``x_j >= 0``, i.e. the
slice ``[origin_index:]`` of a :class:`SpatialGrid`.  Every extension copies
them unchanged and fills ``x < 0`` with a reflection that is then multiplied
by a smooth cutoff (1 on ``[-L/4, 0]``, 0 left of ``-L/2``) so the result
stays periodic.

The Hestenes reflection of order ``m`` uses

    u_e(-x) = sum_{j=1}^{m+1} c_j u(j x),   sum_j c_j (-j)^k = 1, k = 0..m,

which matches one-sided derivatives up to order ``m`` at the origin.  The
dilations ``j`` are integers so ``j x`` is again a grid point; samples that
fall beyond ``x = L`` are taken as zero (data are required to live well
inside the domain anyway).
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .cutoffs import smooth_step
from .spectral import GridFunction

KINDS = ("zero", "even", "hestenes")


class InapplicableStrategy(ValueError):
    pass


class ExtensionWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ExtensionStrategy:
    kind: str = "zero"
    m: int = 3

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown extension kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "hestenes" and self.m < 1:
            raise ValueError("Hestenes order must be >= 1")

    @property
    def label(self):
        return f"hestenes{self.m}" if self.kind == "hestenes" else self.kind

    @classmethod
    def parse(cls, text):
        """``"zero"``, ``"even"`` or ``"hestenes<m>"``."""
        if text.startswith("hestenes"):
            tail = text[len("hestenes"):]
            return cls("hestenes", int(tail) if tail else 3)
        return cls(text)


def hestenes_coefficients(m):
    j = np.arange(1, m + 2, dtype=float)
    V = (-j[None, :]) ** np.arange(m + 1)[:, None]
    return np.linalg.solve(V, np.ones(m + 1))


def left_cutoff(grid):
    x = grid.x
    L = grid.half_width
    # 0 for x <= -L/2, 1 for x >= -L/4
    return smooth_step((x + L / 2) / (L / 4))


def _check_samples(samples, grid):
    samples = np.asarray(samples)
    expected = grid.n_points - grid.origin_index
    if samples.shape != (expected,):
        raise ValueError(f"expected {expected} half-line samples, got shape {samples.shape}")
    return samples


def _applicable(samples, grid, s, strategy, tol=1e-8):
    scale = max(np.abs(samples).max(), 1e-300)
    if strategy.kind == "zero" and s >= 0.5 and abs(samples[0]) > tol * scale:
        raise InapplicableStrategy(
            f"zero extension has a jump at 0 (u(0)={samples[0]!r}); not in H^s for s={s}"
        )
    if strategy.kind == "even" and s >= 1.5:
        slope = (samples[1] - samples[0]) / grid.dx
        if abs(slope) > tol * scale / grid.dx:
            raise InapplicableStrategy(f"even reflection has a kink at 0; not in H^s for s={s}")
    if strategy.kind == "hestenes" and s > strategy.m + 1.5:
        raise InapplicableStrategy(f"Hestenes order {strategy.m} only reaches s < {strategy.m + 1.5}")


def extend(samples, grid, s=0.0, strategy=ExtensionStrategy()):
    """Extend half-line samples to a :class:`GridFunction` on ``[-L, L)``."""
    if s <= -0.5:
        raise ValueError("extension needs s > -1/2")
    samples = _check_samples(samples, grid)
    _applicable(samples, grid, s, strategy)
    n = grid.n_points
    o = grid.origin_index
    half = n - o
    dtype = np.result_type(samples.dtype, float)
    out = np.zeros(n, dtype=dtype)
    out[o:] = samples
    if strategy.kind == "zero":
        return GridFunction(grid, out)
    i = np.arange(1, o + 1)  # x = -i dx  ->  index o - i
    if strategy.kind == "even":
        refl = np.where(i < half, samples[np.minimum(i, half - 1)], 0.0)
    else:
        refl = np.zeros(i.size, dtype=dtype)
        for j, c in zip(range(1, strategy.m + 2), hestenes_coefficients(strategy.m)):
            idx = j * i
            refl = refl + c * np.where(idx < half, samples[np.minimum(idx, half - 1)], 0.0)
    left = np.zeros(o, dtype=dtype)
    left[o - i] = refl
    out[:o] = left * left_cutoff(grid)[:o]
    return GridFunction(grid, out)


def restrict_to_halfline(f):
    return np.array(f.values[f.grid.origin_index:])


def extension_report(samples, grid, s, strategy, ratio_bound=50.0):
    """Norm-inflation ratio of one strategy against the best available one."""
    from .norms import h_norm, halfline_norm

    ext = extend(samples, grid, s, strategy)
    value = h_norm(ext, s)
    best = halfline_norm(samples, grid, s)
    ratio = value / best if best > 0 else (0.0 if value == 0 else np.inf)
    status = "ok" if np.isfinite(ratio) and ratio <= ratio_bound else "warning"
    if status == "warning":
        warnings.warn(
            f"{strategy.label} extension inflates the H^{s} norm by {ratio:.3g}", ExtensionWarning,
            stacklevel=2,
        )
    return {"strategy": strategy.label, "s": s, "norm": value, "halfline_norm": best,
            "ratio": ratio, "status": status}

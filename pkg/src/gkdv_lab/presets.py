"""Built-in data presets.

A preset is a kind plus a flat dict of parameters; it serialises to JSON
and builds ``(u0, g)`` on a given spatial grid.  ``u0`` is either a
whole-line :class:`GridFunction` or, for ``halfline`` presets, samples on
``x >= 0`` that the solver extends with its configured strategy.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from . import soliton
from .cutoffs import bump
from .linear import BoundaryData, airy_trace
from .spectral import GridFunction, japanese

KINDS = ("zero", "gaussian", "bump-boundary", "soliton", "rough-random")

_DEFAULTS = {
    "zero": {},
    "gaussian": {"amplitude": 1.0, "center": 4.0, "width": 1.0, "boundary": "zero",
                 "boundary_amplitude": 0.0, "halfline": False},
    "bump-boundary": {"amplitude": 1.0, "start": 0.2, "stop": 0.8},
    "soliton": {"c": 1.0, "x0": 8.0},
    "rough-random": {"s": 0.0, "amplitude": 0.1, "seed": 0, "excess": 0.05, "band": 1.0},
}


@dataclass(frozen=True)
class Preset:
    kind: str
    params: dict = field(default_factory=dict)
    description: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown preset kind {self.kind!r}; expected one of {KINDS}")
        unknown = set(self.params) - set(_DEFAULTS[self.kind])
        if unknown:
            raise ValueError(f"unknown parameters for {self.kind}: {sorted(unknown)}")

    @property
    def resolved(self):
        return {**_DEFAULTS[self.kind], **self.params}

    def to_dict(self):
        return {"kind": self.kind, "params": dict(self.params), "description": self.description}

    @classmethod
    def from_dict(cls, d):
        return cls(d["kind"], dict(d.get("params", {})), d.get("description", ""))

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def build(self, grid):
        return _BUILDERS[self.kind](grid, **self.resolved)


def _zero(grid):
    return GridFunction(grid, np.zeros(grid.n_points)), BoundaryData.zero()


def _gaussian(grid, amplitude, center, width, boundary, boundary_amplitude, halfline):
    x = grid.x
    vals = amplitude * np.exp(-(((x - center) / width) ** 2))
    if boundary == "zero":
        g = BoundaryData.zero()
    elif boundary == "bump":
        # boundary pulse away from the corner, so any u0 is compatible with it
        g = BoundaryData.from_function(lambda t: boundary_amplitude * bump(t, 0.1, 0.9))
    elif boundary == "trace":
        g = airy_trace(GridFunction(grid, vals))
    else:
        raise ValueError(f"boundary must be 'zero', 'bump' or 'trace', not {boundary!r}")
    if halfline:
        return vals[grid.origin_index:], g
    return GridFunction(grid, vals), g


def _bump_boundary(grid, amplitude, start, stop):
    g = BoundaryData.from_function(lambda t: amplitude * bump(t, start, stop))
    return GridFunction(grid, np.zeros(grid.n_points)), g


def _soliton(grid, c, x0):
    soliton.certify(c)
    return soliton.data(c, x0, grid)


def rough_field(grid, s, amplitude, seed, excess=0.05, band=1.0):
    """Random phases, ``|u_hat| ~ <xi>^-(s + 1/2 + excess)``, zero mean, ``L^2`` norm ``amplitude``.

    The mean is removed because on the torus the zero mode makes part of the
    quartic interaction exactly resonant, which has no whole-line analogue.
    """
    rng = np.random.default_rng(seed)
    n = grid.n_points
    k = np.arange(n)
    ph = np.exp(2j * np.pi * rng.random(n))
    ph = np.where(k <= n // 2, ph, np.conj(ph[(-k) % n]))
    ph[0] = 0.0
    ph[n // 2] = 0.0
    xi = grid.xi
    c = ph * japanese(xi) ** (-(s + 0.5 + excess)) * (np.abs(xi) <= band * grid.xi_max)
    f = np.fft.ifft(c).real
    f *= amplitude / np.sqrt(grid.dx * np.sum(f * f))
    return GridFunction(grid, f)


def _rough(grid, s, amplitude, seed, excess, band):
    u0e = rough_field(grid, s, amplitude, seed, excess, band)
    return u0e, airy_trace(u0e)


_BUILDERS = {
    "zero": _zero,
    "gaussian": _gaussian,
    "bump-boundary": _bump_boundary,
    "soliton": _soliton,
    "rough-random": _rough,
}


def preset_catalog():
    """Named presets offered by the CLI.

    The soliton entry is only listed once its profile passes the
    travelling-wave residual check.
    """
    cat = {
        "zero": Preset("zero", {}, "u0 = 0, g = 0"),
        "gaussian": Preset("gaussian", {"amplitude": 0.5, "center": 4.0, "width": 1.0},
                           "Gaussian pulse, homogeneous boundary"),
        "bump-boundary": Preset("bump-boundary", {}, "u0 = 0, smooth boundary pulse on [0.2, 0.8]"),
        "small-amplitude": Preset("gaussian", {"amplitude": 1e-2, "center": 4.0, "width": 1.0,
                                               "boundary": "bump", "boundary_amplitude": 1e-2},
                                  "weak Gaussian plus weak boundary pulse"),
        "mass": Preset("gaussian", {"amplitude": 1.0, "center": 3.5, "width": 0.8},
                       "Gaussian with g = 0 for the mass identity"),
        "extension": Preset("gaussian", {"amplitude": 0.5, "center": 5.0, "width": 0.8,
                                         "halfline": True},
                            "half-line samples extended by the solver"),
        "rough-random": Preset("rough-random", {"s": 0.0},
                               "random phases at Sobolev index s, compatible trace"),
    }
    try:
        soliton.certify(_DEFAULTS["soliton"]["c"])
    except ArithmeticError:
        pass
    else:
        cat["soliton"] = Preset("soliton", {}, "travelling wave Q_c(x - x0 - ct) with exact trace")
    return cat


def resolve(spec):
    """A preset from a catalog name, a ``{"preset": name, "params": {...}}`` dict or a full dict."""
    if isinstance(spec, Preset):
        return spec
    cat = preset_catalog()
    if isinstance(spec, str):
        if spec not in cat:
            raise ValueError(f"unknown preset {spec!r}; available: {sorted(cat)}")
        return cat[spec]
    if "preset" in spec:
        base = resolve(spec["preset"])
        return Preset(base.kind, {**base.params, **spec.get("params", {})}, base.description)
    return Preset.from_dict(spec)

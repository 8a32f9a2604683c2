"""Ratio tests for the a-priori estimates.

Each ``check_*`` evaluates ``LHS / RHS`` of one estimate on every member of
an ensemble and returns a :class:`RatioReport`.  The implicit constants are
unknown, so boundedness is judged empirically: ratios must be finite,
stable when the ensemble is doubled, and inside a band around pinned values
(``data/pins.json``).

Estimate ids:

=====================  ====================================================
``linear_xsb``          ``||eta W_R u0||_{X^{s,b}} / ||u0||_{H^s}``
``kato``                ``||eta W_R u0||_{L^inf_x H^{(s+1)/3}_t} / ||u0||_{H^s}``
``boundary_xsb``        ``||eta W_0(0,g)||_{X^{s,b}} / ||chi g||_{H^{(2s+6b-1)/6}}``
``boundary_sobolev_x``  ``sup_t ||W_0(0,g)||_{H^s_x} / ||chi g||_{H^{(s+1)/3}}``
``boundary_sobolev_t``  ``sup_x ||eta W_0(0,g)||_{H^{(s+1)/3}_t} / ||chi g||_{H^{(s+1)/3}}``
``nonlinear_smoothing`` ``||d_x(u1 u2 u3 u4)||_{X^{s+a,-b'}} / prod ||u_j||_{X^{s,b}}``
``duhamel_sobolev``     ``||eta D(N)||_{L^inf_x H^{(s+1)/3}_t} / (||N||_{X^{s,-b'}} [+ corr])``
``correction_term``     ``||int_R <tau-xi^3>^{(s+a-2)/3} |N_hat| dxi||_{L^2_tau} / prod ||u_j||``
=====================  ====================================================

``R`` is realised as ``|tau| >= max(1, R_FACTOR |xi|^3)``.
"""

import csv
import json
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache
from importlib import resources

import numpy as np

from . import norms
from .cutoffs import bump, chi, eta
from .linear import BoundaryData, QuadratureSpec, airy_field, boundary_evolution
from .spectral import (
    GridFunction,
    SpaceTimeField,
    SpatialGrid,
    TimeGrid,
    forward_transform,
    japanese,
    padded_product,
)

R_FACTOR = 8.0
PIN_BAND = 0.5
# ratios need a few digits, not 1e-12: truncating the z integral at 1e-8 is ~70x cheaper
LAB_QUAD = QuadratureSpec(cutoff_tol=1e-8)


@dataclass(frozen=True)
class LabGrid:
    """Space-time grid shared by all ratio tests.

    The time window must hold the support ``[-2, 2]`` of ``eta`` and resolve
    ``tau`` up to ``xi_max^3``.
    """

    half_width: float = 16.0
    n_points: int = 64
    window: float = 4.0
    n_t: int = 1024

    @property
    def grid(self):
        return SpatialGrid(self.half_width, self.n_points)

    @property
    def time(self):
        return TimeGrid.symmetric(self.window, self.n_t)

    def check(self):
        if self.window < 2.0:
            raise ValueError("time window must contain the support of eta")
        tau_max = np.pi / self.time.dt
        if tau_max < 1.5 * self.grid.xi_max ** 3:
            raise ValueError(f"time grid resolves |tau| <= {tau_max:.0f}, "
                             f"below 1.5 xi_max^3 = {1.5 * self.grid.xi_max ** 3:.0f}")
        return self


@dataclass(frozen=True)
class EnsembleSpec:
    """Random members with spectrum ``<xi>^-sigma`` and independent uniform phases.

    ``band`` keeps ``|xi| <= band * xi_max``; ``modulation`` spreads each
    space-time member off the curve ``tau = xi^3`` by a random shift of that
    standard deviation.  Member ``i`` draws from ``default_rng([seed, i])`` so
    any prefix of a larger ensemble is reproduced exactly.
    """

    count: int = 8
    seed: int = 0
    sigma: float = 0.6
    band: float = 1.0
    modulation: float = 0.0
    g_frequencies: int = 12

    def rng(self, i):
        return np.random.default_rng([self.seed, i])

    def doubled(self):
        return EnsembleSpec(2 * self.count, self.seed, self.sigma, self.band, self.modulation,
                            self.g_frequencies)


@dataclass
class RatioReport:
    estimate: str
    params: dict
    ratios: list
    lhs: list = field(default_factory=list)
    rhs: list = field(default_factory=list)
    skipped: int = 0

    @property
    def max_ratio(self):
        return float(max(self.ratios)) if self.ratios else 0.0

    @property
    def constant(self):
        """Least-squares ``C`` in ``LHS ~ C RHS`` over the ensemble."""
        r = np.asarray(self.rhs)
        l = np.asarray(self.lhs)
        den = float(np.sum(r * r))
        return float(np.sum(l * r) / den) if den > 0 else 0.0

    def to_dict(self):
        return {"estimate": self.estimate, "params": self.params, "ratios": list(self.ratios),
                "lhs": list(self.lhs), "rhs": list(self.rhs), "skipped": self.skipped,
                "max_ratio": self.max_ratio, "constant": self.constant}


# ---------------------------------------------------------------- ensembles


def _phases(rng, n):
    ph = np.exp(2j * np.pi * rng.random(n))
    k = np.arange(n)
    # Hermitian so the member is real
    ph = np.where(k <= n // 2, ph, np.conj(ph[(-k) % n]))
    ph[0] = 1.0
    ph[n // 2] = 0.0
    return ph


def spatial_member(spec, grid, i):
    """Real ``u0`` with ``|u0_hat| ~ <xi>^-sigma`` on the band, unit ``L^2`` norm."""
    rng = spec.rng(i)
    xi = grid.xi
    c = _phases(rng, grid.n_points) * japanese(xi) ** (-spec.sigma)
    c = c * (np.abs(xi) <= spec.band * grid.xi_max)
    f = np.fft.ifft(c).real
    nrm = np.sqrt(grid.dx * np.sum(f * f))
    return GridFunction(grid, f / nrm if nrm > 0 else f)


def spacetime_member(spec, lab, i):
    """``eta(t) sum_xi c_xi e^{i xi x} e^{i (xi^3 + lambda_xi) t}`` (real part)."""
    grid, time = lab.grid, lab.time
    rng = spec.rng(i)
    u0 = spatial_member(spec, grid, i)
    c = np.fft.fft(u0.values)
    lam = spec.modulation * rng.standard_normal(grid.n_points)
    lam = 0.5 * (lam - lam[(-np.arange(grid.n_points)) % grid.n_points])  # odd, keeps it real
    phase = np.exp(1j * np.outer(grid.xi ** 3 + lam, time.t))
    vals = np.fft.ifft(c[:, None] * phase, axis=0).real * eta(time.t)[None, :]
    return SpaceTimeField(grid, time, vals)


def boundary_member(spec, i, support=(0.1, 1.9), top=40.0):
    """``g(t) = bump(t) sum_k <w_k>^-sigma cos(w_k t + phi_k)``, ``w_k`` in ``(0, top]``.

    The bump vanishes to all orders at ``t = 0`` so ``g`` has a zero jet.
    """
    rng = spec.rng(i)
    K = spec.g_frequencies
    w = top * (np.arange(1, K + 1) / K)
    amp = japanese(w) ** (-spec.sigma)
    ph = 2 * np.pi * rng.random(K)
    a, b = support

    def g(t):
        t = np.asarray(t, dtype=float)
        return bump(t, a, b) * (np.cos(np.multiply.outer(t, w) + ph) @ amp)

    return BoundaryData(g, (0.0,) * 5, float(b), ())


def _map(fn, items, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _report(name, params, pairs):
    rep = RatioReport(name, params, [])
    for lhs, rhs in pairs:
        if rhs == 0 and lhs == 0:
            rep.skipped += 1
            continue
        rep.lhs.append(float(lhs))
        rep.rhs.append(float(rhs))
        rep.ratios.append(float(lhs / rhs) if rhs > 0 else float("inf"))
    return rep


def _quiet_xsb(u, s, b):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", norms.TimeDecayWarning)
        return norms.xsb_norm(u, s, b)


# ------------------------------------------------------------------ linear


def linear_pair(u0, lab, s, b):
    field = airy_field(u0, lab.time)
    field = field.with_values(field.values * eta(lab.time.t)[None, :])
    return _quiet_xsb(field, s, b), norms.h_norm(u0, s)


def check_linear_xsb(members, s, b, lab=LabGrid(), threads=1):
    pairs = _map(lambda u0: linear_pair(u0, lab, s, b), members, threads)
    return _report("linear_xsb", {"s": s, "b": b}, pairs)


def kato_pair(u0, lab, s):
    field = airy_field(u0, lab.time)
    field = field.with_values(field.values * eta(lab.time.t)[None, :])
    return norms.mixed_norm_LinfH(field, (s + 1.0) / 3.0), norms.h_norm(u0, s)


def check_kato(members, s, lab=LabGrid(), threads=1):
    pairs = _map(lambda u0: kato_pair(u0, lab, s), members, threads)
    return _report("kato", {"s": s}, pairs)


# ---------------------------------------------------------------- boundary


def _chi_g_norm(g, index, n=4096, span=8.0):
    # chi g sampled on a periodic window much longer than its support
    t = np.linspace(-span / 2, span / 2, n, endpoint=False)
    return float(norms.time_h_norm(chi(t) * g(t), t[1] - t[0], index))


def boundary_field(g, lab, quad=LAB_QUAD):
    return boundary_evolution(g, lab.grid, lab.time, quad)


@lru_cache(maxsize=64)
def _member_field(spec, i, lab, quad):
    return boundary_field(boundary_member(spec, i), lab, quad)


def boundary_members(spec):
    """Members ``0 .. count-1`` tagged so their fields are computed once per process.

    The x- and t-checks and a doubled ensemble all reuse the same fields.
    """
    key = replace(spec, count=0)
    return [_Tagged(boundary_member(spec, i), key, i) for i in range(spec.count)]


@dataclass(frozen=True, eq=False)
class _Tagged:
    g: BoundaryData
    key: EnsembleSpec
    index: int

    def __call__(self, t):
        return self.g(t)


def _field_of(g, lab, quad):
    if isinstance(g, _Tagged):
        return _member_field(g.key, g.index, lab, quad)
    return boundary_field(g, lab, quad)


def boundary_xsb_pair(g, lab, s, b, quad=LAB_QUAD):
    w = _field_of(g, lab, quad)
    w = w.with_values(w.values * eta(lab.time.t)[None, :])
    return _quiet_xsb(w, s, b), _chi_g_norm(g, (2 * s + 6 * b - 1) / 6.0)


def check_boundary_xsb(members, s, b, lab=LabGrid(), quad=LAB_QUAD, threads=1):
    if not 1.0 / 6.0 < b < 5.0 / 6.0:
        raise ValueError("boundary X^{s,b} estimate needs 1/6 < b < 5/6")
    if s < max(-1.0, 0.5 - 3 * b):
        raise ValueError("boundary X^{s,b} estimate needs s >= max(-1, 1/2 - 3b)")
    pairs = _map(lambda g: boundary_xsb_pair(g, lab, s, b, quad), members, threads)
    return _report("boundary_xsb", {"s": s, "b": b}, pairs)


def boundary_sobolev_pairs(g, lab, s, quad=LAB_QUAD, t_range=1.0):
    w = _field_of(g, lab, quad)
    rhs = _chi_g_norm(g, (s + 1.0) / 3.0)
    mask = np.abs(lab.time.t) <= t_range
    lhs_x = norms.sup_t_h_norm(w, s, mask)
    we = w.with_values(w.values * eta(lab.time.t)[None, :])
    lhs_t = norms.mixed_norm_LinfH(we, (s + 1.0) / 3.0)
    return (lhs_x, rhs), (lhs_t, rhs)


def check_boundary_sobolev(members, s, lab=LabGrid(), quad=LAB_QUAD, threads=1):
    """Two reports: ``sup_t`` of the ``H^s_x`` norm and ``sup_x`` of the ``H^{(s+1)/3}_t`` norm."""
    if s < -1:
        raise ValueError("needs s >= -1")
    both = _map(lambda g: boundary_sobolev_pairs(g, lab, s, quad), members, threads)
    return (_report("boundary_sobolev_x", {"s": s}, [p[0] for p in both]),
            _report("boundary_sobolev_t", {"s": s}, [p[1] for p in both]))


# --------------------------------------------------------------- nonlinear


def quartic_derivative(fields):
    """``d_x(u1 u2 u3 u4)`` with the product formed without aliasing in ``x`` and ``t``."""
    u = fields[0]
    spec, _ = padded_product([f.values for f in fields], axes=(0, 1))
    spec = spec * (1j * u.grid.xi)[:, None]
    spec[u.grid.n_points // 2] = 0.0
    vals = np.fft.ifft2(spec)
    if not any(np.iscomplexobj(f.values) for f in fields):
        vals = vals.real
    return u.with_values(vals)


def _check_nonlinear_params(s, b, bp):
    if not b > 0.5:
        raise ValueError("needs b > 1/2")
    if not 0 < bp < 0.5:
        raise ValueError("needs b' in (0, 1/2)")
    if s <= -1.0 / 6.0:
        raise ValueError("needs s > -1/6")


def admissible_a(s, bp):
    """Upper end of the admissible smoothing window ``a < (3 min(0,s) + 6b' - 5/2) / 2``."""
    return 0.5 * (3 * min(0.0, s) + 6 * bp - 2.5)


def nonlinear_pair(fields, s, b, bp, a):
    N = quartic_derivative(fields)
    lhs = _quiet_xsb(N, s + a, -bp)
    rhs = float(np.prod([_quiet_xsb(f, s, b) for f in fields]))
    return lhs, rhs


def _quadruple(spec, lab, i):
    # four independent members per sample; index blocks keep prefixes stable
    return [spacetime_member(spec, lab, 4 * i + j) for j in range(4)]


def check_nonlinear_smoothing(spec, s, b, bp, a, lab=LabGrid(), threads=1, samples=None):
    _check_nonlinear_params(s, b, bp)
    if samples is None:
        samples = [_quadruple(spec, lab, i) for i in range(spec.count)]
    pairs = _map(lambda q: nonlinear_pair(q, s, b, bp, a), samples, threads)
    return _report("nonlinear_smoothing",
                   {"s": s, "b": b, "b_prime": bp, "a": a, "a_max": admissible_a(s, bp)}, pairs)


def correction_integral(N, index):
    """``|| int chi_R <tau - xi^3>^index |N_hat| dxi ||_{L^2_tau}`` on the grid."""
    spec = np.abs(forward_transform(N))
    xi = N.grid.xi[:, None]
    tau = N.time.tau[None, :]
    R = np.abs(tau) >= np.maximum(1.0, R_FACTOR * np.abs(xi) ** 3)
    w = np.where(R, japanese(tau - xi ** 3) ** index, 0.0)
    inner = N.grid.dxi / (2 * np.pi) * np.sum(w * spec, axis=0)
    return float(np.sqrt(N.time.dtau / (2 * np.pi) * np.sum(inner ** 2)))


def correction_pair(fields, s, b, a):
    N = quartic_derivative(fields)
    lhs = correction_integral(N, (s + a - 2.0) / 3.0)
    rhs = float(np.prod([_quiet_xsb(f, s, b) for f in fields]))
    return lhs, rhs


def check_correction_term(spec, s, b, a, lab=LabGrid(), threads=1, samples=None):
    if not b > 0.5:
        raise ValueError("needs b > 1/2")
    if not 0 <= a < min(0.5, 2.0 - s):
        raise ValueError("needs 0 <= a < min(1/2, 2 - s)")
    if samples is None:
        samples = [_quadruple(spec, lab, i) for i in range(spec.count)]
    pairs = _map(lambda q: correction_pair(q, s, b, a), samples, threads)
    return _report("correction_term", {"s": s, "b": b, "a": a, "r_factor": R_FACTOR}, pairs)


def duhamel_pair(N, s, bp):
    from .duhamel import duhamel_integral

    D = duhamel_integral(N)
    D = D.with_values(D.values * eta(N.t)[None, :])
    lhs = norms.mixed_norm_LinfH(D, (s + 1.0) / 3.0)
    rhs = _quiet_xsb(N, s, -bp)
    if s > 2.0 - 3.0 * bp:
        rhs += correction_integral(N, (s - 2.0) / 3.0)
    return lhs, rhs


def check_duhamel_sobolev(members, s, bp, threads=1):
    if not 0 < bp < 0.5:
        raise ValueError("needs b' in (0, 1/2)")
    if s < -1:
        raise ValueError("needs s >= -1")
    pairs = _map(lambda N: duhamel_pair(N, s, bp), members, threads)
    return _report("duhamel_sobolev", {"s": s, "b_prime": bp, "corrected": s > 2.0 - 3.0 * bp},
                   pairs)


def smoothing_sweep(spec, s_values=(0.0, -0.05, -0.10, -0.15), b=0.55, bp=0.495, a=0.0,
                    lab=LabGrid(), threads=1):
    """Max ratio of the nonlinear estimate as ``s`` decreases towards ``-1/6``."""
    samples = [_quadruple(spec, lab, i) for i in range(spec.count)]
    out = []
    for s in s_values:
        rep = check_nonlinear_smoothing(spec, s, b, bp, a, lab, threads, samples)
        out.append({"s": s, "a_max": admissible_a(s, bp), "max_ratio": rep.max_ratio})
    return out


# -------------------------------------------------------------------- pins


def load_pins(path=None):
    if path is None:
        return json.loads(resources.files("gkdv_lab").joinpath("data/pins.json").read_text())
    with open(path) as fh:
        return json.load(fh)


def pin_status(report, pins, band=PIN_BAND):
    """``"ok"``, ``"low"``, ``"high"`` or ``"unpinned"`` against ``pins[report.estimate]``."""
    pin = pins.get("pins", pins).get(report.estimate)
    if pin is None:
        return "unpinned"
    value = pin["max_ratio"]
    r = report.max_ratio
    if r < (1 - band) * value:
        return "low"
    if r > (1 + band) * value:
        return "high"
    return "ok"


def doubling_change(report, doubled):
    a, b = report.max_ratio, doubled.max_ratio
    return abs(b - a) / a if a > 0 else (0.0 if b == 0 else float("inf"))


# ----------------------------------------------------------------- presets

# documented parameter tuples of the standard verification run
STANDARD_TUPLES = {
    "linear_xsb": {"s": 0.0, "b": 0.55},
    "kato": {"s": 0.0},
    "boundary_xsb": {"s": 0.0, "b": 0.55},
    "boundary_sobolev": {"s": 0.0},
    "nonlinear_smoothing": {"s": 0.0, "b": 0.55, "b_prime": 0.45, "a": 0.1},
    "duhamel_sobolev": {"s": 0.0, "b_prime": 0.45},
    "correction_term": {"s": 0.0, "b": 0.55, "a": 0.1},
}


def run_standard(spec=EnsembleSpec(), lab=LabGrid(), threads=1, which=None, quad=LAB_QUAD):
    """All ratio tests at :data:`STANDARD_TUPLES`; returns ``{id: RatioReport}``."""
    lab.check()
    which = set(STANDARD_TUPLES) if which is None else set(which)
    out = {}
    grid = lab.grid
    if which & {"linear_xsb", "kato"}:
        members = [spatial_member(spec, grid, i) for i in range(spec.count)]
        if "linear_xsb" in which:
            p = STANDARD_TUPLES["linear_xsb"]
            out["linear_xsb"] = check_linear_xsb(members, p["s"], p["b"], lab, threads)
        if "kato" in which:
            out["kato"] = check_kato(members, STANDARD_TUPLES["kato"]["s"], lab, threads)
    if which & {"boundary_xsb", "boundary_sobolev"}:
        gs = boundary_members(spec)
        if "boundary_xsb" in which:
            p = STANDARD_TUPLES["boundary_xsb"]
            out["boundary_xsb"] = check_boundary_xsb(gs, p["s"], p["b"], lab, quad, threads)
        if "boundary_sobolev" in which:
            rx, rt = check_boundary_sobolev(gs, STANDARD_TUPLES["boundary_sobolev"]["s"], lab,
                                            quad, threads)
            out[rx.estimate] = rx
            out[rt.estimate] = rt
    if which & {"nonlinear_smoothing", "correction_term"}:
        samples = [_quadruple(spec, lab, i) for i in range(spec.count)]
        if "nonlinear_smoothing" in which:
            p = STANDARD_TUPLES["nonlinear_smoothing"]
            out["nonlinear_smoothing"] = check_nonlinear_smoothing(
                spec, p["s"], p["b"], p["b_prime"], p["a"], lab, threads, samples)
        if "correction_term" in which:
            p = STANDARD_TUPLES["correction_term"]
            out["correction_term"] = check_correction_term(spec, p["s"], p["b"], p["a"], lab,
                                                           threads, samples)
    if "duhamel_sobolev" in which:
        p = STANDARD_TUPLES["duhamel_sobolev"]
        Ns = [spacetime_member(spec, lab, i) for i in range(spec.count)]
        out["duhamel_sobolev"] = check_duhamel_sobolev(Ns, p["s"], p["b_prime"], threads)
    return out


def write_reports(reports, csv_path=None, json_path=None):
    rows = [r.to_dict() for r in reports]
    if json_path:
        with open(json_path, "w") as fh:
            json.dump(rows, fh, indent=2)
    if csv_path:
        with open(csv_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["estimate", "params", "sample", "lhs", "rhs", "ratio"])
            for r in reports:
                p = json.dumps(r.params, sort_keys=True)
                for i, (l, h, q) in enumerate(zip(r.lhs, r.rhs, r.ratios)):
                    w.writerow([r.estimate, p, i, repr(l), repr(h), repr(q)])


__all__ = [
    "EnsembleSpec",
    "LAB_QUAD",
    "LabGrid",
    "R_FACTOR",
    "RatioReport",
    "STANDARD_TUPLES",
    "admissible_a",
    "boundary_member",
    "boundary_members",
    "check_boundary_sobolev",
    "check_boundary_xsb",
    "check_correction_term",
    "check_duhamel_sobolev",
    "check_kato",
    "check_linear_xsb",
    "check_nonlinear_smoothing",
    "correction_integral",
    "doubling_change",
    "load_pins",
    "pin_status",
    "quartic_derivative",
    "run_standard",
    "smoothing_sweep",
    "spacetime_member",
    "spatial_member",
    "write_reports",
]

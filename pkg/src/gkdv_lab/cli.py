"""Batch front end: ``gkdv-lab --config run.json --out results/``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure
(non-convergence, quadrature failure, a verification that did not pass),
4 internal error.

Environment overrides (flags win over the environment, the environment
wins over the config file): ``GKDV_LAB_OUT``, ``GKDV_LAB_SEED``,
``GKDV_LAB_THREADS``.
"""

import argparse
import copy
import csv
import hashlib
import json
import os
import platform
import sys
import traceback
import warnings
from dataclasses import asdict, replace

import jsonschema
import numpy as np
import scipy

from . import __version__, estimates, fieldio, soliton
from .duhamel import (
    PicardDivergence,
    PicardNonConvergence,
    SolverConfig,
    picard_solve,
    smoothing_diagnostic,
)
from .extension import ExtensionStrategy
from .linear import QuadratureError, QuadratureSpec
from .presets import Preset, preset_catalog, resolve

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_INTERNAL = 0, 2, 3, 4
SCHEMA_VERSION = 1
COMMANDS = ("solve-linear", "solve", "verify-estimates", "convergence-study", "smoothing-study")


class ConfigError(ValueError):
    pass


class VerificationFailed(RuntimeError):
    pass


def _obj(props, required=()):
    return {"type": "object", "properties": props, "required": list(required),
            "additionalProperties": False}


_num = {"type": "number"}
_int = {"type": "integer"}
_opt_num = {"type": ["number", "null"]}
_opt_int = {"type": ["integer", "null"]}

_QUAD = _obj({
    "substitution": {"type": "boolean"}, "n_panels": _opt_int, "order": _int, "z_max": _opt_num,
    "tol": _num, "grading_levels": _int, "tail": {"type": "boolean"}, "cutoff_tol": _num,
})

_SOLVER = _obj({
    "s": _num, "T": _opt_num, "picard_tol": _num, "max_iters": _int, "half_width": _num,
    "n_points": _int, "n_t": _int, "strategy": {"type": "string", "pattern": "^(zero|even|hestenes[0-9]*)$"},
    "quad": _QUAD, "grid_tol": _num, "alias_tol": _num, "nonlinear": {"type": "boolean"},
    "T_scale": _num, "T_exponent": _num, "xsb_b": _num,
})

_DATA = {"oneOf": [
    {"type": "string"},
    _obj({"preset": {"type": "string"}, "params": {"type": "object"}}, ["preset"]),
    _obj({"kind": {"type": "string"}, "params": {"type": "object"}, "description": {"type": "string"}},
         ["kind"]),
]}

SCHEMA = _obj({
    "version": {"const": SCHEMA_VERSION},
    "command": {"enum": list(COMMANDS)},
    "data": _DATA,
    "solver": _SOLVER,
    "ensemble": _obj({"count": _int, "seed": _int, "sigma": _num, "band": _num, "modulation": _num,
                      "g_frequencies": _int}),
    "lab": _obj({"half_width": _num, "n_points": _int, "window": _num, "n_t": _int}),
    "estimates": _obj({
        "which": {"type": "array", "items": {"enum": list(estimates.STANDARD_TUPLES)}},
        "check_doubling": {"type": "boolean"},
        "check_pins": {"type": "boolean"},
        "sweep": _obj({"s_values": {"type": "array", "items": _num}, "b": _num, "b_prime": _num,
                       "a": _num}),
    }),
    "convergence": _obj({"levels": _int, "min_order": _num, "reference": {"enum": ["exact", "finest"]}}),
    "smoothing": _obj({"seeds": {"type": "array", "items": _int}, "a_grid": {"type": "array", "items": _num},
                       "band": {"type": "array", "items": _num, "minItems": 2, "maxItems": 2},
                       "min_gain": _num}),
    "outputs": _obj({"fields": {"type": "boolean"}, "csv_fields": {"type": "boolean"}}),
    "output_dir": {"type": "string"},
    "seed": _int,
    "threads": _int,
}, ["version", "command"])


# ------------------------------------------------------------------ config


def load_config(path):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    validate(cfg)
    return cfg


def validate(cfg):
    try:
        jsonschema.validate(cfg, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {exc.message}") from exc


def apply_overrides(cfg, out=None, seed=None, threads=None, environ=os.environ):
    cfg = copy.deepcopy(cfg)
    env = {"output_dir": environ.get("GKDV_LAB_OUT"), "seed": environ.get("GKDV_LAB_SEED"),
           "threads": environ.get("GKDV_LAB_THREADS")}
    for key, flag in (("output_dir", out), ("seed", seed), ("threads", threads)):
        value = flag if flag is not None else env[key]
        if value is None:
            continue
        if key != "output_dir":
            try:
                value = int(value)
            except ValueError as exc:
                raise ConfigError(f"{key} must be an integer, got {value!r}") from exc
            if value < 0:
                raise ConfigError(f"{key} must be non-negative")
        cfg[key] = value
    if "seed" in cfg:
        cfg.setdefault("ensemble", {})["seed"] = cfg["seed"]
    validate(cfg)
    return cfg


def solver_config(d):
    d = dict(d or {})
    if "strategy" in d:
        d["strategy"] = ExtensionStrategy.parse(d["strategy"])
    if "quad" in d:
        d["quad"] = QuadratureSpec(**d["quad"])
    try:
        return SolverConfig(**d)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"solver: {exc}") from exc


def _data_preset(cfg):
    spec = cfg.get("data", "zero")
    try:
        preset = resolve(spec)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"data: {exc}") from exc
    if preset.kind == "rough-random" and "seed" in cfg:
        preset = Preset(preset.kind, {**preset.params, "seed": cfg["seed"]}, preset.description)
    return preset


# ------------------------------------------------------------------ output


class RunDirectory:
    """Collects emitted files; :meth:`finish` writes the single manifest."""

    def __init__(self, path):
        self.path = path
        os.makedirs(path, exist_ok=True)
        self.files = []

    def file(self, name):
        self.files.append(name)
        return os.path.join(self.path, name)

    def json(self, name, obj):
        with open(self.file(name), "w") as fh:
            json.dump(obj, fh, indent=2, sort_keys=True, default=_jsonable)
            fh.write("\n")

    def csv(self, name, header, rows):
        with open(self.file(name), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for row in rows:
                w.writerow([repr(v) if isinstance(v, float) else v for v in row])

    def finish(self, cfg, status, summary):
        entries = []
        for name in sorted(set(self.files)):
            with open(os.path.join(self.path, name), "rb") as fh:
                data = fh.read()
            entries.append({"path": name, "sha256": hashlib.sha256(data).hexdigest(), "bytes": len(data)})
        cfg_text = json.dumps(cfg, sort_keys=True)
        manifest = {
            "schema_version": SCHEMA_VERSION,
            "command": cfg["command"],
            "status": status,
            "config": cfg,
            "config_sha256": hashlib.sha256(cfg_text.encode()).hexdigest(),
            "seed": cfg.get("seed", cfg.get("ensemble", {}).get("seed")),
            "versions": {"gkdv_lab": __version__, "python": platform.python_version(),
                         "numpy": np.__version__, "scipy": scipy.__version__},
            "summary": summary,
            "files": entries,
        }
        with open(os.path.join(self.path, "manifest.json"), "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True, default=_jsonable)
            fh.write("\n")
        return manifest


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "__dataclass_fields__"):
        return asdict(obj)
    return str(obj)


def _write_field(run, cfg, name, field):
    if cfg.get("outputs", {}).get("fields", True):
        fieldio.write_field(run.file(name + ".gkf"), field)
    if cfg.get("outputs", {}).get("csv_fields", False):
        fieldio.write_csv(run.file(name + ".csv"), field)


def _trace_rows(u, T):
    o = u.grid.origin_index
    m = u.time.between(0.0, T)
    return [(float(t), float(np.real(v))) for t, v in zip(u.t[m], u.values[o, m])]


# ---------------------------------------------------------------- commands


def _solve(cfg, run, nonlinear):
    sc = solver_config(cfg.get("solver"))
    if not nonlinear:
        sc = replace(sc, nonlinear=False)
    preset = _data_preset(cfg)
    u0, g = preset.build(sc.grid)
    u, state = picard_solve(u0, g, sc)
    T = state.T
    _write_field(run, cfg, "u", u)
    run.csv("boundary_trace.csv", ["t", "u(0,t)"], _trace_rows(u, T))
    run.csv("residuals.csv", ["iteration", "residual"],
            [(i + 1, float(r)) for i, r in enumerate(state.residuals)])
    mask = u.time.between(0.0, T)
    o = u.grid.origin_index
    trace_err = float(np.abs(np.real(u.values[o, mask]) - g(u.t[mask])).max())
    alias = state.G.meta.get("alias_fraction") if state.G is not None else None
    return {
        "data": preset.to_dict(),
        "T": T,
        "iterations": state.iterations,
        "converged": state.converged,
        "residuals": [float(r) for r in state.residuals],
        "contraction_ratios": [float(r) for r in state.contraction_ratios],
        "max_abs_u": float(np.abs(u.values[:, mask]).max()),
        "zero_solution": bool(not np.any(u.values)),
        "boundary_trace_error": trace_err,
        "alias_fraction": alias,
        "quadrature": state.L.meta.get("quadrature", {}),
        "tolerances": {"picard_tol": sc.picard_tol, "grid_tol": sc.grid_tol,
                       "alias_tol": sc.alias_tol, "quad_tol": sc.quad.tol},
    }


def cmd_solve(cfg, run):
    return _solve(cfg, run, True)


def cmd_solve_linear(cfg, run):
    return _solve(cfg, run, False)


def _ensemble(cfg):
    e = cfg.get("ensemble", {})
    try:
        return estimates.EnsembleSpec(**e)
    except TypeError as exc:
        raise ConfigError(f"ensemble: {exc}") from exc


def cmd_verify_estimates(cfg, run):
    spec = _ensemble(cfg)
    lab = estimates.LabGrid(**cfg.get("lab", {}))
    try:
        lab.check()
    except ValueError as exc:
        raise ConfigError(f"lab: {exc}") from exc
    opts = cfg.get("estimates", {})
    which = opts.get("which")
    threads = cfg.get("threads", 1)
    reports = estimates.run_standard(spec, lab, threads, which)
    rows = []
    failures = []
    doubled = estimates.run_standard(spec.doubled(), lab, threads, which) \
        if opts.get("check_doubling", True) else {}
    pins = estimates.load_pins() if opts.get("check_pins", True) else {}
    for name, rep in reports.items():
        row = {"estimate": name, "params": rep.params, "max_ratio": rep.max_ratio,
               "constant": rep.constant, "finite": bool(np.isfinite(rep.max_ratio))}
        if not row["finite"]:
            failures.append(f"{name}: non-finite ratio")
        if name in doubled:
            ch = estimates.doubling_change(rep, doubled[name])
            row["doubling_change"] = ch
            row["doubled_max_ratio"] = doubled[name].max_ratio
            if not ch < 0.2:
                failures.append(f"{name}: ensemble doubling changed the max ratio by {ch:.1%}")
        if pins:
            row["pin"] = estimates.pin_status(rep, pins)
            if row["pin"] not in ("ok", "unpinned"):
                failures.append(f"{name}: max ratio {rep.max_ratio:.4g} is {row['pin']} against its pin")
        rows.append(row)
    estimates.write_reports(list(reports.values()), run.file("ratios.csv"), run.file("ratios.json"))
    run.json("summary_table.json", rows)
    sweep_opts = opts.get("sweep")
    sweep = None
    if sweep_opts is not None:
        sweep = estimates.smoothing_sweep(
            spec, tuple(sweep_opts.get("s_values", (0.0, -0.05, -0.10, -0.15))),
            sweep_opts.get("b", 0.55), sweep_opts.get("b_prime", 0.495), sweep_opts.get("a", 0.0),
            lab, threads)
        run.csv("smoothing_sweep.csv", ["s", "a_max", "max_ratio"],
                [(p["s"], p["a_max"], p["max_ratio"]) for p in sweep])
        m = [p["max_ratio"] for p in sweep]
        if not all(b > a for a, b in zip(m[:-1], m[1:])):
            failures.append("s-sweep max ratios are not increasing as s decreases")
    summary = {"estimates": rows, "sweep": sweep, "failures": failures,
               "ensemble": asdict(spec), "lab": asdict(lab)}
    if failures:
        raise VerificationFailed("; ".join(failures), summary)
    return summary


def cmd_convergence_study(cfg, run):
    """Solve at ``levels`` resolutions, doubling ``n_points`` and ``n_t`` each time."""
    base = solver_config(cfg.get("solver"))
    opts = cfg.get("convergence", {})
    levels = opts.get("levels", 3)
    min_order = opts.get("min_order", 2.0)
    preset = _data_preset(cfg)
    reference = opts.get("reference", "exact" if preset.kind == "soliton" else "finest")
    if reference == "exact" and preset.kind != "soliton":
        raise ConfigError("reference 'exact' needs the soliton preset")
    if base.T is None:
        raise ConfigError("convergence-study needs solver.T so every level covers the same interval")
    sols = []
    for k in range(levels):
        sc = replace(base, n_points=base.n_points * 2 ** k, n_t=base.n_t * 2 ** k)
        u0, g = preset.build(sc.grid)
        u, state = picard_solve(u0, g, sc)
        sols.append((sc, u, state))
    coarse = sols[0][1]
    # compare on the coarsest (x >= 0, 0 <= t <= T) nodes, which every level contains
    o = coarse.grid.origin_index
    xs = coarse.grid.x[o:]
    tm = coarse.time.between(0.0, base.T)
    ts = coarse.t[tm]

    def sample(u):
        step_x = u.grid.n_points // coarse.grid.n_points
        step_t = u.time.n_t // coarse.time.n_t
        oo = u.grid.origin_index
        vals = np.real(u.values[oo::step_x][: xs.size])
        cols = np.real(vals[:, ::step_t][:, : coarse.time.n_t][:, tm])
        return cols

    if reference == "exact":
        p = preset.resolved
        ref = soliton.exact(xs[:, None], ts[None, :], p["c"], p["x0"])
        compared = sols
    else:
        ref = sample(sols[-1][1])
        compared = sols[:-1]
    rows = []
    errs = []
    for sc, u, state in compared:
        e = float(np.sqrt(np.sum((sample(u) - ref) ** 2) / np.sum(ref ** 2)))
        errs.append(e)
        rows.append({"n_points": sc.n_points, "n_t": sc.n_t, "rel_l2_error": e,
                     "iterations": state.iterations})
    orders = [float(np.log2(a / b)) if b > 0 else float("inf") for a, b in zip(errs[:-1], errs[1:])]
    for r, q in zip(rows[1:], orders):
        r["observed_order"] = q
    fitted = float(-np.polyfit(np.log2([r["n_points"] for r in rows]), np.log2(errs), 1)[0]) \
        if len(errs) >= 2 and min(errs) > 0 else None
    run.csv("convergence.csv", ["n_points", "n_t", "rel_l2_error", "observed_order"],
            [(r["n_points"], r["n_t"], r["rel_l2_error"], r.get("observed_order", "")) for r in rows])
    summary = {"data": preset.to_dict(), "reference": reference, "table": rows,
               "fitted_order": fitted, "min_order": min_order}
    if fitted is None or not fitted >= min_order:
        raise VerificationFailed(f"fitted order {fitted} below the configured minimum {min_order}",
                                 summary)
    return summary


def cmd_smoothing_study(cfg, run):
    sc = solver_config(cfg.get("solver"))
    opts = cfg.get("smoothing", {})
    seeds = opts.get("seeds", [0, 1, 2, 3, 4])
    a_grid = opts.get("a_grid", [0.0, 0.1, 0.2])
    band = opts.get("band")
    min_gain = opts.get("min_gain", 0.2)
    base = _data_preset(cfg)
    if base.kind != "rough-random":
        raise ConfigError("smoothing-study needs a rough-random data preset")
    rows = []
    for seed in seeds:
        preset = Preset(base.kind, {**base.params, "seed": seed})
        u0, g = preset.build(sc.grid)
        u, state = picard_solve(u0, g, sc)
        diag = smoothing_diagnostic(u, u0, g, a_grid, sc, L=state.L, band=band)
        rows.append({"seed": seed, "iterations": state.iterations, **diag})
    run.csv("smoothing.csv", ["seed", "slope_u", "slope_d", "decay_gain"],
            [(r["seed"], r["slope_u"], r["slope_d"], r["decay_gain"]) for r in rows])
    run.json("smoothing.json", rows)
    gains = [r["decay_gain"] for r in rows]
    summary = {"rows": rows, "min_gain": min_gain, "gains": gains}
    if any(gn is None or gn < min_gain for gn in gains):
        raise VerificationFailed(f"decay gain below {min_gain} for some seed: {gains}", summary)
    return summary


COMMAND_TABLE = {
    "solve-linear": cmd_solve_linear,
    "solve": cmd_solve,
    "verify-estimates": cmd_verify_estimates,
    "convergence-study": cmd_convergence_study,
    "smoothing-study": cmd_smoothing_study,
}


# -------------------------------------------------------------------- main


def run(cfg):
    """Execute a validated config; returns ``(exit_code, manifest)``."""
    out = cfg.get("output_dir")
    if not out:
        raise ConfigError("no output directory (use --out, GKDV_LAB_OUT or output_dir)")
    rundir = RunDirectory(out)
    status, code = "ok", EXIT_OK
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            summary = COMMAND_TABLE[cfg["command"]](cfg, rundir)
        summary["warnings"] = sorted({f"{w.category.__name__}: {w.message}" for w in caught})
    except ConfigError as exc:
        rundir.finish(cfg, "config-error", {"error": str(exc)})
        raise
    except VerificationFailed as exc:
        status, code = "verification-failed", EXIT_NUMERIC
        summary = {"error": str(exc.args[0]), **exc.args[1]}
    except (PicardNonConvergence, PicardDivergence) as exc:
        status, code = "non-convergence", EXIT_NUMERIC
        summary = {"error": str(exc), "residuals": [float(r) for r in exc.history]}
    except QuadratureError as exc:
        status, code = "quadrature-failure", EXIT_NUMERIC
        summary = {"error": str(exc)}
    return code, rundir.finish(cfg, status, summary)


def build_parser():
    p = argparse.ArgumentParser(prog="gkdv-lab", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--out", help="output directory (overrides output_dir)")
    p.add_argument("--seed", type=int, help="random seed for ensembles and rough data")
    p.add_argument("--threads", type=int, help="worker threads for ensemble members")
    p.add_argument("--list-presets", action="store_true", help="print the data presets and exit")
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_presets:
        for name, preset in sorted(preset_catalog().items()):
            print(f"{name}\t{preset.to_json()}")
        return EXIT_OK
    if not args.config:
        parser.print_usage(sys.stderr)
        print("config error: --config is required", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = apply_overrides(load_config(args.config), args.out, args.seed, args.threads)
        code, manifest = run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception:  # noqa: BLE001
        traceback.print_exc()
        return EXIT_INTERNAL
    if code != EXIT_OK:
        print(f"{manifest['status']}: {manifest['summary'].get('error', '')}", file=sys.stderr)
    else:
        print(os.path.join(cfg["output_dir"], "manifest.json"))
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Write ``src/gkdv_lab/data/pins.json`` from a certified standard run.

A run is certified when every max ratio is finite and positive and moves by
less than 20% when the ensemble is doubled.  Pins are only (re)written for a
certified run; rerun after changing grids, ensembles or quadrature defaults.

    python tests/oracles/pin_estimates.py
"""

import json
import os
import sys
import time

import numpy as np

from gkdv_lab import __version__, estimates

HERE = os.path.dirname(os.path.abspath(__file__))
TARGET = os.path.join(HERE, "..", "..", "src", "gkdv_lab", "data", "pins.json")


def main():
    spec = estimates.EnsembleSpec()
    lab = estimates.LabGrid()
    t0 = time.time()
    base = estimates.run_standard(spec, lab)
    doubled = estimates.run_standard(spec.doubled(), lab)
    ok = True
    pins = {}
    for name, rep in base.items():
        change = estimates.doubling_change(rep, doubled[name])
        good = np.isfinite(rep.max_ratio) and rep.max_ratio > 0 and change < 0.2
        ok &= bool(good)
        print(f"{name:22s} max {rep.max_ratio:.6g}  doubled {doubled[name].max_ratio:.6g}  "
              f"change {change:.3f}  {'ok' if good else 'FAIL'}")
        pins[name] = {"max_ratio": rep.max_ratio, "constant": rep.constant, "params": rep.params,
                      "doubled_max_ratio": doubled[name].max_ratio}
    print(f"{time.time() - t0:.0f} s")
    if not ok:
        print("not certified; pins left unchanged")
        return 1
    out = {"version": __version__, "ensemble": spec.__dict__, "lab": lab.__dict__,
           "cutoff_tol": estimates.LAB_QUAD.cutoff_tol, "band": estimates.PIN_BAND, "pins": pins}
    with open(TARGET, "w") as fh:
        json.dump(out, fh, indent=2)
        fh.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())

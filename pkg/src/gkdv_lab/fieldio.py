"""Binary and CSV snapshots of grid functions and space-time fields.

Binary layout (all little-endian)::

    offset  size  content
    0       8     magic b"GKDVFLD1"
    8       8     float64  L      (half width)
    16      8     int64    n      (spatial points)
    24      8     float64  t_min
    32      8     float64  t_max
    40      8     int64    n_t    (0 for a spatial snapshot)
    48      ...   payload: float64 pairs (re, im), x index fastest,
                  i.e. value (j, m) sits at pair index m*n + j

A spatial snapshot has ``n_t = 0``, ``t_min = t_max = 0`` and ``n`` pairs.
"""

import csv
import struct

import numpy as np

from .spectral import GridFunction, SpaceTimeField, SpatialGrid, TimeGrid

MAGIC = b"GKDVFLD1"
_HEADER = struct.Struct("<8sdqddq")


def to_bytes(f):
    if isinstance(f, SpaceTimeField):
        header = _HEADER.pack(MAGIC, f.grid.half_width, f.grid.n_points,
                              f.time.t_min, f.time.t_max, f.time.n_t)
        vals = np.asarray(f.values, dtype=complex).T  # (n_t, n): x fastest
    else:
        header = _HEADER.pack(MAGIC, f.grid.half_width, f.grid.n_points, 0.0, 0.0, 0)
        vals = np.asarray(f.values, dtype=complex)
    payload = np.empty(vals.shape + (2,), dtype="<f8")
    payload[..., 0] = vals.real
    payload[..., 1] = vals.imag
    return header + payload.tobytes()


def from_bytes(buf):
    magic, L, n, t_min, t_max, n_t = _HEADER.unpack_from(buf, 0)
    if magic != MAGIC:
        raise ValueError("not a field snapshot (bad magic)")
    grid = SpatialGrid(L, n)
    data = np.frombuffer(buf, dtype="<f8", offset=_HEADER.size)
    expected = 2 * n * max(n_t, 1)
    if data.size != expected:
        raise ValueError(f"payload has {data.size} doubles, expected {expected}")
    vals = data[0::2] + 1j * data[1::2]
    if n_t == 0:
        return GridFunction(grid, vals)
    return SpaceTimeField(grid, TimeGrid(t_min, t_max, n_t), vals.reshape(n_t, n).T)


def write_field(path, f):
    with open(path, "wb") as fh:
        fh.write(to_bytes(f))


def read_field(path):
    with open(path, "rb") as fh:
        return from_bytes(fh.read())


def write_csv(path, f, max_rows=200_000):
    """Long-format CSV: ``x,t,re,im`` (``t`` empty for spatial snapshots)."""
    vals = np.asarray(f.values, dtype=complex)
    rows = vals.size
    if rows > max_rows:
        raise ValueError(f"field has {rows} samples; CSV export is for small fields")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "t", "re", "im"])
        if isinstance(f, SpaceTimeField):
            for m, t in enumerate(f.t):
                for j, x in enumerate(f.x):
                    v = vals[j, m]
                    w.writerow([repr(float(x)), repr(float(t)), repr(float(v.real)), repr(float(v.imag))])
        else:
            for j, x in enumerate(f.x):
                v = vals[j]
                w.writerow([repr(float(x)), "", repr(float(v.real)), repr(float(v.imag))])

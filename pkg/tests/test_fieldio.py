import csv

import numpy as np
import pytest

from gkdv_lab import fieldio
from gkdv_lab.spectral import GridFunction, SpaceTimeField, SpatialGrid, TimeGrid


def test_space_time_round_trip(tmp_path, rng):
    u = SpaceTimeField(SpatialGrid(3.0, 8), TimeGrid(-0.5, 1.5, 6),
                       rng.standard_normal((8, 6)) + 1j * rng.standard_normal((8, 6)))
    p = tmp_path / "u.gkf"
    fieldio.write_field(p, u)
    back = fieldio.read_field(p)
    assert back.grid == u.grid and back.time == u.time
    assert np.array_equal(back.values, u.values)


def test_layout_is_x_fastest(rng):
    vals = np.arange(12.0).reshape(4, 3)
    u = SpaceTimeField(SpatialGrid(1.0, 4), TimeGrid(0, 1, 3), vals)
    payload = np.frombuffer(fieldio.to_bytes(u)[48:], "<f8")
    # value (j, m) at pair m*n + j
    assert payload[2 * (2 * 4 + 1)] == vals[1, 2]
    assert fieldio.to_bytes(u)[:8] == b"GKDVFLD1"


def test_snapshot_round_trip_and_errors(rng):
    f = GridFunction(SpatialGrid(2.0, 16), rng.standard_normal(16))
    back = fieldio.from_bytes(fieldio.to_bytes(f))
    assert isinstance(back, GridFunction) and np.array_equal(back.values.real, f.values)
    with pytest.raises(ValueError, match="magic"):
        fieldio.from_bytes(b"X" * 64)
    with pytest.raises(ValueError, match="payload"):
        fieldio.from_bytes(fieldio.to_bytes(f)[:-16])


def test_csv_export(tmp_path):
    u = SpaceTimeField(SpatialGrid(1.0, 2), TimeGrid(0, 1, 2), np.array([[1.0, 2.0], [3.0, 4.0]]))
    p = tmp_path / "u.csv"
    fieldio.write_csv(p, u)
    rows = list(csv.reader(open(p)))
    assert rows[0] == ["x", "t", "re", "im"] and len(rows) == 5
    assert float(rows[2][2]) == 3.0

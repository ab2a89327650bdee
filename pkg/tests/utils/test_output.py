#! /usr/bin/env python3

import csv
import json

import numpy as np
import pytest

from rh.utils import NumpyEncoder, format_float, wrap_angle, write_csv, write_json

class test_output:
    def test_format_float(self):
        for value in [0.1, 1 / 3, np.pi, 1e-300, -2.5e17]:
            assert float(format_float(value)) == value

    def test_write_csv(self, tmp_path):
        path = str(tmp_path / "table.csv")
        write_csv(path, ["id", "x"], [[1, 0.1], [2, np.float64(1 / 3)], [3, "label"]])
        with open(path, newline="") as f:
            rows = list(csv.reader(f))
        assert rows == [["id", "x"], ["1", "0.10000000000000001"], ["2", "0.33333333333333331"], ["3", "label"]]

    def test_write_json(self, tmp_path):
        path = str(tmp_path / "data.json")
        write_json(path, {"a": np.arange(3), "b": np.float64(0.5), "c": np.int64(4), "d": np.bool_(True)})
        with open(path) as f:
            assert json.load(f) == {"a": [0, 1, 2], "b": 0.5, "c": 4, "d": True}
        assert not (tmp_path / "data.json.tmp").exists()

    def test_encoder_rejects_unknown(self):
        with pytest.raises(TypeError):
            json.dumps({"x": object()}, cls=NumpyEncoder)

class test_wrap_angle:
    def test_range(self):
        angles = np.linspace(-20, 20, 401)
        wrapped = wrap_angle(angles)
        assert np.all(wrapped >= -np.pi)
        assert np.all(wrapped < np.pi)
        assert np.allclose(np.cos(wrapped), np.cos(angles), atol=1e-12)
        assert np.allclose(np.sin(wrapped), np.sin(angles), atol=1e-12)

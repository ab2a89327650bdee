#! /usr/bin/env python3

import copy
import json

import numpy as np
import pytest

from rh.exceptions import ConfigError
from rh.runconfig import *

SIMULATE = {
    "command": "simulate",
    "level": 2,
    "params": {"K1": 1.0, "K2": 1.0, "K3": 0.75},
    "state": {"m": [0.1, 0.2, 0.3], "n": [0.0, 0.1, 1.0], "B": [0.2, 0.0, 1.0]},
    "tol": 1e-11,
    "s_span": [0, 100],
}

POINCARE = {
    "command": "poincare",
    "params": {"K1": 1.0, "K2": 1.0, "K3": 0.75},
    "section": {"alpha": 0.5, "max_crossings": 50},
    "targets": {"H": 1.5, "I": 1.00995, "p_phi": 1.0, "casimirs": {"C1": 1.02, "C2": 1.0, "C3": 1.0}},
    "rng_seed": 3,
}

def modified(base, **changes):
    data = copy.deepcopy(base)
    for key, value in changes.items():
        if value is None:
            del data[key]
        else:
            data[key] = value
    return data

def error_path(data):
    with pytest.raises(ConfigError) as excinfo:
        RunConfig.from_dict(data)
    return excinfo.value.path

class test_valid:
    def test_simulate(self):
        config = RunConfig.from_dict(SIMULATE)
        assert config.command == "simulate"
        assert config.level == 2
        assert config.params.K3 == 0.75
        assert np.array_equal(config.state.n, [0.0, 0.1, 1.0])
        assert config.s_span == (0.0, 100.0)
        assert config.tol == 1e-11
        assert config.prefix == "simulate"
        assert config.project_casimirs is False
        assert config.source == SIMULATE

    def test_missing_fields_are_zero(self):
        config = RunConfig.from_dict(modified(SIMULATE, level=3, state={"m": [1, 0, 0]}))
        assert np.array_equal(config.state.D, [0, 0, 0])
        assert np.array_equal(config.state.B, [0, 0, 0])

    def test_canonical(self):
        canonical = {"theta": 1.0, "psi": 0.5, "phi": 0.0, "p_theta": 0.1, "p_psi": 0.2, "p_phi": 1.0,
                     "casimirs": {"C1": 1.02, "C2": 1.0, "C3": 1.0}}
        config = RunConfig.from_dict(modified(SIMULATE, state=None, canonical=canonical))
        assert config.state is None
        assert config.canonical.p_psi == 0.2
        assert config.casimirs.C1 == 1.02

    def test_poincare(self):
        config = RunConfig.from_dict(POINCARE)
        assert config.section.alpha == 0.5
        assert config.section.direction == "both"
        assert config.section.max_crossings == 50
        assert config.targets.n_seeds == 4
        assert config.targets.casimirs.p_psi_max == pytest.approx(0.52)
        assert config.rng_seed == 3

    def test_prefix(self):
        config = RunConfig.from_dict(modified(SIMULATE, output={"prefix": "run1"}))
        assert config.prefix == "run1"

    def test_metadata(self):
        config = RunConfig.from_dict(modified(SIMULATE, **{"lambda": 0.25}))
        metadata = config.metadata()
        assert metadata["params"] == {"K1": 1.0, "K2": 1.0, "K3": 0.75}
        assert metadata["s_span"] == [0.0, 100.0]
        assert metadata["lambda"] == 0.25
        json.dumps(metadata)

    def test_from_json(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps(SIMULATE))
        assert RunConfig.from_json(str(path)).s_span == (0.0, 100.0)

class test_invalid:
    @pytest.mark.parametrize("data, path", [
        (modified(SIMULATE, command=None), "command"),
        (modified(SIMULATE, command="plot"), "command"),
        (modified(SIMULATE, extra=1), "extra"),
        (modified(SIMULATE, params={"K1": 1.0, "K2": -1.0, "K3": 1.0}), "params.K2"),
        (modified(SIMULATE, params={"K1": 1.0, "K2": 1.0}), "params.K3"),
        (modified(SIMULATE, params={"K1": 1.0, "K2": True, "K3": 1.0}), "params.K2"),
        (modified(SIMULATE, params={"K1": 1.0, "K2": 1.0, "K3": 1.0, "K4": 1.0}), "params.K4"),
        (modified(SIMULATE, state={"m": [0, 0, 0], "n": [0, "x", 0]}), "state.n[1]"),
        (modified(SIMULATE, state={"m": [0, 0, 0], "n": [0, 0]}), "state.n"),
        (modified(SIMULATE, state={"n": [0, 0, 1]}), "state.m"),
        (modified(SIMULATE, state={"m": [0, 0, 0], "q": [0, 0, 0]}), "state.q"),
        (modified(SIMULATE, level=1), "state.B"),
        (modified(SIMULATE, level=4), "level"),
        (modified(SIMULATE, state=None), "state"),
        (modified(SIMULATE, canonical={}), "state"),
        (modified(SIMULATE, tol=1e-2), "tol"),
        (modified(SIMULATE, tol=0), "tol"),
        (modified(SIMULATE, s_span=[10, 0]), "s_span[1]"),
        (modified(SIMULATE, s_span=None), "s_span"),
        (modified(SIMULATE, project_casimirs="yes"), "project_casimirs"),
        (modified(SIMULATE, output={"prefix": "a/b"}), "output.prefix"),
        (modified(SIMULATE, rng_seed=-1), "rng_seed"),
        (modified(POINCARE, section=None), "section"),
        (modified(POINCARE, targets=None), "targets"),
        (modified(POINCARE, section={"alpha": 1.0}), "section.alpha"),
        (modified(POINCARE, section={"alpha": 0.5, "direction": "up"}), "section.direction"),
        (modified(POINCARE, targets={"H": 1.5, "I": 1.0, "p_phi": 1.0,
                                     "casimirs": {"C1": 1.0, "C2": 1.0, "C3": 0.0}}), "targets.casimirs.C3"),
    ])
    def test_error_path(self, data, path):
        assert error_path(data) == path

    def test_canonical_needs_level_2(self):
        canonical = {"theta": 1.0, "psi": 0.5, "phi": 0.0, "p_theta": 0.1, "p_psi": 0.2, "p_phi": 1.0,
                     "casimirs": {"C1": 1.02, "C2": 1.0, "C3": 1.0}}
        assert error_path(modified(SIMULATE, level=3, state=None, canonical=canonical)) == "level"

    def test_not_an_object(self):
        assert error_path([1, 2]) == ""

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError) as excinfo:
            RunConfig.from_json(str(tmp_path / "missing.json"))
        assert "cannot read" in str(excinfo.value)

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("{\"command\": ")
        with pytest.raises(ConfigError) as excinfo:
            RunConfig.from_json(str(path))
        assert excinfo.value.path == ""

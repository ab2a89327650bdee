#! /usr/bin/env python3

import csv
import json

import pytest

pytest.importorskip("configfile")

from rh.commands import *
from rh.commands import EXIT_CONFIG, EXIT_FAILED, EXIT_NUMERICAL, EXIT_OK

PARAMS = {"K1": 1.0, "K2": 1.0, "K3": 0.75}

def write_config(tmp_path, data, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)

def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.reader(f))

def read_json(path):
    with open(path) as f:
        return json.load(f)

class test_simulate:
    def test_aligned_state(self, tmp_path):
        config = {"command": "simulate", "params": PARAMS, "tol": 1e-10, "s_span": [0, 20],
                  "state": {"m": [0, 0, 0.3], "n": [0, 0, 0.5], "B": [0, 0, 1]}}
        cmd = Simulate(write_config(tmp_path, config), str(tmp_path), reconstruct=True)
        assert cmd.run() == EXIT_OK
        rows = read_csv(tmp_path / "simulate-trajectory.csv")
        assert rows[0][:10] == ["s", "m1", "m2", "m3", "n1", "n2", "n3", "B1", "B2", "B3"]
        assert all(row[1:] == rows[1][1:] for row in rows[1:])
        manifest = read_json(tmp_path / "simulate-manifest.json")
        assert manifest["drift"]["H"]["absolute"] == 0.0
        assert manifest["params"] == PARAMS
        assert manifest["curve"]["orthonormality_defect"] < 1e-14
        assert (tmp_path / "simulate-curve.csv").exists()

    def test_casimir_projection(self, tmp_path):
        config = {"command": "simulate", "params": {"K1": 1.0, "K2": 1.3, "K3": 0.75}, "s_span": [0, 10],
                  "state": {"m": [0.1, 0.2, 0.3], "n": [0, 0.1, 1], "B": [0.2, 0, 1]},
                  "project_casimirs": True, "output": {"prefix": "projected"}}
        assert Simulate(write_config(tmp_path, config), str(tmp_path)).run() == EXIT_OK
        drift = read_json(tmp_path / "projected-manifest.json")["drift"]
        for name in ("C1", "C2", "C3"):
            assert drift[name]["absolute"] < 1e-12

    def test_malformed_config(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("{\"command\": \"simulate\"")
        assert Simulate(str(path), str(tmp_path)).run() == EXIT_CONFIG

    def test_invalid_config(self, tmp_path):
        config = {"command": "simulate", "params": {"K1": 1.0, "K2": 0, "K3": 1.0}, "s_span": [0, 1],
                  "state": {"m": [0, 0, 1]}}
        assert Simulate(write_config(tmp_path, config), str(tmp_path)).run() == EXIT_CONFIG

    def test_command_mismatch(self, tmp_path):
        config = {"command": "reduce", "params": PARAMS, "state": {"m": [0, 0, 1]}}
        assert Simulate(write_config(tmp_path, config), str(tmp_path)).run() == EXIT_CONFIG

class test_reduce:
    def test_report(self, tmp_path):
        config = {"command": "reduce", "params": PARAMS, "s_span": [0, 5],
                  "state": {"m": [0.1, 0.2, 0.3], "n": [0.3, 0.1, 1.0], "B": [0.2, 0.4, 1.0]}}
        assert Reduce(write_config(tmp_path, config), str(tmp_path)).run() == EXIT_OK
        report = read_json(tmp_path / "reduce-report.json")
        assert report["H_reduced"] == pytest.approx(report["H_body"], abs=1e-12)
        assert report["canonicality_defect"] < 1e-6
        assert report["drift"]["H"]["absolute"] < 1e-8
        assert list(report["canonical"]) == ["theta", "psi", "phi", "p_theta", "p_psi", "p_phi"]
        assert (tmp_path / "reduce-reduced.csv").exists()

    def test_gimbal_singularity(self, tmp_path):
        config = {"command": "reduce", "params": PARAMS,
                  "state": {"m": [0.1, 0.2, 0.3], "n": [1, 0, 0], "B": [0, 0, 1]}}
        assert Reduce(write_config(tmp_path, config), str(tmp_path)).run() == EXIT_NUMERICAL

    def test_anisotropic_flow(self, tmp_path):
        config = {"command": "reduce", "params": {"K1": 1.0, "K2": 1.3, "K3": 0.75}, "s_span": [0, 5],
                  "state": {"m": [0.1, 0.2, 0.3], "n": [0.3, 0.1, 1.0], "B": [0.2, 0.4, 1.0]}}
        assert Reduce(write_config(tmp_path, config), str(tmp_path)).run() == EXIT_CONFIG

class test_lax_check:
    def test_report(self, tmp_path):
        config = {"command": "lax-check", "level": 3, "params": PARAMS, "s_span": [0, 5], "tol": 1e-12,
                  "state": {"m": [0.1, 0.2, 0.3], "n": [0.3, 0.1, 0.2], "B": [0.2, 0.4, 0.1], "D": [0.1, 0, 0.2]}}
        assert LaxCheck(write_config(tmp_path, config), str(tmp_path)).run() == EXIT_OK
        report = read_json(tmp_path / "lax-check-report.json")
        assert report["coefficient_match"] < 1e-13
        assert report["consistency_defect"] < 1e-13
        assert report["lax_hamiltonian"] == pytest.approx(report["hamiltonian"], abs=1e-12)
        assert report["residue_drift"] < 1e-9
        assert len(report["residue_invariants"]) == 8

class test_poincare:
    CONFIG = {
        "command": "poincare",
        "params": PARAMS,
        "section": {"alpha": 0.5, "max_crossings": 8, "max_arclength": 200},
        "targets": {"H": 1.5, "I": 1.00995, "p_phi": 1.0, "n_seeds": 1,
                    "casimirs": {"C1": 1.02, "C2": 1.0, "C3": 1.0}},
        "rng_seed": 4,
    }

    def test_deterministic(self, tmp_path):
        first, second = tmp_path / "first", tmp_path / "second"
        first.mkdir()
        second.mkdir()
        path = write_config(tmp_path, self.CONFIG)
        assert Poincare(path, str(first)).run() == EXIT_OK
        assert Poincare(path, str(second)).run() == EXIT_OK
        assert read_csv(first / "poincare" / "orbit-0.csv") == read_csv(second / "poincare" / "orbit-0.csv")
        manifest = read_json(first / "poincare" / "manifest.json")
        assert manifest["rng_seed"] == 4
        assert manifest["orbits"][0]["crossings"] <= 8

    def test_anisotropic(self, tmp_path):
        config = dict(self.CONFIG, params={"K1": 1.0, "K2": 1.3, "K3": 0.75})
        assert Poincare(write_config(tmp_path, config), str(tmp_path)).run() == EXIT_CONFIG

    def test_infeasible_level(self, tmp_path):
        targets = dict(self.CONFIG["targets"], H=-100.0)
        config = dict(self.CONFIG, targets=targets)
        assert Poincare(write_config(tmp_path, config), str(tmp_path)).run() == EXIT_NUMERICAL

class test_verify:
    def test_subset(self, tmp_path):
        config = {"command": "verify", "params": PARAMS, "samples": 10, "rng_seed": 2}
        cmd = Verify(write_config(tmp_path, config), str(tmp_path), ["roundtrip", "casimir"])
        assert cmd.run() == EXIT_OK
        report = read_json(tmp_path / "verify-report.json")
        assert report["passed"]
        assert report["samples"] == 10
        assert [suite["name"] for suite in report["suites"]] == ["roundtrip", "casimir"]

    def test_without_config(self, tmp_path):
        cmd = Verify(None, str(tmp_path), ["jacobi"])
        assert cmd.run() == EXIT_OK
        assert read_json(tmp_path / "verify-report.json")["rng_seed"] == 0

    def test_exit_codes(self):
        assert (EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_NUMERICAL) == (0, 1, 2, 3)

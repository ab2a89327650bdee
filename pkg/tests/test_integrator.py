#! /usr/bin/env python3

import csv

import numpy as np
from numpy.testing import assert_allclose
import pytest

from rh.exceptions import IntegrationError, NonFiniteState
from rh.hierarchy import FieldState, RodParams, body_flow, body_ledger, state_labels
from rh.integrator import *

def oscillator(s, y):
    return np.array([y[1], -y[0]])

class test_integrate:
    @pytest.mark.parametrize("tol", [1e-14, 1e-2, np.nan])
    def test_tolerance_range(self, tol):
        with pytest.raises(ValueError):
            integrate(oscillator, [1, 0], (0, 1), tol)

    @pytest.mark.parametrize("s_span", [(1, 0), (0, 0), (0, np.inf)])
    def test_invalid_span(self, s_span):
        with pytest.raises(ValueError):
            integrate(oscillator, [1, 0], s_span)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            integrate(oscillator, [1, 0], (0, 1), method="RK23")

    def test_oscillator(self):
        traj = integrate(oscillator, [1, 0], (0, 10), 1e-10)
        assert traj.s[0] == 0
        assert traj.s[-1] == 10
        assert_allclose(traj.y[:, 0], np.cos(traj.s), rtol=0, atol=1e-8)
        assert_allclose(traj.y[:, 1], -np.sin(traj.s), rtol=0, atol=1e-8)

    def test_dense_output(self):
        traj = integrate(oscillator, [1, 0], (0, 10), 1e-10)
        s = np.linspace(0, 10, 101)
        assert_allclose(traj(s)[0], np.cos(s), rtol=0, atol=1e-8)
        assert len(traj.interpolants) == traj.steps

    def test_convergence_order(self):
        # fixed steps: the tolerance never rejects a step of this size
        errors = []
        for h in (0.1, 0.05, 0.025):
            traj = integrate(oscillator, [1, 0], (0, 10), 1e-3, max_step=h, first_step=h)
            errors.append(abs(traj.y[-1, 0] - np.cos(10)))
        for coarse, fine in zip(errors, errors[1:]):
            assert 16 <= coarse / fine <= 48

    def test_reference_run(self):
        params = RodParams(1.2, 1.2, 0.8)
        y0 = FieldState.from_triples([0.1, -0.3, 0.2], [0.4, 0.1, -0.2], [0.3, 0.2, 0.1]).vector
        fun = body_flow(2, params)
        traj = integrate(fun, y0, (0, 10), 1e-10)
        reference = integrate(fun, y0, (0, 10), 1e-13, method="DOP853")
        assert_allclose(traj.y[-1], reference.y[-1], rtol=0, atol=1e-7)

    def test_step_size_underflow(self):
        # y = 1 / (1 - s) blows up at s = 1
        with pytest.raises(IntegrationError) as excinfo:
            integrate(lambda s, y: y**2, [1.0], (0, 2))
        assert excinfo.value.s == pytest.approx(1, abs=1e-3)

    def test_non_finite_state(self):
        def fun(s, y):
            if s > 0.5:
                return np.array([np.nan, 0.0])
            return np.array([1.0, 0.0])
        with pytest.raises(NonFiniteState) as excinfo:
            integrate(fun, [0.0, 0.0], (0, 1))
        assert excinfo.value.component == 0
        assert excinfo.value.s > 0.5

    def test_post_step(self):
        calls = []

        def post_step(s, y):
            calls.append(s)
            return y / np.hypot(y[0], y[1])

        traj = integrate(oscillator, [1, 0], (0, 5), 1e-6, post_step=post_step)
        assert len(calls) == traj.steps
        assert_allclose(np.hypot(traj.y[1:, 0], traj.y[1:, 1]), 1, rtol=0, atol=1e-15)

    def test_post_step_dense_output(self):
        def post_step(s, y):
            return 1.01 * y

        traj = integrate(oscillator, [1, 0], (0, 5), 1e-8, post_step=post_step)
        assert all(isinstance(interpolant, ProjectedStep) for interpolant in traj.interpolants)
        assert_allclose(traj(traj.s), traj.y.T, rtol=0, atol=1e-12)
        # continuous across the step boundaries
        for left, right, s in zip(traj.interpolants, traj.interpolants[1:], traj.s[1:-1]):
            assert_allclose(left(s), right(s), rtol=0, atol=1e-12)

    def test_terminate(self):
        traj = integrate(oscillator, [1, 0], (0, 100), 1e-8, terminate=lambda s0, y0, s1, y1: y0[0] > 0 >= y1[0])
        assert traj.s[-1] == pytest.approx(np.pi / 2, abs=0.5)
        assert traj.y[-1, 0] <= 0

class test_trajectory:
    params = RodParams(1.5, 1.5, 1.0)

    def trajectory(self):
        state = FieldState.from_triples([0.2, 0.1, -0.3], [0.0, 0.5, 0.8])
        return integrate(body_flow(1, self.params), state.vector, (0, 10), 1e-11,
                         ledger=body_ledger(1, self.params), labels=state_labels(1), metadata={"tag": "x"})

    def test_drift(self):
        drift = self.trajectory().drift()
        assert list(drift) == ["H", "C1", "C2", "lagrange", "kovalevskaya", "chaplygin"]
        for name in ["H", "C1", "C2", "lagrange"]:
            absolute, relative = drift[name]
            assert absolute < 1e-9
            assert relative <= absolute

    def test_metadata(self):
        traj = self.trajectory()
        metadata = traj.metadata()
        assert metadata["labels"] == state_labels(1)
        assert metadata["steps"] == traj.steps
        assert metadata["active_integrals"] == ["lagrange"]
        assert metadata["tag"] == "x"

    def test_to_csv(self, tmp_path):
        traj = self.trajectory()
        path = tmp_path / "trajectory.csv"
        traj.to_csv(str(path))
        with open(path, newline="") as f:
            rows = list(csv.reader(f))
        assert rows[0] == ["s"] + state_labels(1) + list(traj.ledger_columns)
        assert len(rows) == len(traj) + 1
        # 17 significant digits round-trip
        assert [float(v) for v in rows[-1][1:7]] == list(traj.y[-1])

class test_reconstruction:
    def free_rod(self, m, params, span=(0, 10)):
        traj = integrate(body_flow(0, params), m, span, 1e-12)
        return reconstruct(traj, params, tol=1e-12)

    def test_helix(self):
        params = RodParams(1.2, 1.2, 0.7)
        m = np.array([0.3, -0.4, 0.6])
        curve = self.free_rod(m, params)
        s = np.linspace(1, 9, 17)
        assert_allclose(curve.curvature(s), np.hypot(m[0], m[1]) / params.K, rtol=0, atol=1e-6)
        assert_allclose(curve.twist(s), m[2] / params.K3, rtol=0, atol=1e-6)

    def test_helix_from_centreline(self):
        params = RodParams(1.2, 1.2, 0.7)
        m = np.array([0.3, -0.4, 0.6])
        curve = self.free_rod(m, params)
        s = np.linspace(1, 9, 17)
        assert_allclose(curve.centreline_curvature(s), np.hypot(m[0], m[1]) / params.K, rtol=0, atol=1e-5)
        # the curve torsion follows the bending stiffness, the material twist the torsional one
        assert_allclose(curve.torsion(s), m[2] / params.K, rtol=0, atol=1e-4)
        assert abs(m[2] / params.K - m[2] / params.K3) > 0.3

    def test_frame(self):
        params = RodParams(1.2, 1.2, 0.7)
        curve = self.free_rod(np.array([0.3, -0.4, 0.6]), params)
        assert curve.quaternion_norm_defect() < 1e-14
        assert curve.orthonormality_defect() < 1e-14
        assert curve.inextensibility_defect() < 1e-6
        assert_allclose(curve.directors(0.0), np.eye(3), rtol=0, atol=1e-15)

    def test_straight_twisted_rod(self):
        params = RodParams(1.2, 1.2, 0.7)
        curve = self.free_rod(np.array([0.0, 0.0, 0.8]), params)
        assert curve.collinearity_defect() < 1e-12
        assert_allclose(curve.r[-1], [0, 0, 10], rtol=0, atol=1e-9)
        assert_allclose(curve.twist(5.0), 0.8 / 0.7, rtol=0, atol=1e-6)

    def test_initial_frame(self):
        frame0 = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        curve = reconstruct_from_strains(lambda s: np.zeros(3), (0, 2), frame0=frame0, r0=[1, 2, 3])
        assert_allclose(curve.directors(1.0), frame0, rtol=0, atol=1e-12)
        assert_allclose(curve.positions(2.0), [1, 2, 5], rtol=0, atol=1e-12)

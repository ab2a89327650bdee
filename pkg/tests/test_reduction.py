#! /usr/bin/env python3

import numpy as np
from numpy.testing import assert_allclose
import pytest

from rh.exceptions import AlignedState, GimbalSingular, LevelMismatch, NegativeRadicand
from rh.hierarchy import FieldState, RodParams, body_flow, casimirs, hamiltonian, rhs
from rh.integrator import integrate
from rh.poincare import seed_on_level_set
from rh.reduction import *
from rh.verify import random_chart_state

class test_casimir_triple:
    def test_positive_C3(self):
        with pytest.raises(ValueError):
            CasimirTriple(1.0, 1.0, 0.0)

    def test_from_state_level(self):
        with pytest.raises(LevelMismatch):
            CasimirTriple.from_state(FieldState.from_triples([1, 0, 0], [0, 1, 0]))

    def test_radicand(self, section_casimirs):
        cas = section_casimirs
        assert cas.v_parallel == 1.0
        assert cas.p_psi_max == pytest.approx(0.52)
        assert cas.radicand(cas.p_psi_max) == pytest.approx(0.0, abs=1e-15)
        assert cas.v_perp(0.0) == pytest.approx(np.sqrt(1.04))

    def test_negative_radicand(self, section_casimirs):
        with pytest.raises(NegativeRadicand):
            section_casimirs.v_perp(section_casimirs.p_psi_max + 0.1)

class test_chart:
    def test_roundtrip(self, rng):
        for _ in range(50):
            state = random_chart_state(rng)
            c, cas = to_canonical(state)
            assert_allclose(from_canonical(c, cas).vector, state.vector, rtol=0, atol=1e-12)
            assert_allclose(casimirs(state), [cas.C1, cas.C2, cas.C3], rtol=0, atol=0)

    def test_angles(self, rng):
        for _ in range(20):
            c, _ = to_canonical(random_chart_state(rng))
            assert 0 < c.theta < np.pi
            assert -np.pi <= c.psi <= np.pi
            assert -np.pi <= c.phi <= np.pi

    def test_aligned(self):
        state = FieldState.from_triples([0.1, 0.2, 0.3], [0.2, 0.4, 0.6], [0.1, 0.2, 0.3])
        with pytest.raises(AlignedState):
            to_canonical(state)

    def test_gimbal(self):
        state = FieldState.from_triples([0.1, 0.2, 0.3], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0])
        with pytest.raises(GimbalSingular):
            to_canonical(state)

    def test_level(self):
        with pytest.raises(LevelMismatch):
            to_canonical(FieldState.from_triples([0.1, 0.2, 0.3], [1.0, 0.0, 0.0]))

class test_reduced_equations:
    @pytest.mark.parametrize("K2", [1.3, 1.0])
    def test_hamiltonian(self, rng, K2):
        params = RodParams(1.3, K2, 0.9)
        for _ in range(20):
            state = random_chart_state(rng)
            c, cas = to_canonical(state)
            assert reduced_hamiltonian(c, cas, params) == pytest.approx(hamiltonian(state, params), abs=1e-12)

    def test_integral(self, rng):
        params = RodParams(1.3, 1.3, 0.9)
        for _ in range(20):
            state = random_chart_state(rng)
            c, cas = to_canonical(state)
            expected = state.n @ state.m + params.K * state.B[2]
            assert integral_I(c, cas, params) == pytest.approx(expected, abs=1e-12)

    def test_projected_flow(self, rng):
        params = RodParams(1.3, 1.3, 0.9)
        for _ in range(20):
            state = random_chart_state(rng)
            c, cas = to_canonical(state)
            projected = jacobian_fd(state, cas=cas) @ rhs(state, params).vector
            assert_allclose(reduced_rhs(c, cas, params), projected, rtol=0, atol=1e-6)

    def test_anisotropic_rejected(self, section_casimirs):
        c = CanonicalState(1.0, 0.5, 0.0, 0.1, 0.2, 1.0)
        with pytest.raises(ValueError):
            reduced_rhs(c, section_casimirs, RodParams(1.0, 1.3, 1.0))

    def test_no_helices(self, rng, section_params, section_casimirs):
        for _ in range(20):
            theta = rng.uniform(0.2, np.pi - 0.2)
            p_psi = rng.uniform(-2, section_casimirs.p_psi_max - 0.05)
            c = CanonicalState(theta, 0.0, 0.0, 0.0, p_psi, 1.0)
            assert helix_ansatz_residual(c, section_casimirs, section_params) > 1e-6

class test_canonicality:
    def test_random_states(self, rng):
        for _ in range(50):
            assert verify_canonical(random_chart_state(rng)) < 1e-6

    def test_appendix_rows(self, rng):
        for _ in range(20):
            state = random_chart_state(rng)
            _, cas = to_canonical(state)
            G = appendix_jacobian(state)
            F = jacobian_fd(state, cas=cas)
            # the angle theta and the momenta p_psi, p_phi use the same formulas in both
            for row in (0, 2, 4, 5):
                assert_allclose(G[row], F[row], rtol=0, atol=1e-6)

    def test_canonical_matrix(self):
        Jbar = canonical_matrix()
        assert np.array_equal(Jbar, -Jbar.T)
        assert np.array_equal(Jbar[:3, 3:], np.eye(3))

class test_reduction_equivalence:
    @pytest.mark.slow
    def test_full_and_reduced_flows(self, section_params, section_casimirs):
        seeds = seed_on_level_set(1.50, 1.00995, section_casimirs, 1.0, section_params, n_seeds=10, rng_seed=7)
        s = np.linspace(0, 50, 201)
        for seed in seeds:
            body0 = from_canonical(seed, section_casimirs)
            full = integrate(body_flow(2, section_params), body0.vector, (0, 50), 1e-12)
            reduced = integrate(canonical_flow(section_casimirs, section_params), seed.as_array(), (0, 50), 1e-12)
            for y_full, y_reduced in zip(full(s).T, reduced(s).T):
                body = from_canonical(y_reduced, section_casimirs).vector
                assert_allclose(body, y_full, rtol=0, atol=1e-7)

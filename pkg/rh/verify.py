#! /usr/bin/env python3

"""
Verification suites checking the structural properties of the hierarchy on
random phase points: the Jacobi identity of the bracket, the Casimir null
space, canonicality of the reduction, round trips of the coordinate maps, the
Lax pair and the invariance of the aligned states.

Every suite returns a :py:class:`SuiteResult` listing the measured defects
together with their thresholds. All randomness is drawn from a
:py:func:`numpy.random.default_rng` generator seeded by the caller.
"""

import collections
import logging
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ReductionError
from .hierarchy import (FieldState, RodParams, alignment_defect, body_flow, body_ledger, casimir_gradients,
                        casimirs, hamiltonian, rhs)
from .integrator import integrate, reconstruct
from .lax import (LaxOperator, consistency_defect, lax_equations, lax_hamiltonian, residue_casimirs_as_hierarchy,
                  residue_invariants, spectrum)
from .reduction import (appendix_jacobian, canonical_difference, from_canonical, jacobian_fd, to_canonical,
                        verify_canonical)
from .so3 import MAX_LEVEL, ScalarField, lie_poisson_bracket, structure_matrix

logger = logging.getLogger(__name__)

__all__ = ["SUITES", "SuiteResult", "random_params", "random_state", "random_chart_state", "run_suite",
           "run_suites"]

@dataclass
class SuiteResult:
    name: str
    # name -> (measured defect, threshold)
    defects: collections.OrderedDict = field(default_factory=collections.OrderedDict)

    def record(self, name, value, threshold):
        self.defects[name] = (float(value), float(threshold))

    @property
    def passed(self):
        return all(value < threshold for value, threshold in self.defects.values())

    def as_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "defects": {name: {"value": value, "threshold": threshold, "passed": value < threshold}
                        for name, (value, threshold) in self.defects.items()},
        }

def random_params(rng, isotropic=True):
    K = rng.uniform(1, 2)
    K2 = K if isotropic else rng.uniform(1, 2)
    return RodParams(K, K2, rng.uniform(1, 2))

def random_state(rng, level, scale=0.5):
    return FieldState(level, rng.uniform(-scale, scale, size=(level + 1, 3)))

def random_chart_state(rng, margin=0.1, scale=1.0):
    """
    Random level-2 state away from the aligned set and from the coordinate
    singularity of the canonical chart.
    """
    while True:
        state = random_state(rng, 2, scale)
        n, B = state.n, state.B
        nB = np.linalg.norm(n) * np.linalg.norm(B)
        if nB == 0:
            continue
        if np.linalg.norm(np.cross(n, B)) < margin * nB:
            continue
        if np.hypot(B[0], B[1]) < margin * np.linalg.norm(B):
            continue
        return state

def _jacobi(rng, samples):
    result = SuiteResult("jacobi")
    worst = 0.0
    antisymmetry = 0.0
    for _ in range(samples):
        level = int(rng.integers(0, MAX_LEVEL + 1))
        size = 3 * (level + 1)
        x = rng.uniform(-1, 1, size)
        fields = []
        for _ in range(3):
            a = rng.uniform(-1, 1, size)
            Q = rng.uniform(-1, 1, (size, size))
            Q = Q + Q.T
            fields.append(ScalarField(lambda y, a=a, Q=Q: float(a @ y + 0.5 * y @ Q @ y),
                                      lambda y, a=a, Q=Q: a + Q @ y))
        f, g, h = fields

        # brackets of quadratics are cubic, so wide difference steps are exact
        def bracket(p, q):
            return ScalarField(lambda y: lie_poisson_bracket(p, q, y, level), step=1e-2)

        terms = [lie_poisson_bracket(f, bracket(g, h), x, level),
                 lie_poisson_bracket(g, bracket(h, f), x, level),
                 lie_poisson_bracket(h, bracket(f, g), x, level)]
        worst = max(worst, abs(sum(terms)) / max(1.0, max(abs(t) for t in terms)))
        fg, gf = lie_poisson_bracket(f, g, x, level), lie_poisson_bracket(g, f, x, level)
        antisymmetry = max(antisymmetry, abs(fg + gf) / max(1.0, abs(fg)))
    result.record("jacobi_identity", worst, 1e-8)
    result.record("antisymmetry", antisymmetry, 1e-12)
    return result

def _casimir(rng, samples):
    result = SuiteResult("casimir")
    null_space = 0.0
    flow = 0.0
    for _ in range(samples):
        level = int(rng.integers(0, MAX_LEVEL + 1))
        state = random_state(rng, level)
        params = random_params(rng, isotropic=False)
        J = structure_matrix(state, level)
        G = casimir_gradients(state)
        null_space = max(null_space, float(np.max(np.abs(G @ J))))
        flow = max(flow, float(np.max(np.abs(G @ rhs(state, params).vector))))
    result.record("null_space", null_space, 1e-12)
    result.record("casimir_rate", flow, 1e-12)
    return result

def _canonical(rng, samples):
    result = SuiteResult("canonical")
    symplectic = 0.0
    appendix = 0.0
    for _ in range(samples):
        state = random_chart_state(rng)
        symplectic = max(symplectic, verify_canonical(state))
        _, cas = to_canonical(state)
        diff = appendix_jacobian(state) - jacobian_fd(state, cas=cas)
        # rows may differ by combinations of Casimir gradients
        C = casimir_gradients(state)
        coefficients = np.linalg.lstsq(C.T, diff.T, rcond=None)[0]
        appendix = max(appendix, float(np.max(np.abs(diff.T - C.T @ coefficients))))
    result.record("symplectic_defect", symplectic, 1e-6)
    result.record("appendix_rows", appendix, 1e-6)
    return result

def _roundtrip(rng, samples):
    result = SuiteResult("roundtrip")
    body = 0.0
    canonical = 0.0
    embedding = 0.0
    for _ in range(samples):
        state = random_chart_state(rng)
        c, cas = to_canonical(state)
        back = from_canonical(c, cas)
        body = max(body, float(np.max(np.abs(back.vector - state.vector))))
        c2, _ = to_canonical(back)
        canonical = max(canonical, float(np.max(np.abs(canonical_difference(c2.as_array(), c.as_array())))))

        level = int(rng.integers(0, MAX_LEVEL))
        low = random_state(rng, level)
        embedding = max(embedding, float(np.max(np.abs(low.embed(MAX_LEVEL).truncate(level).vector - low.vector))))
    result.record("body_roundtrip", body, 1e-10)
    result.record("canonical_roundtrip", canonical, 1e-10)
    result.record("embed_truncate", embedding, 1e-15)
    return result

def _lax(rng, samples, span=(0.0, 100.0)):
    result = SuiteResult("lax")
    match = 0.0
    consistency = 0.0
    hamiltonians = 0.0
    casimir_match = 0.0
    for level in range(MAX_LEVEL + 1):
        for _ in range(samples):
            state = random_state(rng, level)
            params = random_params(rng)
            match = max(match, float(np.max(np.abs(lax_equations(state, params).vector - rhs(state, params).vector))))
            consistency = max(consistency, consistency_defect(state, params))
            inv = residue_invariants(state, params.K)
            hamiltonians = max(hamiltonians, abs(lax_hamiltonian(inv, params) - hamiltonian(state, params)))
            casimir_match = max(casimir_match, float(np.max(np.abs(np.array(residue_casimirs_as_hierarchy(inv))
                                                                    - np.array(casimirs(state))))))
    result.record("coefficient_match", match, 1e-13)
    result.record("consistency", consistency, 1e-13)
    result.record("lax_hamiltonian", hamiltonians, 1e-12)
    result.record("residue_casimirs", casimir_match, 1e-12)

    # conservation along one flow per level
    invariants = 0.0
    isospectral = 0.0
    for level in range(MAX_LEVEL + 1):
        state = random_state(rng, level)
        params = random_params(rng)
        traj = integrate(body_flow(level, params), state.vector, span, 1e-12)
        op0 = LaxOperator.from_state(state, params.K)
        values0 = np.array(list(residue_invariants(op0).as_dict().values()) + [lax_hamiltonian(residue_invariants(op0), params)])
        spectrum0 = spectrum(op0)
        for y in traj.y:
            op = LaxOperator.from_state(FieldState.from_vector(level, y), params.K)
            inv = residue_invariants(op)
            values = np.array(list(inv.as_dict().values()) + [lax_hamiltonian(inv, params)])
            invariants = max(invariants, float(np.max(np.abs(values - values0) / np.maximum(np.abs(values0), 1.0))))
            isospectral = max(isospectral, float(np.max(np.abs(spectrum(op) - spectrum0) / np.maximum(np.abs(spectrum0), 1.0))))
    result.record("residue_drift", invariants, 1e-9)
    result.record("isospectral_drift", isospectral, 1e-8)
    return result

def _align(rng, samples, span=(0.0, 100.0)):
    result = SuiteResult("align")
    alignment = 0.0
    collinearity = 0.0
    for _ in range(samples):
        level = int(rng.integers(2, MAX_LEVEL + 1))
        params = random_params(rng, isotropic=bool(rng.integers(0, 2)))
        fields = np.zeros((level + 1, 3))
        fields[:, 2] = rng.uniform(-1, 1, level + 1)
        state = FieldState(level, fields)
        traj = integrate(body_flow(level, params), state.vector, span, 1e-11, ledger=body_ledger(level, params))
        for y in traj.y:
            alignment = max(alignment, alignment_defect(FieldState.from_vector(level, y)))
        curve = reconstruct(traj, params)
        collinearity = max(collinearity, curve.collinearity_defect())
    result.record("alignment", alignment, 1e-9)
    result.record("collinearity", collinearity, 1e-8)
    return result

SUITES = collections.OrderedDict([
    ("canonical", _canonical),
    ("lax", _lax),
    ("align", _align),
    ("jacobi", _jacobi),
    ("casimir", _casimir),
    ("roundtrip", _roundtrip),
])

def run_suite(name, rng_seed=0, samples=50):
    """
    Run one verification suite.

    :raises KeyError: for an unknown suite name
    """
    suite = SUITES[name]
    rng = np.random.default_rng(rng_seed)
    try:
        result = suite(rng, samples)
    except ReductionError as e:
        logger.error("Suite '{}' hit a singular state: {}".format(name, e))
        raise
    status = "passed" if result.passed else "FAILED"
    logger.info("Suite '{}' {}: {}".format(name, status, ", ".join("{}={:.3g}".format(k, v[0]) for k, v in result.defects.items())))
    return result

def run_suites(names, rng_seed=0, samples=50):
    return [run_suite(name, rng_seed, samples) for name in names]

#! /usr/bin/env python3

"""
Canonical reduction of the magnetic rod (hierarchy level 2).

On a common level set of the three Casimirs ``C1 = n.n/2 + m.B``,
``C2 = B.n`` and ``C3 = B.B`` the nine body components are expressed by three
Euler angles ``(theta, psi, phi)`` and their conjugate momenta
``(p_theta, p_psi, p_phi)``:

.. code::

    B = sqrt(C3) (-sin(theta) cos(phi), sin(theta) sin(phi), cos(theta))
    m = L(theta, phi) p
    n = v_par B / sqrt(C3) + v_perp e_perp(theta, psi, phi)

with ``v_par = C2 / sqrt(C3)`` and
``v_perp = sqrt(2 C1 - C2^2/C3 - 2 sqrt(C3) p_psi) >= 0``. The chart is
singular where ``sin(theta) = 0`` and undefined where ``n`` is parallel to
``B`` (``v_perp = 0``).
"""

import logging
from dataclasses import dataclass, astuple

import numpy as np

from .exceptions import AlignedState, GimbalSingular, NegativeRadicand, LevelMismatch
from .hierarchy import FieldState, casimirs
from .so3 import structure_matrix
from .utils import wrap_angle

logger = logging.getLogger(__name__)

__all__ = ["CANONICAL_LABELS", "CanonicalState", "CasimirTriple", "to_canonical", "from_canonical",
           "reduced_hamiltonian", "reduced_rhs", "integral_I", "canonical_flow",
           "canonical_ledger", "jacobian_fd", "appendix_jacobian", "verify_canonical",
           "canonical_matrix", "canonical_difference", "helix_ansatz_residual"]

CANONICAL_LABELS = ["theta", "psi", "phi", "p_theta", "p_psi", "p_phi"]

# |sin(theta)| below this is treated as the coordinate singularity
GIMBAL_TOLERANCE = 1e-8
# |n x B| / (|n| |B|) below this is treated as alignment
ALIGNMENT_TOLERANCE = 1e-12
# negative radicands of this relative size are rounding errors of v_perp = 0
RADICAND_ROUNDING = 1e-13

@dataclass(frozen=True)
class CanonicalState:
    theta: float
    psi: float
    phi: float
    p_theta: float
    p_psi: float
    p_phi: float

    @classmethod
    def from_array(klass, values):
        return klass(*(float(v) for v in values))

    def as_array(self):
        return np.array(astuple(self))

    def as_dict(self):
        return dict(zip(CANONICAL_LABELS, astuple(self)))

@dataclass(frozen=True)
class CasimirTriple:
    C1: float
    C2: float
    C3: float

    def __post_init__(self):
        if not self.C3 > 0:
            raise ValueError("C3 must be strictly positive, got {!r}".format(self.C3))

    @classmethod
    def from_state(klass, state):
        if state.level != 2:
            raise LevelMismatch("the canonical reduction needs a level 2 state, got level {}".format(state.level))
        return klass(*casimirs(state))

    @property
    def v_parallel(self):
        return self.C2 / np.sqrt(self.C3)

    @property
    def p_psi_max(self):
        """
        Largest ``p_psi`` with a non-negative radicand.
        """
        return (2 * self.C1 - self.C2**2 / self.C3) / (2 * np.sqrt(self.C3))

    def radicand(self, p_psi):
        return 2 * self.C1 - self.C2**2 / self.C3 - 2 * np.sqrt(self.C3) * p_psi

    def v_perp(self, p_psi):
        value = self.radicand(p_psi)
        if value < 0:
            if value < -RADICAND_ROUNDING * max(1.0, abs(2 * self.C1), self.C2**2 / self.C3):
                raise NegativeRadicand(value)
            value = 0.0
        return np.sqrt(value)

    def as_dict(self):
        return {"C1": self.C1, "C2": self.C2, "C3": self.C3}

def _gimbal_check(sin_theta):
    if abs(sin_theta) < GIMBAL_TOLERANCE:
        raise GimbalSingular("sin(theta) = {!r}".format(sin_theta))

def _chart(x, cas):
    """
    Canonical coordinates of the flat level-2 vector ``x`` with the Casimir
    constants ``cas`` held fixed.
    """
    m, n, B = x[:3], x[3:6], x[6:9]
    sqC3 = np.sqrt(cas.C3)
    rho = np.hypot(B[0], B[1])
    _gimbal_check(rho / sqC3)
    theta = np.arccos(np.clip(B[2] / sqC3, -1.0, 1.0))
    phi = np.arctan2(B[1], -B[0])
    psi = np.arctan2(B[0] * n[1] - B[1] * n[0], sqC3 * n[2] - cas.C2 * B[2] / sqC3)
    p_theta = (m[0] * B[1] - m[1] * B[0]) / rho
    p_psi = m @ B / sqC3
    p_phi = m[2]
    return np.array([theta, psi, phi, p_theta, p_psi, p_phi])

def to_canonical(state):
    """
    Map a non-aligned level-2 body state to canonical variables.

    :returns: pair of :py:class:`CanonicalState` and :py:class:`CasimirTriple`
    :raises AlignedState: if ``n`` is parallel to ``B``
    :raises GimbalSingular: if ``sin(theta)`` vanishes
    """
    cas = CasimirTriple.from_state(state)
    n, B = state.n, state.B
    scale = np.linalg.norm(n) * np.linalg.norm(B)
    if np.linalg.norm(np.cross(n, B)) <= ALIGNMENT_TOLERANCE * scale:
        raise AlignedState("the force is parallel to the magnetic field")
    return CanonicalState.from_array(_chart(state.vector, cas)), cas

def _unpack(c):
    if isinstance(c, CanonicalState):
        return astuple(c)
    return tuple(float(v) for v in c)

def _perp_direction(theta, psi, phi):
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(psi), np.sin(psi)
    cf, sf = np.cos(phi), np.sin(phi)
    return np.array([ct*cf*cp - sf*sp, -ct*sf*cp - cf*sp, st*cp])

def _moment(theta, phi, p_theta, p_psi, p_phi):
    st = np.sin(theta)
    _gimbal_check(st)
    X = (p_psi - np.cos(theta) * p_phi) / st
    cf, sf = np.cos(phi), np.sin(phi)
    return np.array([sf * p_theta - cf * X, cf * p_theta + sf * X, p_phi])

def from_canonical(c, cas, params=None):
    """
    Map canonical variables on the Casimir level set ``cas`` back to the level-2
    body state.

    ``params`` is accepted for symmetry with the other operations of the
    reduction; the map does not depend on the stiffnesses.

    :raises NegativeRadicand: if ``2 C1 - C2^2/C3 - 2 sqrt(C3) p_psi < 0``
    """
    theta, psi, phi, p_theta, p_psi, p_phi = _unpack(c)
    sqC3 = np.sqrt(cas.C3)
    st, ct = np.sin(theta), np.cos(theta)
    Bhat = np.array([-st * np.cos(phi), st * np.sin(phi), ct])
    m = _moment(theta, phi, p_theta, p_psi, p_phi)
    n = cas.v_parallel * Bhat + cas.v_perp(p_psi) * _perp_direction(theta, psi, phi)
    return FieldState.from_triples(m, n, sqC3 * Bhat)

def reduced_hamiltonian(c, cas, params):
    """
    The Hamiltonian in canonical variables,
    ``sum(m_i^2 / K_i) / 2 + v_par cos(theta) + v_perp sin(theta) cos(psi)``
    with ``m = L(theta, phi) p``.
    """
    theta, psi, phi, p_theta, p_psi, p_phi = _unpack(c)
    m = _moment(theta, phi, p_theta, p_psi, p_phi)
    V = cas.v_perp(p_psi)
    n3 = cas.v_parallel * np.cos(theta) + V * np.sin(theta) * np.cos(psi)
    return float(0.5 * np.sum(m * m / params.stiffness) + n3)

def _require_isotropic(params):
    if not params.is_isotropic:
        raise ValueError("the reduced equations are implemented for K1 = K2 only, got {}".format(params))

def reduced_rhs(c, cas, params):
    """
    Hamilton's equations of the transversely isotropic magnetic rod.

    :returns: derivatives ``(theta', psi', phi', p_theta', p_psi', p_phi')`` as an array
    :raises NegativeRadicand: outside of the chart
    :raises GimbalSingular: at ``sin(theta) = 0``
    """
    _require_isotropic(params)
    theta, psi, phi, p_theta, p_psi, p_phi = _unpack(c)
    K, K3 = params.K, params.K3
    sqC3 = np.sqrt(cas.C3)
    st, ct = np.sin(theta), np.cos(theta)
    _gimbal_check(st)
    sp, cp = np.sin(psi), np.cos(psi)
    V = cas.v_perp(p_psi)
    if V == 0:
        raise AlignedState("v_perp vanishes, psi' is undefined")
    twist = p_psi - p_phi * ct

    dtheta = p_theta / K
    dpsi = twist / (K * st**2) - sqC3 * cp * st / V
    dphi = -ct * twist / (K * st**2) + p_phi / K3
    dp_theta = (p_psi * ct - p_phi) * twist / (K * st**3) + cas.v_parallel * st - ct * cp * V
    dp_psi = st * sp * V
    return np.array([dtheta, dpsi, dphi, dp_theta, dp_psi, 0.0])

def integral_I(c, cas, params):
    """
    The additional first integral of the transversely isotropic magnetic rod,

    .. code::

        sqrt(C3) K cos(theta) + v_par p_psi
            - v_perp (p_theta sin(psi) - cos(psi) (p_phi - p_psi cos(theta)) / sin(theta))

    which equals ``n.m + K B3`` in body variables.
    """
    _require_isotropic(params)
    theta, psi, phi, p_theta, p_psi, p_phi = _unpack(c)
    st, ct = np.sin(theta), np.cos(theta)
    _gimbal_check(st)
    V = cas.v_perp(p_psi)
    value = np.sqrt(cas.C3) * params.K * ct + cas.v_parallel * p_psi
    value -= V * (p_theta * np.sin(psi) - np.cos(psi) * (p_phi - p_psi * ct) / st)
    return float(value)

def canonical_flow(cas, params):
    """
    Return ``fun(s, y)`` for :py:func:`rh.integrator.integrate` on flat canonical
    vectors ordered as :py:data:`CANONICAL_LABELS`.
    """
    _require_isotropic(params)

    def fun(s, y):
        return reduced_rhs(y, cas, params)

    return fun

class ReducedLedger:
    """
    Invariants of the reduced flow, in the format of
    :py:class:`rh.hierarchy.InvariantLedger`.
    """

    def __init__(self, H, I, p_phi):
        self.hamiltonian = H
        self.I = I
        self.p_phi = p_phi

    def as_row(self):
        return {"H": self.hamiltonian, "I": self.I, "p_phi": self.p_phi}

    def active(self):
        return ["I"]

def canonical_ledger(cas, params):
    def evaluate(y):
        return ReducedLedger(reduced_hamiltonian(y, cas, params), integral_I(y, cas, params), float(y[5]))
    return evaluate

def canonical_matrix():
    """
    The canonical Poisson matrix ``[[0, I], [-I, 0]]`` for the ordering
    :py:data:`CANONICAL_LABELS`.
    """
    Jbar = np.zeros((6, 6))
    Jbar[:3, 3:] = np.eye(3)
    Jbar[3:, :3] = -np.eye(3)
    return Jbar

def canonical_difference(a, b):
    d = a - b
    # angles theta, psi, phi
    d[:3] = wrap_angle(d[:3])
    return d

def jacobian_fd(state, step=1e-6, cas=None):
    """
    Jacobian of the map to canonical variables by central differences.

    :param cas: when given, the Casimir constants are held fixed at these values
        instead of being re-evaluated at the displaced states
    :returns: ``(6, 9)`` array
    """
    x = state.vector
    G = np.empty((6, 9))
    for j in range(9):
        e = np.zeros(9)
        e[j] = step
        if cas is None:
            plus = to_canonical(FieldState.from_vector(2, x + e))[0].as_array()
            minus = to_canonical(FieldState.from_vector(2, x - e))[0].as_array()
        else:
            plus = _chart(x + e, cas)
            minus = _chart(x - e, cas)
        G[:, j] = canonical_difference(plus, minus) / (2 * step)
    return G

def appendix_jacobian(state):
    """
    Analytic Jacobian of the inverse transformation with the Casimir values
    held fixed.

    The ``psi`` row is the gradient of
    ``psi = +-arccos((n3 - C2 B3/C3) / sqrt((1 - B3^2/C3) (2 C1 - C2^2/C3 - 2 m.B)))``
    and agrees with the ``psi`` row of :py:func:`jacobian_fd` only up to a
    combination of Casimir gradients.

    :returns: ``(6, 9)`` array, rows ordered as :py:data:`CANONICAL_LABELS`
    """
    c, cas = to_canonical(state)
    C1, C2, C3 = cas.C1, cas.C2, cas.C3
    m, n, B = state.m, state.n, state.B
    G = np.zeros((6, 9))
    S = np.sqrt(C3 - B[2]**2)
    rho2 = B[0]**2 + B[1]**2

    # theta
    G[0, 8] = -1 / S
    # psi
    X = n[2] - C2 * B[2] / C3
    W = 2 * C1 - C2**2 / C3 - 2 * m @ B
    P = 1 - B[2]**2 / C3
    Delta = W * np.sqrt(P * W - X**2)
    row = np.zeros(9)
    row[0:3] = -B * X / Delta
    row[5] = -W / Delta
    row[6:8] = -m[:2] * X / Delta
    row[8] = (C2 / C3 * P * W - X * (B[2] / C3 * W + m[2] * P)) / (P * Delta)
    G[1] = row if np.sin(c.psi) >= 0 else -row
    # phi
    G[2, 6] = B[1] / rho2
    G[2, 7] = -B[0] / rho2
    # p_theta
    G[3, 0] = B[1] / S
    G[3, 1] = -B[0] / S
    G[3, 6] = -m[1] / S
    G[3, 7] = m[0] / S
    G[3, 8] = (m[0] * B[1] - m[1] * B[0]) * B[2] / S**3
    # p_psi
    G[4, 0:3] = B / np.sqrt(C3)
    G[4, 6:9] = m / np.sqrt(C3)
    # p_phi
    G[5, 2] = 1.0
    return G

def verify_canonical(state, step=1e-6, G=None):
    """
    Largest entry of ``G J G^T - Jbar`` for the finite-difference Jacobian
    ``G`` of :py:func:`to_canonical` at ``state``.

    :raises AlignedState: if ``n`` is parallel to ``B``
    """
    if G is None:
        G = jacobian_fd(state, step)
    J = structure_matrix(state, 2)
    return float(np.max(np.abs(G @ J @ G.T - canonical_matrix())))

def helix_ansatz_residual(c, cas, params, samples=64):
    """
    Residual of the helical ansatz ``theta = const``, ``psi' = const`` in
    Hamilton's equations.

    Along such a solution ``p_theta`` vanishes, while ``p_theta'`` and
    ``p_psi'`` must vanish and ``psi'`` must stay constant for every ``psi``
    the orbit passes through. The residual is the largest violation of these
    conditions over one revolution of ``psi``.
    """
    theta, psi, phi, p_theta, p_psi, p_phi = _unpack(c)
    residual = 0.0
    rates = []
    for psi_k in np.linspace(-np.pi, np.pi, samples, endpoint=False):
        d = reduced_rhs((theta, psi_k, phi, 0.0, p_psi, p_phi), cas, params)
        residual = max(residual, abs(d[3]), abs(d[4]))
        rates.append(d[1])
    rates = np.array(rates)
    return float(max(residual, np.max(np.abs(rates - rates.mean()))))

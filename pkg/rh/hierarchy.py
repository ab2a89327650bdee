#! /usr/bin/env python3

"""
The four rod models of the hierarchy: force-free (level 0), Kirchhoff
(level 1), magnetic (level 2) and hypermagnetic (level 3).

All of them share the Hamiltonian ``H = u.m/2 + d3.n`` with the linear
constitutive law ``m_i = K_i u_i`` and differ only in their Lie-Poisson
structure (see :py:mod:`rh.so3`). The equations of motion read

.. code::

    m' = m x u + n x d3
    n' = n x u + B x d3
    B' = B x u + D x d3
    D' = D x u

where the fields above the level of the model are zero.
"""

import collections
import logging
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidParams, LevelMismatch
from .so3 import MAX_LEVEL, structure_matrix

logger = logging.getLogger(__name__)

__all__ = ["MODEL_NAMES", "FIELD_NAMES", "RodParams", "FieldState", "Integral", "InvariantLedger",
           "strains", "hamiltonian", "hamiltonian_gradient", "rhs", "casimirs",
           "casimir_gradients", "first_integrals", "alignment_defect", "body_flow",
           "body_ledger", "casimir_projection", "state_labels", "ledger", "structure_flow",
           "kovalevskaya_integral", "chaplygin_integral"]

MODEL_NAMES = ("force-free", "kirchhoff", "magnetic", "hypermagnetic")
FIELD_NAMES = ("m", "n", "B", "D")

# relative tolerance of the algebraic stiffness conditions
STIFFNESS_RTOL = 1e-12

E3 = np.array([0.0, 0.0, 1.0])

def _close(a, b, rtol=STIFFNESS_RTOL):
    return abs(a - b) <= rtol * max(abs(a), abs(b))

@dataclass(frozen=True)
class RodParams:
    """
    Bending stiffnesses ``K1``, ``K2`` and the torsional stiffness ``K3``.
    """
    K1: float
    K2: float
    K3: float

    def __post_init__(self):
        for name in ("K1", "K2", "K3"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise InvalidParams("stiffness {} must be finite and positive, got {!r}".format(name, value))

    @classmethod
    def isotropic(klass, K, K3):
        return klass(K, K, K3)

    @property
    def stiffness(self):
        return np.array([self.K1, self.K2, self.K3])

    @property
    def K(self):
        """
        The bending stiffness of a transversely isotropic rod (``K1``).
        """
        return self.K1

    @property
    def is_isotropic(self):
        return _close(self.K1, self.K2)

    @property
    def is_kovalevskaya(self):
        return _close(self.K1, self.K3) and _close(self.K1, 2 * self.K2)

    @property
    def is_chaplygin(self):
        return _close(self.K1, self.K3) and _close(self.K1, 4 * self.K2)

    def as_dict(self):
        return {"K1": self.K1, "K2": self.K2, "K3": self.K3}

@dataclass(frozen=True)
class FieldState:
    """
    Phase point of the non-canonical system: ``level + 1`` stacked body-frame
    triples in the order ``m, n, B, D``.
    """
    level: int
    fields: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not 0 <= self.level <= MAX_LEVEL:
            raise LevelMismatch("hierarchy level must be between 0 and {}, got {}".format(MAX_LEVEL, self.level))
        fields = np.array(self.fields, dtype=float).reshape(-1, 3)
        if len(fields) != self.level + 1:
            raise LevelMismatch("level {} needs {} triples, got {}".format(self.level, self.level + 1, len(fields)))
        if not np.all(np.isfinite(fields)):
            raise ValueError("state components must be finite")
        fields.setflags(write=False)
        object.__setattr__(self, "fields", fields)

    @classmethod
    def from_triples(klass, m, n=None, B=None, D=None):
        triples = [m]
        for t in (n, B, D):
            if t is None:
                break
            triples.append(t)
        return klass(len(triples) - 1, np.array(triples, dtype=float))

    @classmethod
    def from_vector(klass, level, y):
        return klass(level, np.asarray(y, dtype=float).reshape(level + 1, 3))

    @property
    def vector(self):
        return self.fields.ravel().copy()

    def _field(self, index):
        if index > self.level:
            raise LevelMismatch("field {} is not present at level {}".format(FIELD_NAMES[index], self.level))
        return self.fields[index]

    @property
    def m(self):
        return self._field(0)

    @property
    def n(self):
        return self._field(1)

    @property
    def B(self):
        return self._field(2)

    @property
    def D(self):
        return self._field(3)

    def embed(self, level):
        """
        Return the same state as a state of a higher level with the extra
        fields set to zero.
        """
        if level < self.level:
            raise LevelMismatch("cannot embed a level {} state into level {}".format(self.level, level))
        fields = np.zeros((level + 1, 3))
        fields[:self.level + 1] = self.fields
        return FieldState(level, fields)

    def truncate(self, level):
        """
        Drop the fields above ``level``.
        """
        if level > self.level:
            raise LevelMismatch("cannot truncate a level {} state to level {}".format(self.level, level))
        return FieldState(level, self.fields[:level + 1])

    def __eq__(self, other):
        if not isinstance(other, FieldState):
            return NotImplemented
        return self.level == other.level and np.array_equal(self.fields, other.fields)

    __hash__ = object.__hash__

def state_labels(level):
    return ["{}{}".format(name, i) for name in FIELD_NAMES[:level + 1] for i in (1, 2, 3)]

def strains(m, params):
    """
    Generalised strains from the body moment, ``u_i = m_i / K_i``.
    """
    return np.asarray(m, dtype=float) / params.stiffness

def hamiltonian(state, params):
    m = state.m
    H = 0.5 * float(np.sum(m * m / params.stiffness))
    if state.level >= 1:
        H += float(state.n[2])
    return H

def hamiltonian_gradient(state, params):
    """
    Gradient of the Hamiltonian with respect to the flat state vector,
    ``(u, d3, 0, 0)``.
    """
    grad = np.zeros(3 * (state.level + 1))
    grad[:3] = strains(state.m, params)
    if state.level >= 1:
        grad[3:6] = E3
    return grad

def rhs(state, params):
    """
    Right-hand side of the equations of motion, returned as a
    :py:class:`FieldState` holding the derivatives.
    """
    u = strains(state.m, params)
    fields = state.fields
    deriv = np.empty_like(fields)
    for i in range(state.level + 1):
        deriv[i] = np.cross(fields[i], u)
        if i < state.level:
            deriv[i] += np.cross(fields[i + 1], E3)
    return FieldState(state.level, deriv)

def casimirs(state):
    """
    The Casimir functions of the state's level, in the order

    - level 0: ``m.m``
    - level 1: ``n.m``, ``n.n``
    - level 2: ``n.n/2 + m.B``, ``B.n``, ``B.B``
    - level 3: ``m.D + n.B``, ``B.B/2 + n.D``, ``B.D``, ``D.D``
    """
    f = state.fields
    if state.level == 0:
        m, = f
        return (float(m @ m),)
    elif state.level == 1:
        m, n = f
        return (float(n @ m), float(n @ n))
    elif state.level == 2:
        m, n, B = f
        return (float(0.5 * n @ n + m @ B), float(B @ n), float(B @ B))
    m, n, B, D = f
    return (float(m @ D + n @ B), float(0.5 * B @ B + n @ D), float(B @ D), float(D @ D))

def casimir_gradients(state):
    """
    Analytic gradients of :py:func:`casimirs` with respect to the flat state
    vector, as rows of a ``(level + 1, 3 (level + 1))`` array.
    """
    f = state.fields
    level = state.level
    zero = np.zeros(3)
    if level == 0:
        m, = f
        rows = [[2 * m]]
    elif level == 1:
        m, n = f
        rows = [[n, m], [zero, 2 * n]]
    elif level == 2:
        m, n, B = f
        rows = [[B, n, m], [zero, B, n], [zero, zero, 2 * B]]
    else:
        m, n, B, D = f
        rows = [[D, B, n, m], [zero, D, B, n], [zero, zero, D, B], [zero, zero, zero, 2 * D]]
    return np.array([np.concatenate(row) for row in rows])

@dataclass(frozen=True)
class Integral:
    """
    Value of a conditional first integral together with the flag telling
    whether the stiffness condition for its conservation holds.
    """
    value: float
    active: bool

@dataclass(frozen=True)
class InvariantLedger:
    """
    Values of the Hamiltonian, Casimirs and conditional first integrals at one
    phase point.
    """
    hamiltonian: float
    casimirs: tuple
    integrals: collections.OrderedDict

    def as_row(self):
        """
        Flatten the ledger into an ordered mapping of column names to values.
        """
        row = collections.OrderedDict()
        row["H"] = self.hamiltonian
        for i, value in enumerate(self.casimirs, start=1):
            row["C{}".format(i)] = value
        for name, integral in self.integrals.items():
            row[name] = integral.value
        return row

    def active(self):
        return [name for name, integral in self.integrals.items() if integral.active]

def kovalevskaya_integral(m, n, K1):
    """
    ``(m1^2 - m3^2 + 2 K1 n3)^2 + (2 m1 m3 - 2 K1 n1)^2``, conserved by the
    Kirchhoff rod with ``K1 = K3 = 2 K2``.
    """
    re = m[0]**2 - m[2]**2 + 2 * K1 * n[2]
    im = 2 * m[0] * m[2] - 2 * K1 * n[0]
    return float(re**2 + im**2)

def chaplygin_integral(m, n, K1):
    """
    ``m2 (m1^2 + m3^2) - K1 m3 n2``, conserved by the Kirchhoff rod with
    ``K1 = 4 K2 = K3`` on the level set ``m.n = 0``.
    """
    return float(m[1] * (m[0]**2 + m[2]**2) - K1 * m[2] * n[1])

def first_integrals(state, params, tol=STIFFNESS_RTOL):
    """
    Evaluate the conditional first integrals of the state's level.

    Every integral is evaluated; the ``active`` flag records whether its
    stiffness condition (and for the Chaplygin-Goryachev case the constraint
    ``|m.n| < tol``) holds.

    :returns: :py:class:`collections.OrderedDict` mapping names to :py:class:`Integral`
    """
    K = params.K1
    m = state.m
    iso = params.is_isotropic
    integrals = collections.OrderedDict()
    integrals["lagrange"] = Integral(float(K * m[2]), iso)
    if state.level >= 1:
        n = state.n
        integrals["kovalevskaya"] = Integral(kovalevskaya_integral(m, n, K),
                                             state.level == 1 and params.is_kovalevskaya)
        scale = max(1.0, float(np.linalg.norm(m) * np.linalg.norm(n)))
        integrals["chaplygin"] = Integral(chaplygin_integral(m, n, K),
                                          state.level == 1 and params.is_chaplygin and abs(float(m @ n)) < tol * scale)
    if state.level >= 2:
        integrals["I2"] = Integral(float(state.n @ m + K * state.B[2]), iso)
    if state.level >= 3:
        n, B, D = state.n, state.B, state.D
        integrals["I3"] = Integral(float(0.5 * n @ n + m @ B + K * D[2]), iso)
    return integrals

def ledger(state, params):
    return InvariantLedger(hamiltonian(state, params), casimirs(state), first_integrals(state, params))

def alignment_defect(state):
    """
    ``|n x B|`` at level 2 and ``|B x D|`` at level 3.
    """
    if state.level == 2:
        return float(np.linalg.norm(np.cross(state.n, state.B)))
    elif state.level == 3:
        return float(np.linalg.norm(np.cross(state.B, state.D)))
    raise LevelMismatch("the alignment defect is defined for levels 2 and 3 only")

def body_flow(level, params):
    """
    Return ``fun(s, y)`` evaluating the equations of motion on flat state
    vectors, suitable for :py:func:`rh.integrator.integrate`.
    """
    stiffness = params.stiffness

    def fun(s, y):
        fields = y.reshape(level + 1, 3)
        u = fields[0] / stiffness
        deriv = np.cross(fields, u)
        deriv[:-1] += np.cross(fields[1:], E3)
        return deriv.ravel()

    return fun

def body_ledger(level, params):
    def evaluate(y):
        return ledger(FieldState.from_vector(level, y), params)
    return evaluate

def casimir_projection(state0, iterations=2):
    """
    Return a post-step hook projecting states orthogonally back onto the
    Casimir level set of ``state0``.
    """
    level = state0.level
    target = np.array(casimirs(state0))

    def project(s, y):
        for _ in range(iterations):
            state = FieldState.from_vector(level, y)
            residual = np.array(casimirs(state)) - target
            G = casimir_gradients(state)
            y = y - G.T @ np.linalg.lstsq(G @ G.T, residual, rcond=None)[0]
        return y

    return project

def structure_flow(state, params):
    """
    ``J grad(H)`` evaluated through the dense structure matrix.
    """
    return structure_matrix(state, state.level) @ hamiltonian_gradient(state, params)

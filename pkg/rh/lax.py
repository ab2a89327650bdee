#! /usr/bin/env python3

"""
Parametrised Lax pair of the transversely isotropic rod hierarchy.

For a state of level ``n`` the Lax matrix is the Laurent polynomial

.. code::

    Gamma(mu) = K d3^ mu + m^ + n^ / mu + B^ / mu^2 + D^ / mu^3

(truncated after the ``n``-th field) and the flow is
``Gamma' = [Gamma, A]`` with ``A(mu) = d3^ mu + u^``. Matching the powers of
``mu`` reproduces the equations of motion of every level, while the
coefficients of ``trace(Gamma(mu)^2)`` are conserved: with
``I_i = -1/4 [mu^-i] trace(Gamma(mu)^2)`` the indices ``-1 .. n-1`` give the
first integrals and ``n .. 2n`` the Casimirs.
"""

import collections
import logging
from dataclasses import dataclass, field

import numpy as np

from .exceptions import LevelMismatch
from .hierarchy import FieldState, strains
from .so3 import MAX_LEVEL, hat, vee

logger = logging.getLogger(__name__)

__all__ = ["MU_SAMPLES", "LaxOperator", "ResidueInvariants", "lax_rhs", "lax_equations",
           "consistency_defect", "lax_flow", "residue_invariants", "residue_casimirs_as_hierarchy",
           "lax_hamiltonian", "spectrum"]

# spread over the Laurent range, fixed for reproducible spectra
MU_SAMPLES = (0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 4.0, -4.0, 8.0, -8.0, 1/3)

E3_HAT = hat((0.0, 0.0, 1.0))

def _commutator(A, B):
    return A @ B - B @ A

@dataclass(frozen=True)
class LaxOperator:
    """
    The Lax matrix ``Gamma(mu)``: the leading coefficient ``K d3^`` of degree
    one and the skew-symmetric coefficients ``gammas[j]`` of ``mu^-j``.
    """
    K: float
    gammas: np.ndarray = field(repr=False)

    def __post_init__(self):
        gammas = np.array(self.gammas, dtype=float)
        if gammas.ndim != 3 or gammas.shape[1:] != (3, 3) or not 1 <= len(gammas) <= MAX_LEVEL + 1:
            raise LevelMismatch("expected 1 to {} coefficients of shape (3, 3), got {}".format(MAX_LEVEL + 1, gammas.shape))
        object.__setattr__(self, "gammas", gammas)

    @classmethod
    def from_state(klass, state, K):
        return klass(K, np.array([hat(f) for f in state.fields]))

    @property
    def level(self):
        return len(self.gammas) - 1

    @property
    def leading(self):
        return self.K * E3_HAT

    def to_state(self):
        return FieldState(self.level, np.array([vee(g) for g in self.gammas]))

    def laurent(self):
        """
        Ordered mapping of powers of ``mu`` to the coefficient matrices.
        """
        coefficients = collections.OrderedDict()
        coefficients[1] = self.leading
        for j, gamma in enumerate(self.gammas):
            coefficients[-j] = gamma
        return coefficients

    def at(self, mu):
        return sum(coefficient * mu**power for power, coefficient in self.laurent().items())

def lax_rhs(op, u):
    """
    Coefficients of ``[Gamma(mu), d3^ mu + u^]`` by powers of ``mu``.

    :param op: :py:class:`LaxOperator`
    :param u: strain triple
    :returns: ordered mapping of powers ``2, 1, 0, ..., -n`` to ``3x3`` matrices.
        The ``mu^2`` coefficient vanishes identically; the ``mu^1`` coefficient
        vanishes when ``u`` comes from a transversely isotropic rod.
    """
    U = hat(u)
    gammas = op.gammas
    result = collections.OrderedDict()
    result[2] = _commutator(op.leading, E3_HAT)
    result[1] = _commutator(op.leading, U) + _commutator(gammas[0], E3_HAT)
    for i in range(op.level + 1):
        coefficient = _commutator(gammas[i], U)
        if i < op.level:
            coefficient = coefficient + _commutator(gammas[i + 1], E3_HAT)
        result[-i] = coefficient
    return result

def lax_equations(state, params):
    """
    Derivative of the body fields read off the matched powers of ``mu``.
    """
    op = LaxOperator.from_state(state, params.K)
    coefficients = lax_rhs(op, strains(state.m, params))
    return FieldState(state.level, np.array([vee(coefficients[-i]) for i in range(state.level + 1)]))

def consistency_defect(state, params):
    """
    Largest entry of the ``mu^2`` and ``mu^1`` coefficients of the Lax equation,
    which must vanish for the flow to be consistent.
    """
    op = LaxOperator.from_state(state, params.K)
    coefficients = lax_rhs(op, strains(state.m, params))
    return float(max(np.max(np.abs(coefficients[2])), np.max(np.abs(coefficients[1]))))

def lax_flow(level, params):
    """
    Return ``fun(s, y)`` integrating the Lax equations on flat state vectors.
    """
    def fun(s, y):
        return lax_equations(FieldState.from_vector(level, y), params).vector
    return fun

@dataclass(frozen=True)
class ResidueInvariants:
    """
    ``integrals[i]`` holds ``I_i`` for ``i = -1 .. n-1`` and ``casimirs[i]``
    holds ``C_i`` for ``i = n .. 2n``.
    """
    level: int
    integrals: dict
    casimirs: dict

    def as_dict(self):
        data = collections.OrderedDict()
        for i, value in self.integrals.items():
            data["I{}".format(i)] = value
        for i, value in self.casimirs.items():
            data["C{}".format(i)] = value
        return data

def _trace_square(op):
    # -1/4 of the coefficient of mu^-i in trace(Gamma(mu)^2), for i = -2 .. 2n
    coefficients = op.laurent()
    result = collections.defaultdict(float)
    for p, A in coefficients.items():
        for q, B in coefficients.items():
            result[-(p + q)] += -0.25 * float(np.trace(A @ B))
    return result

def residue_invariants(op, K=None):
    """
    Expand ``trace(Gamma(mu)^2)`` and collect the first integrals and Casimirs.

    :param op: :py:class:`LaxOperator` (or a :py:class:`rh.hierarchy.FieldState`
        together with ``K``)
    """
    if isinstance(op, FieldState):
        op = LaxOperator.from_state(op, K)
    n = op.level
    coefficients = _trace_square(op)
    integrals = collections.OrderedDict((i, coefficients[i]) for i in range(-1, n))
    casimirs = collections.OrderedDict((i, coefficients[i]) for i in range(n, 2 * n + 1))
    return ResidueInvariants(n, integrals, casimirs)

def residue_casimirs_as_hierarchy(inv):
    """
    Rescale the residue Casimirs to the tuple of
    :py:func:`rh.hierarchy.casimirs`: every slot matches with factor one
    except the last (pure square) slot, which carries a factor one half.
    """
    values = list(inv.casimirs.values())
    values[-1] *= 2
    return tuple(values)

def lax_hamiltonian(inv, params):
    """
    ``I_0 / K + (K - K3) / (2 K K3) (I_-1 / K)^2``, equal to the Hamiltonian.
    """
    K, K3 = params.K, params.K3
    I0 = inv.integrals[0] if 0 in inv.integrals else inv.casimirs[0]
    return I0 / K + (K - K3) / (2 * K * K3) * (inv.integrals[-1] / K)**2

def spectrum(op, mus=MU_SAMPLES):
    """
    Eigenvalues of ``Gamma(mu)`` at the sample points, as an array of shape
    ``(len(mus), 3)`` sorted by imaginary part.
    """
    result = []
    for mu in mus:
        eigenvalues = np.linalg.eigvals(op.at(mu))
        result.append(eigenvalues[np.argsort(eigenvalues.imag)])
    return np.array(result)

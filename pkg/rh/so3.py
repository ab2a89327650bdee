#! /usr/bin/env python3

"""
Vector algebra on so(3) and the block structure matrices of the rod hierarchy.

A state of hierarchy level ``n`` is a stack of ``n + 1`` body-frame triples
``(m, n, B, D)``. Its Lie-Poisson structure matrix is the anti-triangular
block matrix

.. code::

    [ m^ n^ B^ D^ ]
    [ n^ B^ D^ 0  ]
    [ B^ D^ 0  0  ]
    [ D^ 0  0  0  ]

truncated to ``3 (n + 1)`` rows and columns, where ``v^`` denotes the
skew-symmetric matrix with ``v^ w = v x w``. The bracket of two functions is
``{f, g} = grad(f)^T J grad(g)``, so that the flow generated by a Hamiltonian
``H`` is ``x' = {x, H} = J grad(H)``.
"""

import logging

import numpy as np

from .exceptions import LevelMismatch

logger = logging.getLogger(__name__)

__all__ = ["MAX_LEVEL", "hat", "vee", "structure_matrix", "central_gradient",
           "ScalarField", "lie_poisson_bracket"]

MAX_LEVEL = 3

def hat(v):
    """
    Return the skew-symmetric matrix ``A`` such that ``A @ w == cross(v, w)``.
    """
    v1, v2, v3 = v
    return np.array([
        [0.0, -v3, v2],
        [v3, 0.0, -v1],
        [-v2, v1, 0.0],
    ])

def vee(A):
    """
    Inverse of :py:func:`hat`: return the triple of a skew-symmetric matrix.
    """
    return np.array([A[2, 1], A[0, 2], A[1, 0]])

def _triples(state):
    # accepts a FieldState, a (k, 3) array or a flat vector of length 3k
    fields = getattr(state, "fields", state)
    fields = np.asarray(fields, dtype=float)
    if fields.ndim == 1:
        if fields.size % 3:
            raise LevelMismatch("state vector of size {} is not a stack of triples".format(fields.size))
        fields = fields.reshape(-1, 3)
    return fields

def structure_matrix(state, level):
    """
    Build the dense structure matrix of the given hierarchy level.

    :param state: a :py:class:`rh.hierarchy.FieldState` or anything that can be
        reshaped to a ``(k, 3)`` array of body-frame triples with ``k >= level + 1``
    :param int level: hierarchy level, ``0 <= level <= 3``
    :returns: antisymmetric ``numpy.ndarray`` of shape ``(3 (level + 1), 3 (level + 1))``
    """
    if not 0 <= level <= MAX_LEVEL:
        raise LevelMismatch("hierarchy level must be between 0 and {}, got {}".format(MAX_LEVEL, level))
    fields = _triples(state)
    if len(fields) < level + 1:
        raise LevelMismatch("level {} needs {} triples, the state carries {}".format(level, level + 1, len(fields)))

    size = 3 * (level + 1)
    J = np.zeros((size, size))
    for i in range(level + 1):
        for j in range(level + 1 - i):
            J[3*i:3*i+3, 3*j:3*j+3] = hat(fields[i + j])
    return J

def central_gradient(f, x, step=1e-5):
    """
    Fourth-order central-difference gradient of the scalar function ``f`` at
    ``x``.
    """
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        grad[i] = (-f(x + 2*e) + 8*f(x + e) - 8*f(x - e) + f(x - 2*e)) / (12 * step)
    return grad

class ScalarField:
    """
    A smooth function on the phase space with an optional analytic gradient.

    :param value: callable taking the flat state vector and returning a float
    :param gradient: callable returning the gradient vector; when ``None``, the
        gradient is computed by :py:func:`central_gradient`
    :param float step: step of the central differences
    """

    def __init__(self, value, gradient=None, step=1e-5):
        self.value = value
        self.gradient = gradient
        self.step = step

    def __call__(self, x):
        return self.value(np.asarray(x, dtype=float))

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        if self.gradient is not None:
            return np.asarray(self.gradient(x), dtype=float)
        return central_gradient(self.value, x, self.step)

def lie_poisson_bracket(f, g, state, level):
    """
    Evaluate the Lie-Poisson bracket ``{f, g} = grad(f)^T J grad(g)`` at
    ``state``.

    :param f: a :py:class:`ScalarField` (or any callable, whose gradient is then
        obtained by central differences)
    :param g: same as ``f``
    :param state: the phase point (see :py:func:`structure_matrix`)
    :param int level: hierarchy level
    """
    x = _triples(state)[:level + 1].ravel()
    if not isinstance(f, ScalarField):
        f = ScalarField(f)
    if not isinstance(g, ScalarField):
        g = ScalarField(g)
    J = structure_matrix(x, level)
    return float(f.grad(x) @ J @ g.grad(x))

#! /usr/bin/env python3

"""
Adaptive arclength integration with dense output and invariant bookkeeping,
and the reconstruction of the centreline and director frame from the strains.

The stepper is the embedded Runge-Kutta pair of order 5(4) of Dormand and
Prince, driven step by step through :py:class:`scipy.integrate.RK45`, so that
every accepted step can be inspected (non-finite values), post-processed
(Casimir projection, quaternion renormalisation) and recorded together with
its 4th-order continuous extension.
"""

import collections
import logging

import numpy as np
from scipy.integrate import RK45, DOP853, DenseOutput, OdeSolution
from scipy.spatial.transform import Rotation

from .exceptions import StepSizeUnderflow, NonFiniteState
from .hierarchy import strains
from .utils import LazyProperty, write_csv

logger = logging.getLogger(__name__)

__all__ = ["TOL_RANGE", "Trajectory", "ProjectedStep", "integrate", "FramedCurve", "reconstruct",
           "reconstruct_from_strains"]

TOL_RANGE = (1e-13, 1e-3)

METHODS = {
    "RK45": RK45,
    # reference runs only
    "DOP853": DOP853,
}

class Trajectory:
    """
    Record of one integration: the accepted arclength grid, the state
    snapshots, the per-step interpolants and optionally the invariant ledger of
    every snapshot.

    Instances are not modified after :py:func:`integrate` returns.
    """

    def __init__(self, s, y, interpolants, *, fun=None, tol=None, method=None, labels=None,
                 ledgers=None, metadata=None):
        self.s = np.asarray(s)
        self.y = np.asarray(y)
        self.interpolants = interpolants
        self.fun = fun
        self.tol = tol
        self.method = method
        if labels is None:
            labels = ["y{}".format(i) for i in range(self.y.shape[1])]
        self.labels = list(labels)
        self.ledgers = ledgers
        self.extra_metadata = dict(metadata or {})

    def __len__(self):
        return len(self.s)

    @property
    def steps(self):
        return len(self.s) - 1

    @LazyProperty
    def sol(self):
        """
        Continuous solution over the whole integration span, a
        :py:class:`scipy.integrate.OdeSolution`.
        """
        return OdeSolution(self.s, self.interpolants)

    def __call__(self, s):
        return self.sol(s)

    @LazyProperty
    def ledger_columns(self):
        """
        Ordered mapping of ledger column names to arrays over the snapshots.
        """
        columns = collections.OrderedDict()
        if not self.ledgers:
            return columns
        rows = [ledger.as_row() for ledger in self.ledgers]
        for name in rows[0]:
            columns[name] = np.array([row[name] for row in rows])
        return columns

    def drift(self):
        """
        Maximal deviation of every ledger column from its initial value.

        :returns: ordered mapping of column names to ``(absolute, relative)``
            pairs; the relative drift is taken with respect to
            ``max(|initial value|, 1)``
        """
        result = collections.OrderedDict()
        for name, values in self.ledger_columns.items():
            absolute = float(np.max(np.abs(values - values[0])))
            result[name] = (absolute, absolute / max(abs(float(values[0])), 1.0))
        return result

    def active_integrals(self):
        if not self.ledgers:
            return []
        return self.ledgers[0].active()

    def metadata(self):
        data = collections.OrderedDict()
        data["labels"] = self.labels
        data["s_span"] = [float(self.s[0]), float(self.s[-1])]
        data["steps"] = self.steps
        data["tol"] = self.tol
        data["method"] = self.method
        if self.ledgers:
            data["ledger_columns"] = list(self.ledger_columns)
            data["active_integrals"] = self.active_integrals()
        data.update(self.extra_metadata)
        return data

    def to_csv(self, path):
        """
        Write the snapshots (and ledger columns, if recorded) to ``path``.
        """
        columns = self.ledger_columns
        header = ["s"] + self.labels + list(columns)
        ledger_values = np.array(list(columns.values())).T if columns else np.empty((len(self.s), 0))

        def rows():
            for s, y, extra in zip(self.s, self.y, ledger_values):
                yield [float(s)] + [float(v) for v in y] + [float(v) for v in extra]

        write_csv(path, header, rows())
        logger.debug("Wrote {} snapshots to '{}'".format(len(self.s), path))

class ProjectedStep(DenseOutput):
    """
    Continuous extension of a step whose end point was moved by a post-step
    hook. The correction is blended in linearly, so the interpolant starts at
    the previous snapshot and ends at the post-processed one.
    """

    def __init__(self, raw, correction):
        super().__init__(raw.t_old, raw.t)
        self.raw = raw
        self.correction = correction

    def _call_impl(self, t):
        fraction = (t - self.t_old) / (self.t - self.t_old)
        return self.raw(t) + np.multiply.outer(self.correction, fraction)

def integrate(fun, y0, s_span, tol=1e-10, *, ledger=None, post_step=None, terminate=None,
              max_step=np.inf, first_step=None, method="RK45", labels=None, metadata=None):
    """
    Integrate ``y' = fun(s, y)`` over ``s_span`` with local error control.

    :param fun: right-hand side, ``fun(s, y) -> ndarray``
    :param y0: initial state vector
    :param s_span: pair ``(s0, s1)`` with ``s1 > s0``
    :param float tol: relative and absolute tolerance, within :py:data:`TOL_RANGE`
    :param ledger: optional callable mapping a state vector to an
        :py:class:`rh.hierarchy.InvariantLedger`, evaluated at every snapshot
    :param post_step: optional callable ``(s, y) -> y`` applied after every
        accepted step (projection, renormalisation); the step's interpolant
        is corrected to end at the post-processed state
    :param terminate: optional predicate ``(s_prev, y_prev, s, y) -> bool``
        stopping the integration after the current step
    :param max_step: upper bound of the step size
    :param first_step: initial step size, chosen automatically by default
    :param str method: ``"RK45"`` or ``"DOP853"`` (reference runs)
    :returns: :py:class:`Trajectory`
    :raises StepSizeUnderflow: when the step size becomes too small
    :raises NonFiniteState: when the state or the vector field is not finite
    """
    if not TOL_RANGE[0] <= tol <= TOL_RANGE[1]:
        raise ValueError("tolerance {!r} outside of the allowed range [{}, {}]".format(tol, *TOL_RANGE))
    s0, s1 = (float(v) for v in s_span)
    if not (np.isfinite(s0) and np.isfinite(s1)) or s1 <= s0:
        raise ValueError("invalid arclength span {!r}".format(s_span))
    try:
        solver_class = METHODS[method]
    except KeyError:
        raise ValueError("unknown integration method '{}' (available: {})".format(method, ", ".join(METHODS)))

    y0 = np.array(y0, dtype=float)
    _check_finite(s0, y0)

    def checked_fun(s, y):
        f = fun(s, y)
        _check_finite(s, f)
        return f

    solver = solver_class(checked_fun, s0, y0, s1, rtol=tol, atol=tol, max_step=max_step,
                          first_step=first_step)

    ss = [s0]
    ys = [y0]
    interpolants = []
    while solver.status == "running":
        solver.step()
        if solver.status == "failed":
            raise StepSizeUnderflow(solver.t)
        s = solver.t
        y = solver.y
        _check_finite(s, y)
        interpolant = solver.dense_output()
        if post_step is not None:
            raw = np.array(y)
            y = np.asarray(post_step(s, y), dtype=float)
            solver.y = y
            solver.f = solver.fun(s, y)
            interpolant = ProjectedStep(interpolant, y - raw)
        interpolants.append(interpolant)
        ss.append(s)
        ys.append(np.array(y))
        if terminate is not None and terminate(ss[-2], ys[-2], s, ys[-1]):
            logger.debug("Integration terminated at s = {}".format(s))
            break

    logger.debug("Integrated over [{}, {}] in {} steps ({} evaluations)".format(ss[0], ss[-1], len(ss) - 1, solver.nfev))

    ys = np.array(ys)
    ledgers = [ledger(y) for y in ys] if ledger is not None else None
    return Trajectory(ss, ys, interpolants, fun=fun, tol=tol, method=method, labels=labels,
                      ledgers=ledgers, metadata=metadata)

def _check_finite(s, y):
    finite = np.isfinite(y)
    if not np.all(finite):
        component = int(np.flatnonzero(~finite)[0])
        raise NonFiniteState(s, component)


def _third_director(q):
    # R e3 for the (not necessarily normalised) scalar-last quaternion q
    x, y, z, w = q / np.linalg.norm(q)
    return np.array([2 * (x*z + w*y), 2 * (y*z - w*x), 1 - 2 * (x*x + y*y)])

def _normalise_quaternion(s, y):
    y = np.array(y)
    y[:4] /= np.linalg.norm(y[:4])
    return y

class FramedCurve:
    """
    Centreline ``r(s)`` and director frame of a rod, the frame being carried by
    unit quaternions in the scalar-last convention of
    :py:class:`scipy.spatial.transform.Rotation` with ``d_i = R e_i``.
    """

    def __init__(self, trajectory):
        self.trajectory = trajectory

    @property
    def s(self):
        return self.trajectory.s

    @property
    def r(self):
        return self.trajectory.y[:, 4:7]

    @property
    def q(self):
        return self.trajectory.y[:, :4]

    def positions(self, s):
        return np.asarray(self.trajectory(s))[4:7].T

    def quaternions(self, s):
        q = np.asarray(self.trajectory(s))[:4].T
        return q / np.linalg.norm(q, axis=-1, keepdims=True)

    def directors(self, s):
        """
        Rotation matrices at ``s``; the columns are the directors ``d1, d2, d3``.
        """
        return Rotation.from_quat(self.quaternions(s)).as_matrix()

    def curvature(self, s, h=1e-3):
        """
        Curvature of the centreline, ``|d3'|``, by central differences.
        """
        d3p = self.directors(np.asarray(s) + h)[..., :, 2]
        d3m = self.directors(np.asarray(s) - h)[..., :, 2]
        return np.linalg.norm(d3p - d3m, axis=-1) / (2 * h)

    def _centreline_derivatives(self, s, h):
        s = np.asarray(s)
        r = self.positions
        r1 = (r(s + h) - r(s - h)) / (2 * h)
        r2 = (r(s + h) - 2 * r(s) + r(s - h)) / h**2
        r3 = (r(s + 2 * h) - 2 * r(s + h) + 2 * r(s - h) - r(s - 2 * h)) / (2 * h**3)
        return r1, r2, r3

    def centreline_curvature(self, s, h=1e-2):
        """
        Curvature ``|r' x r''| / |r'|^3`` of the centreline, from central
        differences of the positions.
        """
        r1, r2, _ = self._centreline_derivatives(s, h)
        return np.linalg.norm(np.cross(r1, r2), axis=-1) / np.linalg.norm(r1, axis=-1)**3

    def torsion(self, s, h=1e-2):
        """
        Torsion ``(r' x r'') . r''' / |r' x r''|^2`` of the centreline, from
        central differences of the positions.
        """
        r1, r2, r3 = self._centreline_derivatives(s, h)
        b = np.cross(r1, r2)
        return np.sum(b * r3, axis=-1) / np.sum(b * b, axis=-1)

    def twist(self, s, h=1e-3):
        """
        Material twist ``d2 . d1'`` by central differences.
        """
        s = np.asarray(s)
        d1p = self.directors(s + h)[..., :, 0]
        d1m = self.directors(s - h)[..., :, 0]
        d2 = self.directors(s)[..., :, 1]
        return np.sum(d2 * (d1p - d1m), axis=-1) / (2 * h)

    def quaternion_norm_defect(self):
        return float(np.max(np.abs(np.linalg.norm(self.q, axis=1) - 1)))

    def orthonormality_defect(self):
        R = Rotation.from_quat(self.q).as_matrix()
        RtR = np.einsum("nji,njk->nik", R, R)
        return float(np.max(np.abs(RtR - np.eye(3))))

    def inextensibility_defect(self, h=1e-4):
        s = self.s[1:-1]
        s = s[(s - h > self.s[0]) & (s + h < self.s[-1])]
        if not len(s):
            return 0.0
        rp = (self.positions(s + h) - self.positions(s - h)) / (2 * h)
        return float(np.max(np.abs(np.linalg.norm(rp, axis=-1) - 1)))

    def collinearity_defect(self):
        """
        Largest distance of the centreline points from the straight line through
        ``r(s0)`` along ``d3(s0)``.
        """
        d3 = Rotation.from_quat(self.q[0]).as_matrix()[:, 2]
        rel = self.r - self.r[0]
        return float(np.max(np.linalg.norm(np.cross(rel, d3), axis=1)))

def reconstruct_from_strains(u, s_span, frame0=None, r0=None, tol=1e-10, **kwargs):
    """
    Integrate the frame kinematics ``d_i' = u x d_i`` and ``r' = d3`` for the
    body-frame strains ``u(s)``.

    :param u: callable returning the strain triple at arclength ``s``
    :param s_span: pair ``(s0, s1)``
    :param frame0: initial rotation matrix (columns ``d1, d2, d3``), identity by default
    :param r0: initial centreline point, origin by default
    :returns: :py:class:`FramedCurve`
    """
    q0 = np.array([0.0, 0.0, 0.0, 1.0]) if frame0 is None else Rotation.from_matrix(frame0).as_quat()
    r0 = np.zeros(3) if r0 is None else np.asarray(r0, dtype=float)

    def fun(s, y):
        q = y[:4]
        v, w = q[:3], q[3]
        us = u(s)
        dq = np.empty(4)
        dq[:3] = 0.5 * (w * us + np.cross(v, us))
        dq[3] = -0.5 * (v @ us)
        return np.concatenate([dq, _third_director(q)])

    labels = ["q1", "q2", "q3", "q4", "r1", "r2", "r3"]
    trajectory = integrate(fun, np.concatenate([q0, r0]), s_span, tol, post_step=_normalise_quaternion,
                           labels=labels, **kwargs)
    return FramedCurve(trajectory)

def reconstruct(trajectory, params, frame0=None, r0=None, tol=1e-10, **kwargs):
    """
    Reconstruct the rod configuration along a body-frame trajectory whose first
    three components are the moment ``m``; the strains follow from
    :py:func:`rh.hierarchy.strains`.
    """
    def u(s):
        return strains(trajectory(s)[:3], params)
    return reconstruct_from_strains(u, (trajectory.s[0], trajectory.s[-1]), frame0, r0, tol, **kwargs)

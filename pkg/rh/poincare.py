#! /usr/bin/env python3

"""
Poincaré sections ``cos(psi) = alpha`` of the reduced, transversely isotropic
magnetic rod on fixed levels of the Hamiltonian, the integral ``I``, the
Casimirs and ``p_phi``.
"""

import collections
import logging
import os
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import cKDTree

from .exceptions import NoSeedFound, ReductionError
from .integrator import integrate
from .reduction import (CANONICAL_LABELS, CanonicalState, canonical_flow, canonical_ledger,
                        integral_I, reduced_hamiltonian, reduced_rhs)
from .utils import write_csv, write_json

logger = logging.getLogger(__name__)

__all__ = ["DIRECTIONS", "SectionSpec", "SectionPoint", "SectionPointSet", "LevelSetTargets",
           "find_crossings", "p_psi_window", "seed_on_level_set", "scan", "CURVE_THICKNESS"]

DIRECTIONS = ("increasing", "decreasing", "both")

# bisection steps on the dense output
BISECTION_ITERATIONS = 30
# tolerance of the mini-integration to a crossing
REFINE_TOL = 1e-13
# median principal-axis thickness below which a point set counts as a curve
CURVE_THICKNESS = 0.3
# residual accepted by the seeding
SEED_TOL = 1e-10
# minimal width of the p_psi window scanned below p_psi_max
P_PSI_SCAN = 20.0

@dataclass(frozen=True)
class SectionSpec:
    alpha: float
    direction: str = "both"
    max_crossings: int = 200
    max_arclength: float = 1000.0

    def __post_init__(self):
        if not -1 < self.alpha < 1:
            raise ValueError("the section cos(psi) = alpha needs |alpha| < 1, got {!r}".format(self.alpha))
        if self.direction not in DIRECTIONS:
            raise ValueError("unknown crossing direction '{}' (available: {})".format(self.direction, ", ".join(DIRECTIONS)))
        if self.max_crossings < 1:
            raise ValueError("max_crossings must be positive")
        if not self.max_arclength > 0:
            raise ValueError("max_arclength must be positive")

    def accepts(self, g0, g1):
        """
        Whether the section function changes sign between ``g0`` and ``g1`` in
        the requested direction. ``g`` is ``cos(psi) - alpha``.
        """
        increasing = g0 < 0 <= g1
        decreasing = g0 > 0 >= g1
        if self.direction == "increasing":
            return increasing
        elif self.direction == "decreasing":
            return decreasing
        return increasing or decreasing

@dataclass(frozen=True)
class SectionPoint:
    s: float
    state: np.ndarray
    residual: float
    increasing: bool

    @property
    def theta(self):
        return float(self.state[0])

    @property
    def p_theta(self):
        return float(self.state[3])

class SectionPointSet:
    """
    Crossings of one orbit, ordered by arclength.
    """

    def __init__(self, points, orbit_id=0, spec=None):
        self.points = list(points)
        self.orbit_id = orbit_id
        self.spec = spec

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def s(self):
        return np.array([p.s for p in self.points])

    @property
    def theta(self):
        return np.array([p.theta for p in self.points])

    @property
    def p_theta(self):
        return np.array([p.p_theta for p in self.points])

    @property
    def residuals(self):
        return np.array([p.residual for p in self.points])

    def coordinates(self):
        return np.column_stack([self.theta, self.p_theta]) if self.points else np.empty((0, 2))

    def thickness(self, k=6):
        """
        Median over the points of the ratio of the minor to the major principal
        axis of their ``k`` nearest neighbours in the ``(theta, p_theta)`` plane.

        Points on a smooth curve give small values; area-filling scatter gives
        values of order one. Repeated points count as zero thickness.
        """
        xy = self.coordinates()
        if len(xy) <= k:
            raise ValueError("need more than {} points, got {}".format(k, len(xy)))
        tree = cKDTree(xy)
        _, neighbours = tree.query(xy, k=k + 1)
        ratios = []
        for idx in neighbours:
            local = xy[idx] - xy[idx].mean(axis=0)
            sv = np.linalg.svd(local, compute_uv=False)
            ratios.append(sv[1] / sv[0] if sv[0] > 0 else 0.0)
        return float(np.median(ratios))

    def branches(self):
        """
        Split the crossings by the branch ``sign(sin(psi))`` of the section and
        by the crossing direction. For an orbit on an invariant torus each part
        lies on a single curve.

        :returns: ordered mapping of ``(upper_branch, increasing)`` to
            :py:class:`SectionPointSet`
        """
        parts = collections.OrderedDict()
        for p in self.points:
            key = (bool(np.sin(p.state[1]) >= 0), p.increasing)
            parts.setdefault(key, []).append(p)
        return collections.OrderedDict((key, SectionPointSet(points, self.orbit_id, self.spec))
                                       for key, points in parts.items())

    def max_gap(self):
        """
        Largest nearest-neighbour distance among the points.
        """
        xy = self.coordinates()
        if len(xy) < 2:
            return float("inf")
        distances, _ = cKDTree(xy).query(xy, k=2)
        return float(np.max(distances[:, 1]))

    def rows(self):
        for p in self.points:
            yield [self.orbit_id, p.s, p.theta, p.p_theta, p.residual]

    def to_csv(self, path):
        write_csv(path, ["orbit_id", "s", "theta", "p_theta", "residual"], self.rows())

@dataclass(frozen=True)
class LevelSetTargets:
    H: float
    I: float
    casimirs: object
    p_phi: float

    def as_dict(self):
        return {"H": self.H, "I": self.I, "casimirs": self.casimirs.as_dict(), "p_phi": self.p_phi}

def _section_value(y, alpha):
    return np.cos(y[1]) - alpha

def _advance(fun, y, s, delta):
    """
    Flow ``y`` from ``s`` by ``delta`` (of either sign) with the tight
    refinement tolerance.
    """
    if delta > 0:
        return integrate(fun, y, (s, s + delta), REFINE_TOL, method="DOP853").y[-1]

    def reversed_fun(t, z):
        return -fun(-t, z)

    return integrate(reversed_fun, y, (-s, -s - delta), REFINE_TOL, method="DOP853").y[-1]

def _refine(traj, i, alpha, cas, params):
    """
    Locate the crossing inside step ``i`` of the trajectory: bisection on the
    dense output, a mini-integration from the step's start to the bracketed
    point and a Newton correction along the flow.
    """
    a, b = traj.s[i], traj.s[i + 1]
    ga = _section_value(traj.y[i], alpha)
    for _ in range(BISECTION_ITERATIONS):
        mid = 0.5 * (a + b)
        gm = _section_value(traj(mid), alpha)
        if (gm < 0) == (ga < 0):
            a, ga = mid, gm
        else:
            b = mid
    s_star = 0.5 * (a + b)

    y = np.array(traj.y[i])
    if s_star > traj.s[i]:
        y = _advance(traj.fun, y, traj.s[i], s_star - traj.s[i])

    for _ in range(2 if cas is not None else 0):
        g = _section_value(y, alpha)
        dg = -np.sin(y[1]) * reduced_rhs(y, cas, params)[1]
        if dg == 0:
            break
        delta = -g / dg
        if s_star + delta == s_star:
            break
        y = _advance(traj.fun, y, s_star, delta)
        s_star += delta
    return s_star, y

def find_crossings(traj, spec, cas=None, params=None):
    """
    Crossings of the reduced trajectory ``traj`` with the section ``spec``.

    Sign changes of ``cos(psi) - alpha`` are bracketed per accepted step, so a
    step crossing the section twice is missed; the step sizes of the reduced
    flow keep ``psi`` from advancing that far.

    With the Casimirs ``cas`` and the stiffnesses ``params`` of the flow, every
    crossing is further polished by Newton steps along the reduced vector field.

    :returns: :py:class:`SectionPointSet` (possibly empty)
    """
    points = []
    g = np.cos(traj.y[:, 1]) - spec.alpha
    for i in range(len(g) - 1):
        if not spec.accepts(g[i], g[i + 1]):
            continue
        s_star, y = _refine(traj, i, spec.alpha, cas, params)
        points.append(SectionPoint(float(s_star), np.array(y), float(abs(np.cos(y[1]) - spec.alpha)), bool(g[i] < 0)))
        if len(points) >= spec.max_crossings:
            break
    return SectionPointSet(points, spec=spec)

def _p_psi_roots(F, lower, upper, samples=400):
    grid = np.linspace(lower, upper, samples)
    values = np.array([F(p) for p in grid])
    roots = []
    for k in range(samples - 1):
        f0, f1 = values[k], values[k + 1]
        if not (np.isfinite(f0) and np.isfinite(f1)):
            continue
        if f0 == 0:
            roots.append(grid[k])
        elif f0 * f1 < 0:
            try:
                roots.append(brentq(F, grid[k], grid[k + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps))
            except ValueError:
                continue
    return roots

def p_psi_window(H_target, cas, p_phi, params):
    """
    Interval of ``p_psi`` values that can lie on the energy level ``H_target``
    for some ``theta`` and ``psi``.

    The upper end is the chart boundary ``p_psi_max``. Below it the energy
    bound ``(|p_psi| - |p_phi|)^2 / (2 K) <= H - p_phi^2 / (2 K3) + |v_par| + v_perp``
    eventually fails, since ``v_perp`` only grows like ``sqrt(|p_psi|)``. The
    window is at least :py:data:`P_PSI_SCAN` wide.
    """
    K, K3 = params.K, params.K3
    p_max = cas.p_psi_max
    energy = max(H_target - p_phi**2 / (2 * K3) + abs(cas.v_parallel), 0.0)

    def feasible(p_psi):
        X = max(abs(p_psi) - abs(p_phi), 0.0)
        return X**2 / (2 * K) <= energy + np.sqrt(max(cas.radicand(p_psi), 0.0))

    width = 1.0
    while feasible(p_max - width):
        width *= 2
    return min(p_max - width, p_max - P_PSI_SCAN), p_max

def seed_on_level_set(H_target, I_target, cas, p_phi, params, n_seeds, rng_seed, max_attempts=None):
    """
    Deterministic pseudo-random search for points of the level set
    ``{H = H_target, I = I_target}`` with the given Casimirs and ``p_phi``.

    Every attempt samples ``theta``, ``psi`` and the sign of ``p_theta``. On the
    energy level ``p_theta`` then follows from ``p_psi`` in closed form, and
    ``p_psi`` is found from the ``I`` constraint by a grid scan over the chart
    (non-negative radicand) followed by :py:func:`scipy.optimize.brentq`.
    Every returned seed satisfies both targets within ``1e-10``.

    :raises NoSeedFound: if fewer than ``n_seeds`` seeds were found within
        ``max_attempts`` attempts
    """
    rng = np.random.default_rng(rng_seed)
    if max_attempts is None:
        max_attempts = 200 * n_seeds
    K, K3 = params.K, params.K3
    lower, p_max = p_psi_window(H_target, cas, p_phi, params)
    seeds = []
    attempts = 0

    while len(seeds) < n_seeds and attempts < max_attempts:
        attempts += 1
        theta = rng.uniform(0.05, np.pi - 0.05)
        psi = rng.uniform(-np.pi, np.pi)
        sign = 1.0 if rng.random() < 0.5 else -1.0
        st, ct = np.sin(theta), np.cos(theta)

        def p_theta_of(p_psi):
            X = (p_psi - ct * p_phi) / st
            V = np.sqrt(max(cas.radicand(p_psi), 0.0))
            potential = X**2 / (2 * K) + p_phi**2 / (2 * K3) + cas.v_parallel * ct + V * st * np.cos(psi)
            kinetic = H_target - potential
            if kinetic < 0:
                return np.nan
            return sign * np.sqrt(2 * K * kinetic)

        def residual(p_psi):
            p_theta = p_theta_of(p_psi)
            if not np.isfinite(p_theta):
                return np.nan
            return integral_I((theta, psi, 0.0, p_theta, p_psi, p_phi), cas, params) - I_target

        roots = _p_psi_roots(residual, lower, p_max)
        for p_psi in roots:
            c = CanonicalState(theta, psi, 0.0, float(p_theta_of(p_psi)), float(p_psi), p_phi)
            try:
                H = reduced_hamiltonian(c, cas, params)
                I = integral_I(c, cas, params)
            except ReductionError:
                continue
            if not np.isfinite(c.p_theta):
                continue
            if abs(H - H_target) <= SEED_TOL and abs(I - I_target) <= SEED_TOL:
                seeds.append(c)
                break

    if len(seeds) < n_seeds:
        raise NoSeedFound(attempts, len(seeds))
    logger.debug("Found {} seeds in {} attempts".format(len(seeds), attempts))
    return seeds

def _as_vector(seed):
    if isinstance(seed, CanonicalState):
        return seed.as_array()
    return np.asarray(seed, dtype=float)

def _crossing_counter(spec):
    count = [0]

    def terminate(s0, y0, s1, y1):
        if spec.accepts(np.cos(y0[1]) - spec.alpha, np.cos(y1[1]) - spec.alpha):
            count[0] += 1
        return count[0] >= spec.max_crossings

    return terminate

def scan(spec, targets, seeds, params, tol=1e-11, output_dir=None, rng_seed=None):
    """
    Integrate every seed until ``spec.max_crossings`` crossings or
    ``spec.max_arclength`` and collect the section points of each orbit.

    When ``output_dir`` is given, ``orbit-<id>.csv`` is written for every orbit
    together with ``manifest.json``.

    :returns: list of :py:class:`SectionPointSet`, one per seed, in seed order
    """
    cas = targets.casimirs
    fun = canonical_flow(cas, params)
    ledger = canonical_ledger(cas, params)
    results = []
    for orbit_id, seed in enumerate(seeds):
        y0 = _as_vector(seed)
        traj = integrate(fun, y0, (0.0, spec.max_arclength), tol, terminate=_crossing_counter(spec),
                         labels=CANONICAL_LABELS)
        points = find_crossings(traj, spec, cas, params)
        points.orbit_id = orbit_id
        H0, I0 = ledger(y0).hamiltonian, ledger(y0).I
        drift = max([0.0] + [max(abs(reduced_hamiltonian(p.state, cas, params) - H0),
                                 abs(integral_I(p.state, cas, params) - I0)) for p in points])
        logger.info("Orbit {}: {} crossings up to s = {:.6g}, invariant drift {:.3g}".format(orbit_id, len(points), traj.s[-1], drift))
        results.append(points)

    if output_dir is not None:
        manifest = collections.OrderedDict()
        manifest["section"] = {"alpha": spec.alpha, "direction": spec.direction,
                               "max_crossings": spec.max_crossings, "max_arclength": spec.max_arclength}
        manifest["targets"] = targets.as_dict()
        manifest["params"] = params.as_dict()
        manifest["tol"] = tol
        manifest["rng_seed"] = rng_seed
        manifest["seeds"] = [CanonicalState.from_array(_as_vector(s)).as_dict() for s in seeds]
        manifest["orbits"] = []
        for points in results:
            filename = "orbit-{}.csv".format(points.orbit_id)
            points.to_csv(os.path.join(output_dir, filename))
            manifest["orbits"].append({"orbit_id": points.orbit_id, "file": filename, "crossings": len(points)})
        write_json(os.path.join(output_dir, "manifest.json"), manifest)
    return results

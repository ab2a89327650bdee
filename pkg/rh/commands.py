#! /usr/bin/env python3

"""
Command classes of the executable scripts. Every command reads a JSON run
configuration (see :py:mod:`rh.runconfig`), writes its CSV and JSON artifacts
into the output directory and prints a short summary on the standard output.

Exit statuses: 0 on success, 1 when a verification fails, 2 for configuration
errors and 3 for numerical failures.
"""

import collections
import logging
import os

import numpy as np

from .config import argtype_existing_file, argtype_comma_list_choices
from .exceptions import ConfigError, NumericalError
from .hierarchy import (FieldState, MODEL_NAMES, body_flow, body_ledger, casimir_projection, casimirs,
                        hamiltonian, rhs, state_labels)
from .integrator import integrate, reconstruct
from .lax import (LaxOperator, consistency_defect, lax_equations, lax_hamiltonian, residue_casimirs_as_hierarchy,
                  residue_invariants, spectrum)
from .poincare import CURVE_THICKNESS, LevelSetTargets, scan, seed_on_level_set
from .reduction import (CANONICAL_LABELS, canonical_flow, canonical_ledger, from_canonical, integral_I,
                        reduced_hamiltonian, to_canonical, verify_canonical)
from .runconfig import RunConfig
from .utils import write_json
from .verify import SUITES, run_suites

logger = logging.getLogger(__name__)

__all__ = ["Command", "Simulate", "Reduce", "Poincare", "LaxCheck", "Verify"]

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

class Command:
    """
    Base class of the commands. Subclasses set :py:attr:`name` and implement
    :py:meth:`execute`, which returns an exit status.
    """

    name = None

    def __init__(self, config_path, output_dir):
        self.config_path = config_path
        self.output_dir = output_dir
        self.config = None

    @staticmethod
    def set_argparser(argparser):
        group = argparser.add_argument_group(title="run parameters")
        group.add_argument("run_config", metavar="RUN_CONFIG", type=argtype_existing_file,
                help="path to the JSON run configuration")

    @classmethod
    def from_argparser(klass, args):
        return klass(args.run_config, args.output_dir)

    def load_config(self):
        config = RunConfig.from_json(self.config_path)
        if config.command != self.name:
            raise ConfigError("command", "expected '{}', got '{}'".format(self.name, config.command))
        return config

    def output_path(self, suffix):
        return os.path.join(self.output_dir, "{}-{}".format(self.config.prefix, suffix))

    def run(self):
        try:
            if not os.access(self.output_dir, os.W_OK):
                raise ConfigError("output", "directory '{}' is not writable".format(self.output_dir))
            self.config = self.load_config()
            return self.execute()
        except ConfigError as e:
            logger.error("Invalid run configuration: {}".format(e))
            return EXIT_CONFIG
        except NumericalError as e:
            logger.error("Numerical failure: {}".format(e))
            return EXIT_NUMERICAL

    def execute(self):
        raise NotImplementedError

    def initial_state(self):
        """
        The body-frame initial state, converted from canonical variables if
        necessary.
        """
        config = self.config
        if config.state is not None:
            return config.state
        return from_canonical(config.canonical, config.casimirs, config.params)

    def require_isotropic(self):
        if not self.config.params.is_isotropic:
            raise ConfigError("params.K2", "the '{}' command needs K1 = K2".format(self.name))

def _print_table(rows):
    width = max(len(str(row[0])) for row in rows)
    for name, *values in rows:
        print("{:{}}  {}".format(name, width, "  ".join("{:.6e}".format(v) if isinstance(v, float) else str(v) for v in values)))

class Simulate(Command):
    """
    Integrate a hierarchy model from an initial body state and record the
    trajectory together with its invariant ledger.
    """

    name = "simulate"

    @staticmethod
    def set_argparser(argparser):
        Command.set_argparser(argparser)
        group = argparser.add_argument_group(title="output")
        group.add_argument("--reconstruct", action="store_true",
                help="also integrate the centreline and director frame of the rod")

    @classmethod
    def from_argparser(klass, args):
        return klass(args.run_config, args.output_dir, args.reconstruct)

    def __init__(self, config_path, output_dir, reconstruct=False):
        super().__init__(config_path, output_dir)
        self.reconstruct = reconstruct

    def execute(self):
        config = self.config
        state = self.initial_state()
        level = state.level
        post_step = casimir_projection(state) if config.project_casimirs else None
        logger.info("Integrating the {} rod over [{}, {}]".format(MODEL_NAMES[level], *config.s_span))

        traj = integrate(body_flow(level, config.params), state.vector, config.s_span, config.tol,
                         ledger=body_ledger(level, config.params), post_step=post_step,
                         labels=state_labels(level), metadata=config.metadata())
        traj.to_csv(self.output_path("trajectory.csv"))

        drift = traj.drift()
        manifest = traj.metadata()
        manifest["drift"] = {name: {"absolute": a, "relative": r} for name, (a, r) in drift.items()}

        if self.reconstruct:
            curve = reconstruct(traj, config.params, tol=config.tol)
            curve.trajectory.to_csv(self.output_path("curve.csv"))
            manifest["curve"] = {
                "quaternion_norm_defect": curve.quaternion_norm_defect(),
                "orthonormality_defect": curve.orthonormality_defect(),
                "inextensibility_defect": curve.inextensibility_defect(),
            }
        write_json(self.output_path("manifest.json"), manifest)

        print("{} steps, active integrals: {}".format(traj.steps, ", ".join(traj.active_integrals()) or "none"))
        _print_table([("invariant", "abs drift", "rel drift")] + [(name, a, r) for name, (a, r) in drift.items()])
        return EXIT_OK

class Reduce(Command):
    """
    Convert a magnetic rod state between body and canonical variables and
    optionally integrate the reduced equations.
    """

    name = "reduce"

    def execute(self):
        config = self.config
        if config.state is not None:
            if config.state.level != 2:
                raise ConfigError("level", "the canonical reduction needs level 2")
            state = config.state
            c, cas = to_canonical(state)
        else:
            c, cas = config.canonical, config.casimirs
            state = from_canonical(c, cas, config.params)

        report = collections.OrderedDict()
        report["canonical"] = c.as_dict()
        report["casimirs"] = cas.as_dict()
        report["body"] = {name: list(getattr(state, name)) for name in ("m", "n", "B")}
        report["H_body"] = hamiltonian(state, config.params)
        report["H_reduced"] = reduced_hamiltonian(c, cas, config.params)
        if config.params.is_isotropic:
            report["I"] = integral_I(c, cas, config.params)
        report["canonicality_defect"] = verify_canonical(state)

        if config.s_span is not None:
            self.require_isotropic()
            traj = integrate(canonical_flow(cas, config.params), c.as_array(), config.s_span, config.tol,
                             ledger=canonical_ledger(cas, config.params), labels=CANONICAL_LABELS,
                             metadata=config.metadata())
            traj.to_csv(self.output_path("reduced.csv"))
            report["drift"] = {name: {"absolute": a, "relative": r} for name, (a, r) in traj.drift().items()}

        report.update(config.metadata())
        write_json(self.output_path("report.json"), report)
        rows = [(label, value) for label, value in c.as_dict().items()]
        rows += [("H", report["H_reduced"]), ("G J G^T defect", report["canonicality_defect"])]
        if "I" in report:
            rows.append(("I", report["I"]))
        _print_table(rows)
        return EXIT_OK

class Poincare(Command):
    """
    Seed orbits on a level set of the reduced magnetic rod and collect their
    crossings with the section ``cos(psi) = alpha``.
    """

    name = "poincare"

    def execute(self):
        config = self.config
        self.require_isotropic()
        t = config.targets
        targets = LevelSetTargets(t.H, t.I, t.casimirs, t.p_phi)
        seeds = seed_on_level_set(t.H, t.I, t.casimirs, t.p_phi, config.params, t.n_seeds, config.rng_seed)

        output_dir = os.path.join(self.output_dir, config.prefix)
        os.makedirs(output_dir, exist_ok=True)
        orbits = scan(config.section, targets, seeds, config.params, config.tol, output_dir=output_dir,
                      rng_seed=config.rng_seed)

        rows = [("orbit", "crossings", "thickness")]
        for points in orbits:
            # each branch of the section is checked separately
            values = [branch.thickness() for branch in points.branches().values() if len(branch) > 6]
            thickness = max(values) if values else float("nan")
            rows.append(("orbit-{}".format(points.orbit_id), len(points), thickness))
            if thickness >= CURVE_THICKNESS:
                logger.warning("Orbit {} does not look like a curve (thickness {:.3g})".format(points.orbit_id, thickness))
        _print_table(rows)
        return EXIT_OK

class LaxCheck(Command):
    """
    Compare the Lax formulation with the equations of motion and follow the
    residue invariants and the spectrum along the flow.
    """

    name = "lax-check"

    def execute(self):
        config = self.config
        self.require_isotropic()
        params = config.params
        state = self.initial_state()
        op = LaxOperator.from_state(state, params.K)
        inv = residue_invariants(op)

        report = collections.OrderedDict()
        report["coefficient_match"] = float(np.max(np.abs(lax_equations(state, params).vector - rhs(state, params).vector)))
        report["consistency_defect"] = consistency_defect(state, params)
        report["residue_invariants"] = inv.as_dict()
        report["lax_hamiltonian"] = lax_hamiltonian(inv, params)
        report["hamiltonian"] = hamiltonian(state, params)
        report["casimir_mismatch"] = float(np.max(np.abs(np.array(residue_casimirs_as_hierarchy(inv)) - np.array(casimirs(state)))))

        if config.s_span is not None:
            traj = integrate(body_flow(state.level, params), state.vector, config.s_span, config.tol,
                             labels=state_labels(state.level))
            spectrum0 = spectrum(op)
            values0 = np.array(list(inv.as_dict().values()))
            invariant_drift = 0.0
            spectral_drift = 0.0
            for y in traj.y:
                op_s = LaxOperator.from_state(FieldState.from_vector(state.level, y), params.K)
                values = np.array(list(residue_invariants(op_s).as_dict().values()))
                invariant_drift = max(invariant_drift, float(np.max(np.abs(values - values0))))
                spectral_drift = max(spectral_drift, float(np.max(np.abs(spectrum(op_s) - spectrum0))))
            report["residue_drift"] = invariant_drift
            report["isospectral_drift"] = spectral_drift

        report.update(config.metadata())
        write_json(self.output_path("report.json"), report)
        _print_table([(name, value) for name, value in report.items() if isinstance(value, float)])
        return EXIT_OK

class Verify(Command):
    """
    Run verification suites and write a machine-readable report.
    """

    name = "verify"

    def __init__(self, config_path, output_dir, suites=None):
        super().__init__(config_path, output_dir)
        self.suites = list(suites or SUITES)

    @staticmethod
    def set_argparser(argparser):
        group = argparser.add_argument_group(title="verification")
        group.add_argument("--suites", type=argtype_comma_list_choices(SUITES), default=list(SUITES),
                metavar="SUITE[,SUITE...]",
                help="comma-separated list of suites to run (default: all of {})".format(", ".join(SUITES)))
        group.add_argument("--run-config", type=argtype_existing_file, metavar="PATH",
                help="optional JSON run configuration with 'samples' and 'rng_seed'")

    @classmethod
    def from_argparser(klass, args):
        return klass(args.run_config, args.output_dir, args.suites)

    def load_config(self):
        if self.config_path is None:
            return None
        return super().load_config()

    def output_path(self, suffix):
        prefix = self.config.prefix if self.config is not None else self.name
        return os.path.join(self.output_dir, "{}-{}".format(prefix, suffix))

    def execute(self):
        rng_seed = self.config.rng_seed if self.config is not None else 0
        samples = self.config.samples if self.config is not None else 50
        results = run_suites(self.suites, rng_seed, samples)

        report = collections.OrderedDict()
        report["rng_seed"] = rng_seed
        report["samples"] = samples
        report["passed"] = all(result.passed for result in results)
        report["suites"] = [result.as_dict() for result in results]
        write_json(self.output_path("report.json"), report)

        for result in results:
            print("{:10} {}".format(result.name, "passed" if result.passed else "FAILED"))
            for name, (value, threshold) in result.defects.items():
                print("    {:22} {:.3e} < {:.0e}".format(name, value, threshold))
        return EXIT_OK if report["passed"] else EXIT_FAILED

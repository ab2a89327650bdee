#! /usr/bin/env python3

"""
JSON run configurations of the command-line tools.

Everything numeric about a run (stiffnesses, initial state, tolerances,
sections, targets) is read from a JSON document, so that the document together
with the ``rng_seed`` fully determines the artifacts of the run. Command-line
flags only select paths and verification suites.

Example::

    {
        "command": "simulate",
        "level": 2,
        "params": {"K1": 1, "K2": 1, "K3": 0.75},
        "state": {"m": [0.1, 0.2, 0.3], "n": [0, 0.1, 1], "B": [0.2, 0, 1]},
        "tol": 1e-11,
        "s_span": [0, 100]
    }
"""

import json
import logging
import numbers
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigError, InvalidParams, LevelMismatch
from .hierarchy import FIELD_NAMES, FieldState, RodParams
from .integrator import TOL_RANGE
from .poincare import SectionSpec
from .reduction import CANONICAL_LABELS, CanonicalState, CasimirTriple
from .so3 import MAX_LEVEL

logger = logging.getLogger(__name__)

__all__ = ["COMMANDS", "RunConfig", "TargetsConfig"]

COMMANDS = ("simulate", "reduce", "poincare", "lax-check", "verify")

KNOWN_KEYS = {"command", "level", "params", "state", "canonical", "tol", "s_span", "section",
              "targets", "project_casimirs", "output", "rng_seed", "samples", "lambda"}

def _join(path, key):
    if isinstance(key, int):
        return "{}[{}]".format(path, key)
    return "{}.{}".format(path, key) if path else key

def _mapping(data, path, known=None):
    if not isinstance(data, dict):
        raise ConfigError(path, "expected an object, got {}".format(type(data).__name__))
    if known is not None:
        for key in data:
            if key not in known:
                raise ConfigError(_join(path, key), "unknown field")
    return data

def _required(data, key, path):
    if key not in data:
        raise ConfigError(_join(path, key), "missing required field")
    return data[key]

def _number(value, path):
    # bool is a subclass of int
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigError(path, "expected a number, got {!r}".format(value))
    value = float(value)
    if not np.isfinite(value):
        raise ConfigError(path, "expected a finite number, got {!r}".format(value))
    return value

def _integer(value, path, minimum=None, maximum=None):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ConfigError(path, "expected an integer, got {!r}".format(value))
    value = int(value)
    if minimum is not None and value < minimum:
        raise ConfigError(path, "must be at least {}, got {}".format(minimum, value))
    if maximum is not None and value > maximum:
        raise ConfigError(path, "must be at most {}, got {}".format(maximum, value))
    return value

def _vector(value, path, length):
    if not isinstance(value, list) or len(value) != length:
        raise ConfigError(path, "expected a list of {} numbers".format(length))
    return [_number(v, _join(path, i)) for i, v in enumerate(value)]

def _casimir_triple(data, path):
    data = _mapping(data, path, {"C1", "C2", "C3"})
    values = [_number(_required(data, key, path), _join(path, key)) for key in ("C1", "C2", "C3")]
    try:
        return CasimirTriple(*values)
    except ValueError as e:
        raise ConfigError(_join(path, "C3"), str(e))

@dataclass(frozen=True)
class TargetsConfig:
    H: float
    I: float
    casimirs: CasimirTriple
    p_phi: float
    n_seeds: int = 4

    @classmethod
    def from_dict(klass, data, path="targets"):
        data = _mapping(data, path, {"H", "I", "casimirs", "p_phi", "n_seeds"})
        H = _number(_required(data, "H", path), _join(path, "H"))
        I = _number(_required(data, "I", path), _join(path, "I"))
        cas = _casimir_triple(_required(data, "casimirs", path), _join(path, "casimirs"))
        p_phi = _number(_required(data, "p_phi", path), _join(path, "p_phi"))
        n_seeds = _integer(data.get("n_seeds", 4), _join(path, "n_seeds"), minimum=1)
        return klass(H, I, cas, p_phi, n_seeds)

@dataclass(frozen=True)
class RunConfig:
    """
    A validated run configuration. Use :py:meth:`from_json` or
    :py:meth:`from_dict`; both raise :py:exc:`rh.exceptions.ConfigError` with
    the dotted path of the first offending field.
    """
    command: str
    params: RodParams
    level: int = 2
    state: FieldState = None
    canonical: CanonicalState = None
    casimirs: CasimirTriple = None
    tol: float = 1e-10
    s_span: tuple = None
    section: SectionSpec = None
    targets: TargetsConfig = None
    project_casimirs: bool = False
    prefix: str = None
    rng_seed: int = 0
    samples: int = 50
    # recorded in the manifests, not used by any computation
    lambda_: float = None
    source: dict = field(default=None, repr=False, compare=False)

    @classmethod
    def from_json(klass, path):
        try:
            with open(path, "r") as f:
                data = json.load(f)
        except OSError as e:
            raise ConfigError("", "cannot read '{}': {}".format(path, e.strerror))
        except json.JSONDecodeError as e:
            raise ConfigError("", "'{}' is not valid JSON: {}".format(path, e))
        config = klass.from_dict(data)
        logger.debug("Loaded run configuration from '{}'".format(path))
        return config

    @classmethod
    def from_dict(klass, data):
        data = _mapping(data, "", KNOWN_KEYS)

        command = _required(data, "command", "")
        if command not in COMMANDS:
            raise ConfigError("command", "unknown command {!r} (available: {})".format(command, ", ".join(COMMANDS)))

        params_data = _mapping(_required(data, "params", ""), "params", {"K1", "K2", "K3"})
        stiffness = {key: _number(_required(params_data, key, "params"), _join("params", key)) for key in ("K1", "K2", "K3")}
        try:
            params = RodParams(**stiffness)
        except InvalidParams as e:
            bad = next((key for key, value in stiffness.items() if not value > 0), "")
            raise ConfigError(_join("params", bad) if bad else "params", str(e))

        if "state" in data and "canonical" in data:
            raise ConfigError("state", "give exactly one of 'state' and 'canonical'")

        level = _integer(data.get("level", 2), "level", minimum=0, maximum=MAX_LEVEL)
        state = canonical = cas = None
        if "state" in data:
            state = klass._parse_state(data["state"], level)
        elif "canonical" in data:
            if level != 2:
                raise ConfigError("level", "a canonical initial state needs level 2, got {}".format(level))
            canonical, cas = klass._parse_canonical(data["canonical"])
        elif command in ("simulate", "reduce", "lax-check"):
            raise ConfigError("state", "the '{}' command needs one of 'state' and 'canonical'".format(command))

        tol = _number(data.get("tol", 1e-10), "tol")
        if not TOL_RANGE[0] <= tol <= TOL_RANGE[1]:
            raise ConfigError("tol", "must lie in [{}, {}], got {!r}".format(*TOL_RANGE, tol))

        s_span = None
        if "s_span" in data:
            s_span = tuple(_vector(data["s_span"], "s_span", 2))
            if not s_span[1] > s_span[0]:
                raise ConfigError("s_span[1]", "must be greater than s_span[0]")
        elif command == "simulate":
            raise ConfigError("s_span", "missing required field")

        section = None
        if "section" in data:
            section = klass._parse_section(data["section"])
        elif command == "poincare":
            raise ConfigError("section", "missing required field")

        targets = None
        if "targets" in data:
            targets = TargetsConfig.from_dict(data["targets"])
        elif command == "poincare":
            raise ConfigError("targets", "missing required field")

        project = data.get("project_casimirs", False)
        if not isinstance(project, bool):
            raise ConfigError("project_casimirs", "expected true or false, got {!r}".format(project))

        prefix = command
        if "output" in data:
            output = _mapping(data["output"], "output", {"prefix"})
            prefix = output.get("prefix", command)
            if not isinstance(prefix, str) or not prefix or "/" in prefix:
                raise ConfigError("output.prefix", "expected a non-empty file name prefix, got {!r}".format(prefix))

        rng_seed = _integer(data.get("rng_seed", 0), "rng_seed", minimum=0)
        samples = _integer(data.get("samples", 50), "samples", minimum=1)
        lambda_ = _number(data["lambda"], "lambda") if "lambda" in data else None

        return klass(command, params, level, state, canonical, cas, tol, s_span, section, targets,
                     project, prefix, rng_seed, samples, lambda_, source=data)

    @staticmethod
    def _parse_state(data, level):
        data = _mapping(data, "state", set(FIELD_NAMES))
        triples = []
        for i, name in enumerate(FIELD_NAMES[:level + 1]):
            path = _join("state", name)
            if name not in data:
                if name == "m":
                    raise ConfigError(path, "missing required field")
                triples.append([0.0, 0.0, 0.0])
            else:
                triples.append(_vector(data[name], path, 3))
        for name in FIELD_NAMES[level + 1:]:
            if name in data:
                raise ConfigError(_join("state", name), "field not present at level {}".format(level))
        try:
            return FieldState(level, np.array(triples))
        except LevelMismatch as e:
            raise ConfigError("state", str(e))

    @staticmethod
    def _parse_canonical(data):
        data = _mapping(data, "canonical", set(CANONICAL_LABELS) | {"casimirs"})
        values = [_number(_required(data, key, "canonical"), _join("canonical", key)) for key in CANONICAL_LABELS]
        cas = _casimir_triple(_required(data, "casimirs", "canonical"), "canonical.casimirs")
        return CanonicalState(*values), cas

    @staticmethod
    def _parse_section(data):
        data = _mapping(data, "section", {"alpha", "direction", "max_crossings", "max_arclength"})
        alpha = _number(_required(data, "alpha", "section"), "section.alpha")
        if not -1 < alpha < 1:
            raise ConfigError("section.alpha", "must satisfy |alpha| < 1, got {!r}".format(alpha))
        direction = data.get("direction", "both")
        max_crossings = _integer(data.get("max_crossings", 200), "section.max_crossings", minimum=1)
        max_arclength = _number(data.get("max_arclength", 1000.0), "section.max_arclength")
        try:
            return SectionSpec(alpha, direction, max_crossings, max_arclength)
        except ValueError as e:
            key = "direction" if "direction" in str(e) else "max_arclength"
            raise ConfigError(_join("section", key), str(e))

    def metadata(self):
        """
        Plain data describing the run, written to the manifests.
        """
        data = {
            "command": self.command,
            "level": self.level,
            "params": self.params.as_dict(),
            "tol": self.tol,
            "rng_seed": self.rng_seed,
        }
        if self.s_span is not None:
            data["s_span"] = list(self.s_span)
        if self.lambda_ is not None:
            data["lambda"] = self.lambda_
        return data

#! /usr/bin/env python3

__all__ = ["RodError", "ConfigError", "InvalidParams", "LevelMismatch",
           "NumericalError", "IntegrationError", "StepSizeUnderflow", "NonFiniteState",
           "ReductionError", "AlignedState", "GimbalSingular", "NegativeRadicand",
           "NoSeedFound"]

class RodError(Exception):
    """
    Base class for all errors raised by the :py:mod:`rh` package.
    """
    pass


class ConfigError(RodError):
    """
    Raised when a run configuration does not validate.

    :param path: dotted path of the offending field, e.g. ``params.K2``
    :param message: human-readable description of the problem
    """
    def __init__(self, path, message):
        self.path = path
        self.message = message

    def __str__(self):
        if self.path:
            return "{}: {}".format(self.path, self.message)
        return self.message


class InvalidParams(RodError, ValueError):
    """
    Raised when the stiffnesses of a rod are not finite and strictly positive.
    """
    pass


class LevelMismatch(RodError, ValueError):
    """
    Raised when a state does not carry enough fields for the requested
    hierarchy level.
    """
    pass


class NumericalError(RodError):
    """
    Base class for failures of the numerical machinery.
    """
    pass


class IntegrationError(NumericalError):
    """
    Base class for errors raised while integrating a flow.
    """
    pass


class StepSizeUnderflow(IntegrationError):
    """
    Raised when the adaptive step size falls below the floating point
    resolution of the arclength.
    """
    def __init__(self, s):
        self.s = s

    def __str__(self):
        return "step size underflow at s = {!r}".format(self.s)


class NonFiniteState(IntegrationError):
    """
    Raised when the integrated state acquires a NaN or infinite component.
    """
    def __init__(self, s, component):
        self.s = s
        self.component = component

    def __str__(self):
        return "non-finite value in component {} at s = {!r}".format(self.component, self.s)


class ReductionError(NumericalError):
    """
    Base class for errors of the canonical coordinate chart.
    """
    pass


class AlignedState(ReductionError):
    """
    Raised when the force is parallel to the magnetic field, so the
    perpendicular part of the force and the angle psi are undefined.
    """
    pass


class GimbalSingular(ReductionError):
    """
    Raised when ``sin(theta)`` vanishes and the Euler-angle chart degenerates.
    """
    pass


class NegativeRadicand(ReductionError):
    """
    Raised when ``2 C1 - C2^2/C3 - 2 sqrt(C3) p_psi`` is negative.
    """
    def __init__(self, value):
        self.value = value

    def __str__(self):
        return "negative radicand for the perpendicular force: {!r}".format(self.value)


class NoSeedFound(NumericalError):
    """
    Raised when no point of the requested level set was found within the
    attempt budget.
    """
    def __init__(self, attempts, found=0):
        self.attempts = attempts
        self.found = found

    def __str__(self):
        return "found {} seeds after {} attempts".format(self.found, self.attempts)

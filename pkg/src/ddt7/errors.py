"""Exception taxonomy shared by all modules.

InputError maps to CLI exit code 2, NumericalError (and subclasses) to 3,
verification failures to 1.
"""


class InputError(ValueError):
    """Malformed or inconsistent input: wrong degree, dimension, backend, config."""


class NumericalError(RuntimeError):
    """A numerical procedure could not complete (singular solve, divergence)."""


class DegenerateMetricError(NumericalError):
    """theta(E) fell below tolerance: the configuration left the almost-calibrated set."""

    def __init__(self, message, point=None, theta=None):
        super().__init__(message)
        self.point = point
        self.theta = theta


class ObstructionError(NumericalError):
    """Topological obstruction: no solution exists in this Chern class."""

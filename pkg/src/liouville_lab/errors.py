"""Exception hierarchy.

Everything raised on purpose by the package derives from :class:`LabError`, so
the command-line layer can map it onto the "numerical failure" exit code.
"""


class LabError(Exception):
    """Base class for all deliberate failures."""


class InvalidParams(LabError, ValueError):
    pass


class DegenerateExponents(LabError, ValueError):
    """pq = 1: the scaling exponents have a vanishing denominator."""


class NotSubcritical(LabError):
    pass


class NoEpsilonFound(LabError):
    pass


class NoSolution(LabError):
    pass


class NegativeBase(LabError, ValueError):
    """A non-integer power of a negative value was requested."""


class StepUnderflow(LabError):
    pass


class InvalidBracket(LabError):
    pass


class UnsupportedOrder(LabError):
    pass


class UnsupportedKind(LabError, ValueError):
    pass


class NotPositiveOnWindow(LabError):
    pass


class NotPositive(LabError):
    pass


class OutOfDomain(LabError):
    pass


class InvalidConfig(LabError, ValueError):
    """A scan or curve request that cannot be run as written."""

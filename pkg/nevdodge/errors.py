"""
Exception hierarchy. Every error carries the exit code the CLI reports.
"""

from nevdodge.constants import (
    EXIT_DODGE,
    EXIT_INPUT,
    EXIT_MULTIPLE,
    EXIT_NEAR_EIGEN,
    EXIT_NUMERIC,
)


class NevDodgeError(Exception):
    """Base class of all package errors."""

    exit_code: int = EXIT_NUMERIC


class InputError(NevDodgeError, ValueError):
    """Unreadable or inconsistent input file or argument."""

    exit_code = EXIT_INPUT


# geometry
class GeometryError(NevDodgeError, ValueError):
    """Invalid boundary curve or deformation."""


class NonSimpleCurve(GeometryError):
    pass


class DegenerateParametrization(GeometryError):
    pass


class ResolutionTooLow(GeometryError):
    pass


class DeformationTooLarge(GeometryError):
    pass


class NotStarShaped(GeometryError):
    pass


# kernels
class DomainError(NevDodgeError, ValueError):
    """Argument outside the domain of a special function."""


class CoincidentPoints(NevDodgeError, ValueError):
    """Kernel evaluated on its diagonal."""


class TooCloseToBoundary(NevDodgeError, ValueError):
    """Layer potential evaluated too close to the boundary."""


# linear algebra
class SolveSingular(NevDodgeError):
    """Discrete Lippmann-Schwinger system is not invertible."""


class ResidualTooLarge(NevDodgeError):
    pass


class NearEigenvalue(NevDodgeError):
    """λ is numerically a Neumann eigenvalue; the Neumann problem is not
    uniquely solvable there."""

    exit_code = EXIT_NEAR_EIGEN


# spectrum
class LostBracket(NevDodgeError):
    pass


class NotAnEigenvalue(NevDodgeError):
    pass


class TrackingFailure(NevDodgeError):
    """An eigenvalue branch could not be followed across a deformation."""


class MultipleEigenvalue(NevDodgeError):
    exit_code = EXIT_MULTIPLE


# dodge
class PlanFailure(NevDodgeError):
    exit_code = EXIT_DODGE


class SplitFailure(NevDodgeError):
    exit_code = EXIT_DODGE


class IterationBudgetExceeded(NevDodgeError):
    exit_code = EXIT_DODGE

"""Exception hierarchy.

Validation problems derive from :class:`ValidationError` and numerical
non-convergence from :class:`ConvergenceError`; the CLI maps them to exit
codes 2 and 3 respectively.
"""


class DBKitError(Exception):
    """Base class for all package errors."""


class ValidationError(DBKitError, ValueError):
    """Bad input: parameters out of range, malformed ids, wrong shapes."""


class ConvergenceError(DBKitError, ArithmeticError):
    """A numerical procedure did not reach its tolerance."""


# entire-core
class EmptyGrid(ValidationError):
    pass


class ZeroOnAxis(ConvergenceError):
    pass


class UnknownFunction(ValidationError):
    pass


# db-space
class QuadratureDivergence(ConvergenceError):
    pass


class DeterminantNotOne(ValidationError):
    pass


class TauOutOfRange(ValidationError):
    pass


# phase-sampling
class RealZeroOfE(ValidationError):
    pass


class IncompleteGrid(ValidationError):
    pass


# mult-operator
class WindowMismatch(ValidationError):
    pass


class EigenvalueHit(ValidationError):
    pass


class NotAnEigenvalue(ValidationError):
    pass


class NotFiniteDimensional(ValidationError):
    pass


class S0NotInSpace(ValidationError):
    pass


class SpectrumMismatch(ConvergenceError):
    """Phase crossings and sign changes of s_beta disagree."""


# n-entire classifier
class InsufficientWindow(ValidationError):
    pass


class OneSidedSequence(ValidationError):
    pass


class NormalizationMissing(ValidationError):
    pass


class Inconclusive(ConvergenceError):
    pass


# model spaces
class RootInClosedUpperHalfPlane(ValidationError):
    pass


class NonpositiveBandwidth(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


# moments
class InsufficientMoments(ValidationError):
    pass


class DegenerateHankel(ConvergenceError):
    def __init__(self, message: str, degree=None):
        super().__init__(message)
        self.degree = degree


class RealEvaluationPoint(ValidationError):
    pass

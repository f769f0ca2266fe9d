"""Exception hierarchy.

Validation problems derive from :class:`ValidationError` (a ``ValueError``);
failures of the numerical machinery derive from :class:`NumericalError`.
The CLI maps the former to exit code 1 and the latter to exit code 2.
"""


class AoiError(Exception):
    """Base class for all package errors."""


class ValidationError(AoiError, ValueError):
    pass


class InvalidParameter(ValidationError):
    pass


class InvalidTail(ValidationError):
    pass


class NonmonotoneThresholds(ValidationError):
    pass


class ProbabilityOutOfRange(ValidationError):
    pass


class RowLengthMismatch(ValidationError):
    pass


class RegionOutOfRange(ValidationError):
    pass


class GammaOutOfRange(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class InvalidConfiguration(ValidationError):
    pass


class InsufficientBatches(ValidationError):
    pass


class InvalidGrid(ValidationError):
    pass


class SearchSpaceTooLarge(ValidationError):
    pass


class DegenerateModel(ValidationError):
    pass


class NumericalError(AoiError, ArithmeticError):
    pass


class NonAbsorbing(NumericalError):
    """The last threshold region never delivers from some transient state."""


class SingularSystem(NumericalError):
    pass


class MultipleRecurrentClasses(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class AllPointsNonAbsorbing(NumericalError):
    pass

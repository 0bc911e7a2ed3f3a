"""
This module defines the exceptions raised by nearfield_boundary.

Classes:
    NearFieldError: Base class of every error raised by this package.
    InvalidArgumentError: An argument is outside the domain of an operation.
    FormulaUnavailableError: No closed form exists for the requested scenario/method.
    SeparationDomainError: The AP-UE separation is too small for the rotated UE.
    NoConvergenceError: The near-field root could not be bracketed.
    NonMonotoneSpreadError: The effective-distance spread is not monotone over the bracket.
    ValidationFailedError: A row of the acceptance matrix failed.
"""


class NearFieldError(Exception):
    pass


class InvalidArgumentError(NearFieldError, ValueError):
    pass


class FormulaUnavailableError(InvalidArgumentError):
    pass


class SeparationDomainError(NearFieldError, ValueError):
    pass


class NoConvergenceError(NearFieldError, RuntimeError):
    pass


class NonMonotoneSpreadError(NearFieldError, RuntimeError):
    """
    Raised when sampling the spread inside a bracket finds an increase with distance.

    Attributes:
        samples (list[tuple[float, float]]): The sampled (separation_m, spread_m) points.
    """

    def __init__(self, message: str, samples: list[tuple[float, float]]):
        super().__init__(message)
        self.samples = samples


class ValidationFailedError(NearFieldError):
    pass

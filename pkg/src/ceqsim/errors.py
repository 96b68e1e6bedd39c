"""Shared exception types.

The CLI maps these onto exit codes: ValidationError -> 2, the numerical
family (NumericalError, FitError, ExtractionError, DegeneracyError,
ChannelUnsupportedError) -> 3.
"""


class CeqsimError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(CeqsimError):
    """Bad input: violated precondition, schema mismatch, invalid spec."""


class NumericalError(CeqsimError):
    """A numerical routine failed to converge or produced garbage."""


class FitError(NumericalError):
    """A curve fit did not meet its residual requirement.

    Carries the offending trace so callers can inspect it.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class ExtractionError(NumericalError):
    """Spectral structure needed for parameter extraction was not resolved."""


class DegeneracyError(NumericalError):
    """A required spectral gap is too small relative to a splitting."""


class ChannelUnsupportedError(NumericalError):
    """Requested relaxation channel shows coherent drift and is not supported."""

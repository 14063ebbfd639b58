"""Exception hierarchy shared by the numeric and symbolic layers."""


class DPIIError(Exception):
    """Base class for every error raised by this package."""


class PrecisionError(DPIIError):
    """Working precision was exhausted before a certified result was reached."""


class TailNotCertified(PrecisionError):
    pass


class NotPositiveDefinite(PrecisionError):
    pass


class DegenerateMeasure(PrecisionError):
    pass


class TruncationNotCertified(PrecisionError):
    pass


class SignMismatch(DPIIError):
    pass


class NotSummable(DPIIError):
    """The argument of a discrete antidifference is not in the image of Delta."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class MissingValue(DPIIError, KeyError):
    pass


class IdentityViolation(DPIIError):
    """A symbolic identity that must hold exactly left a nonzero residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class UnexpectedResidual(IdentityViolation):
    pass


class GaugeMismatch(IdentityViolation):
    pass


class RouteMismatch(IdentityViolation):
    pass


class LeadingOrderNonzero(IdentityViolation):
    pass


class WindowUnderflow(DPIIError, IndexError):
    pass

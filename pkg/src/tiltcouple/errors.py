"""Exception types shared across the package."""


class TiltCoupleError(Exception):
    """Base class for package errors."""


class NonIntegrable(TiltCoupleError):
    """A required moment or normalizer diverges for the given parameters."""


class UnsupportedFamily(TiltCoupleError):
    """The requested operation has no sampling route for this family."""


class TruncationError(TiltCoupleError):
    """A truncation target could not be reached within configured limits."""


class QuadratureError(TiltCoupleError):
    """Adaptive quadrature failed to converge to the requested tolerance."""


class NonMonotoneCDF(TiltCoupleError):
    """A user-supplied CDF decreased on the sample grid."""

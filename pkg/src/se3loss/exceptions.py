"""Exception hierarchy.

``NumericError`` subclasses signal a mathematically ill-posed input (the CLI
maps them to exit code 3); ``FormatError`` subclasses signal malformed files
(exit code 2).
"""


class NumericError(ArithmeticError):
    pass


class FormatError(ValueError):
    pass


class NotARotation(ValueError):
    """Matrix is not orthonormal with determinant +1."""


class CutLocus(NumericError):
    """Relative rotation too close to pi for a unique logarithm."""

    def __init__(self, message, indices=None):
        super().__init__(message)
        self.indices = [] if indices is None else list(indices)


class NotSPD(ValueError):
    pass


class DegenerateQuat(NumericError):
    pass


class CollinearAnchors(NumericError):
    pass


class ReflectionDetected(NumericError):
    pass


class SingularCovariance(NumericError):
    pass


class NonPositiveWeight(ValueError):
    pass


class ZeroVariance(NumericError):
    pass


class Diverged(NumericError):
    pass


class ParseError(FormatError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DuplicateId(FormatError):
    pass


class UnitsMissing(FormatError):
    pass


class GimbalLockWarning(UserWarning):
    """Euler extraction near |pitch| = pi/2; yaw and roll are not separable."""

"""Exception and warning types raised across the package."""


class GorasError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(GorasError, ValueError):
    pass


class BranchAmbiguityError(GorasError, ArithmeticError):
    """Rotation angle too close to pi for a unique logarithm."""


class DegenerateFrameError(GorasError, ArithmeticError):
    """A 3x3 block is (nearly) singular and cannot be projected to SO(3)."""


class DegenerateSegmentError(GorasError, ArithmeticError):
    pass


class InvalidGridError(GorasError, ValueError):
    pass


class InsufficientDataError(GorasError, ValueError):
    pass


class InversionError(GorasError, ArithmeticError):
    pass


class ShapeMismatchError(GorasError, ValueError):
    pass


class ParseError(GorasError, ValueError):
    pass


class DegenerateSkeletonError(GorasError, ValueError):
    pass


class StaticSignalError(GorasError, ArithmeticError):
    """The signal has (numerically) zero rate of change everywhere."""


class ConfigurationError(GorasError, ValueError):
    pass


class ClampWarning(UserWarning):
    """Query points fell outside the sampled range and were clamped."""


class MonotonicityWarning(UserWarning):
    """Numerical ties were broken to restore strict monotonicity."""


# errors that signal a numerical degeneracy rather than bad input data
NUMERICAL_ERRORS = (
    BranchAmbiguityError,
    DegenerateFrameError,
    DegenerateSegmentError,
    InversionError,
    StaticSignalError,
    DegenerateSkeletonError,
)

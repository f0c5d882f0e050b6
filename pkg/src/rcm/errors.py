"""Exception hierarchy shared by every module of the package."""


class RCMError(Exception):
    """Base class for all errors raised by :mod:`rcm`."""


class InvalidMatrix(RCMError, ValueError):
    pass


class NotPSD(RCMError, ValueError):
    pass


class NotSPD(RCMError, ValueError):
    pass


class DimensionError(RCMError, ValueError):
    pass


class EmptyClass(RCMError, ValueError):
    pass


class InvalidParameter(RCMError, ValueError):
    pass


class InvalidRate(InvalidParameter):
    pass


class InfeasibleRCH(InvalidParameter):
    """The reduced convex hull is empty: its weight cap times the point count is below one."""


class InvalidBracket(InvalidParameter):
    pass


class InvalidDirection(InvalidParameter):
    pass


class NotSeparated(RCMError):
    """The convex path was requested but the two uncertainty sets intersect."""


class SubproblemUnbounded(RCMError):
    """The linearized subproblem grew past the unboundedness guard.

    This happens when the origin is not interior to the difference set, so the
    caller picked the non-convex path for a separable instance.
    """


class NotDifferentiable(RCMError, ValueError):
    pass


class NotConverged(RCMError, RuntimeWarning):
    """Iteration budget exhausted.

    Emitted as a warning; the solver still returns its best iterate with the
    ``converged`` flag cleared.
    """


class LossOverflow(RCMError, FloatingPointError):
    pass


class InvalidLoss(RCMError, ValueError):
    pass


class EmptyFamily(RCMError, ValueError):
    pass


class DimensionTooLarge(RCMError, ValueError):
    pass


class TooLarge(RCMError, ValueError):
    pass


class DegenerateMeans(RCMError, ValueError):
    pass


class FormatError(RCMError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class LabelError(FormatError):
    pass

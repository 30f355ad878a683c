"""Exception hierarchy shared by all modules."""


class UlrichfoldError(Exception):
    """Base class for every error raised by this package."""


class ZeroInverse(UlrichfoldError, ZeroDivisionError):
    pass


class RingMismatch(UlrichfoldError, ValueError):
    pass


class UnknownVariable(UlrichfoldError, ValueError):
    pass


class PolySyntaxError(UlrichfoldError, SyntaxError):
    """Parse failure; carries 1-based ``line`` and ``column``."""

    def __init__(self, msg, line=1, column=1):
        super().__init__(f"{msg} (line {line}, column {column})")
        self.line = line
        self.column = column


class DegreeCapExceeded(UlrichfoldError, RuntimeError):
    pass


class StepCapExceeded(UlrichfoldError, RuntimeError):
    pass


class NotMinimal(UlrichfoldError, ValueError):
    pass


class NotAnnihilated(UlrichfoldError, ValueError):
    pass


class NotPeriodic(UlrichfoldError, RuntimeError):
    pass


class LiftFailure(UlrichfoldError, RuntimeError):
    pass


class NoStabilization(UlrichfoldError, RuntimeError):
    pass


class GenericityFailure(UlrichfoldError, RuntimeError):
    pass


class EmptySystem(UlrichfoldError, ValueError):
    pass


class CenterOnSurface(UlrichfoldError, ValueError):
    pass


class BadPartition(UlrichfoldError, ValueError):
    pass


class NoCubic(UlrichfoldError, ValueError):
    pass


class NotLinearMF(UlrichfoldError, ValueError):
    pass


class NotUlrich(UlrichfoldError, ValueError):
    pass


class DegenerateSections(UlrichfoldError, RuntimeError):
    pass


class ShapeMismatch(UlrichfoldError, RuntimeError):
    pass


class NotApplicable(UlrichfoldError, ValueError):
    pass


class TimeBudgetExceeded(UlrichfoldError, RuntimeError):
    """Raised when a budgeted computation runs out of time.

    ``partial`` holds whatever results were finished before the deadline.
    """

    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial or {}

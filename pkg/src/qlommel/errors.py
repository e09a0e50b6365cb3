"""Exception hierarchy shared by every module."""


class QLommelError(Exception):
    """Base class for all library errors."""


class DomainError(QLommelError, ValueError):
    """An argument lies outside the domain of the operation."""


class NonConvergent(QLommelError, ArithmeticError):
    """A series or product did not reach its truncation criterion."""


class PoleError(QLommelError, ZeroDivisionError):
    """Evaluation hit a pole (vanishing denominator)."""


class BracketError(QLommelError):
    """A sign change could not be located in the scanned interval."""


class NotARoot(QLommelError):
    """A point passed as a mass point does not annihilate the characteristic function."""


class NonPositiveWeight(QLommelError):
    """A computed weight is not positive; signals a numerical failure."""


class BoundViolation(QLommelError):
    """A proven inequality failed; indicates an implementation bug."""


class BranchMismatch(QLommelError):
    """The a=1 and generic formulas disagree inside the overlap band."""

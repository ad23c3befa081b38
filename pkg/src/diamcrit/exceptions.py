"""Exception hierarchy.

Three families map onto the CLI exit codes:

* ``UsageError`` (exit 1): malformed input, bad parameters.
* ``VerdictError`` (exit 2): the input does not have the property an
  operation requires (e.g. it is not diameter-critical).
* ``InvariantViolation`` (exit 3): a proven property failed on a valid
  input. This always means an implementation bug.
"""


class DiamCritError(Exception):
    """Base class for all package errors."""


class UsageError(DiamCritError, ValueError):
    pass


class VerdictError(DiamCritError):
    pass


class InvariantViolation(DiamCritError, AssertionError):
    pass


class OutOfRange(UsageError):
    pass


class SelfLoop(UsageError):
    pass


class ParseError(UsageError):
    """Raised by the graph6/JSON readers; ``offset`` is the failing byte."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)
        self.offset = offset


class BadParams(UsageError):
    pass


class TooLarge(UsageError):
    pass


class NotATriangle(UsageError):
    pass


class Unreachable(VerdictError):
    pass


class PreconditionFailed(VerdictError):
    pass


class NotDiameterCritical(VerdictError):
    pass


class NotFound(VerdictError):
    pass


class SamplingExhausted(VerdictError):
    pass


class CountingViolation(InvariantViolation):
    pass


class ChargingViolation(InvariantViolation):
    pass


class TheoremViolation(InvariantViolation):
    pass


class LemmaViolation(InvariantViolation):
    pass


class InternalInvariant(InvariantViolation):
    pass


class BoundViolation(InvariantViolation):
    pass

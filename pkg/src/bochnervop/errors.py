"""Exception hierarchy.

Guard-type failures (``GuardExceeded``, ``DegreeNotLowered``, ``SigmaMismatch``,
``RelationViolation``) indicate an invalid input datum or an engine bug; the CLI
maps them to exit status 3.
"""


class VopError(Exception):
    """Base class for all errors raised by this package."""


class SpecError(VopError, ValueError):
    """A family specification (or serialized document) is malformed."""


class MissingParameterError(VopError, KeyError):
    def __init__(self, name):
        super().__init__(name)
        self.name = name

    def __str__(self):
        return f"no value supplied for parameter {self.name!r}"


class UndeclaredParameterError(SpecError):
    pass


class InvalidQError(SpecError):
    """The automorphism datum q has a nonzero constant term."""


class GuardExceeded(VopError):
    pass


class DegreeNotLowered(VopError):
    pass


class Cancelled(VopError):
    pass


class TableOutOfRange(VopError, IndexError):
    pass


class RelationViolation(VopError):
    pass


class SigmaMismatch(VopError):
    pass


class BandwidthZero(VopError):
    pass


INTERNAL_ERRORS = (GuardExceeded, DegreeNotLowered, SigmaMismatch, RelationViolation)

"""Exception hierarchy. Each class maps onto one CLI exit status."""


class FraisseError(Exception):
    exit_code = 1


class MalformedInputError(FraisseError):
    """Input that does not describe what the operation expects."""

    exit_code = 2


class PreconditionError(MalformedInputError):
    """Well-formed input that violates an operation's precondition."""


class UnsupportedClassError(MalformedInputError):
    pass


class ResourceBoundError(FraisseError):
    exit_code = 3


class InternalConsistencyError(FraisseError):
    """An invariant that the construction guarantees was found broken."""

    exit_code = 1

"""Exception types shared across the package."""


class SemcompError(Exception):
    """Base class for all library errors."""


class ValidationError(SemcompError):
    """Input violates a documented precondition or invariant."""


class ParseError(SemcompError):
    """Malformed corpus or config input."""

    def __init__(self, message, line=None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line


class PairNotFoundError(SemcompError):
    """No quadruple exists for the requested (head, tail) pair."""


class RelationNotFoundError(SemcompError):
    """The pair exists but the requested relation is not in its relation set."""


class UndefinedProbabilityError(SemcompError):
    """Conditional probability has a zero denominator; the condition is unusable."""


class IncompatibleKnowledgeError(SemcompError):
    """Message graph hash does not match the local probability graph."""


class CorruptMessageError(SemcompError):
    """Message structure is internally inconsistent or not reconstructable."""


class MessageDecodeError(SemcompError):
    """Byte stream is not a valid encoded message."""


class GraphDecodeError(SemcompError):
    """Byte stream is not a valid encoded probability graph."""

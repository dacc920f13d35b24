"""Exception types shared across the package."""


class RQSimError(Exception):
    """Base class for all rqsim errors."""


class InvalidParameterError(RQSimError, ValueError):
    """A numeric or configuration parameter is outside its valid domain."""


class InvalidInputError(RQSimError, ValueError):
    """A structural input (graph, snapshot, stream) violates a precondition."""


class GenerationFailureError(RQSimError, RuntimeError):
    """A random generator could not produce a valid instance."""


class ParseError(RQSimError, ValueError):
    """An input file could not be parsed.

    Carries the 1-based line number of the offending line when known.
    """

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class InfeasibleTargetError(RQSimError, ValueError):
    """The requested infection size exceeds the reachable component."""

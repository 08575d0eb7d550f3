"""Exception types shared across the package."""


class GvmonitorError(Exception):
    """Base class for domain errors (CLI maps these to exit code 2)."""


class CorpusError(GvmonitorError):
    """Unreadable or structurally invalid corpus input."""


class DatasetError(GvmonitorError):
    """Dataset construction violated a stated contract."""


class QueryParseError(GvmonitorError):
    """Keyword query rejected; carries the 0-based offset of the problem."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class TransportError(GvmonitorError):
    """Retryable transport failure talking to an external runtime or source."""

    retryable = True


class ProtocolError(GvmonitorError):
    """External runtime replied with something outside the protocol contract."""

    retryable = False


class ConflictError(GvmonitorError):
    """Write rejected because a record already exists."""


class NotFoundError(GvmonitorError):
    """Referenced record does not exist."""


class ConvergenceError(GvmonitorError):
    """Iterative fit failed to converge; carries the iteration trace."""

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])

"""Exception hierarchy shared by all logsift modules.

The three branches map onto CLI exit codes: UsageError -> 1,
DataError -> 2, EndpointError -> 3.
"""


class LogsiftError(Exception):
    pass


class UsageError(LogsiftError):
    """Bad invocation or configuration supplied by the caller."""


class DataError(LogsiftError):
    """Input data violates a documented contract."""


class EndpointError(LogsiftError):
    """Failure talking to, or interpreting output of, an LLM endpoint."""


class EmptyInput(DataError):
    """An operation that needs at least one item received none."""

"""Exception hierarchy shared by all packages"""
from typing import Sequence


class CausalDiscoveryError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgumentError(CausalDiscoveryError, ValueError):
    """A caller passed an argument outside the operation's domain."""


class ContractViolationError(CausalDiscoveryError):
    """An operation's precondition does not hold for its input."""


class ResourceLimitError(CausalDiscoveryError):
    """An exhaustive computation was refused because the input is too large."""


class NotFoundError(CausalDiscoveryError, KeyError):
    """A named entity (node, fixture, atom, query) does not exist."""

    def __str__(self) -> str:
        # KeyError quotes its argument; keep plain messages.
        return str(self.args[0]) if self.args else ""


class InconsistentInputError(CausalDiscoveryError):
    """Derived statements contradict each other.

    Attributes:
        traces: The derivation traces of the conflicting statements.
    """

    def __init__(self, message: str, traces: Sequence = ()):
        super().__init__(message)
        self.traces = tuple(traces)


class RuleConflictError(CausalDiscoveryError):
    """An orientation rule tried to overwrite a committed end mark.

    Attributes:
        log_excerpt: The last rule applications before the conflict.
    """

    def __init__(self, message: str, log_excerpt: Sequence[str] = ()):
        super().__init__(message)
        self.log_excerpt = tuple(log_excerpt)


class GraphParseError(InvalidArgumentError):
    """A graph text file could not be parsed."""

    def __init__(self, message: str, line_number: int = 0):
        if line_number:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class FactLogParseError(InvalidArgumentError):
    """A CiFact log could not be parsed."""

    def __init__(self, message: str, line_number: int = 0):
        if line_number:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number

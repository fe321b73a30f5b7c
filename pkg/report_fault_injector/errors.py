"""Exception hierarchy shared by every pipeline stage."""

from typing import Optional


class FaultInjectorError(Exception):
    """Base class for all errors raised by the toolkit."""


class MalformedReport(FaultInjectorError):
    """A bug report or fault record violates its JSON schema."""


class ParseError(FaultInjectorError):
    """MiniJ source text does not conform to the grammar."""

    def __init__(self, message: str, line: int, column: int, path: Optional[str] = None):
        self.message = message
        self.line = line
        self.column = column
        self.path = path
        where = f"{path}:" if path else ""
        super().__init__(f"{where}{line}:{column}: {message}")

    def with_path(self, path: str) -> "ParseError":
        return ParseError(self.message, self.line, self.column, path)


class DanglingLink(FaultInjectorError):
    """A bug report or fault record names an id that does not exist."""


class EmptyCorpus(FaultInjectorError):
    """Nothing to index."""


class EmptyQuery(FaultInjectorError):
    """A bug report yields no terms after normalisation."""


class MiniJTypeError(FaultInjectorError):
    """Static type error; this is the compile filter of the injection loop."""

    def __init__(self, message: str, span=None):
        self.message = message
        self.span = span
        where = f"{span.start_line}:{span.start_col}: " if span is not None else ""
        super().__init__(f"{where}{message}")


class UnknownTest(FaultInjectorError):
    """A requested test function does not exist."""


class NoOpMutant(FaultInjectorError):
    """A pattern application reproduced the original program."""


class StaleApplication(FaultInjectorError):
    """The AST changed since the pattern application was matched."""


class NoViableMutants(FaultInjectorError):
    """Every candidate application was stillborn or a no-op."""


class ExecutionError(FaultInjectorError):
    """Internal interpreter failure, distinct from a failing test."""


class LengthMismatch(FaultInjectorError):
    """Two kill vectors of different length were compared."""


class BandEmpty(FaultInjectorError):
    """The suite sampling band contains no integer suite size."""


class DegenerateInput(FaultInjectorError):
    """A statistic is undefined for the given input."""


class EmptyGroup(FaultInjectorError):
    """An effect size or test was requested on an empty sample."""


class SchemaMismatch(FaultInjectorError):
    """A report file does not match the evaluation report schema."""


class CorruptMutant(FaultInjectorError):
    """A stored mutant directory is incomplete or its metadata is invalid."""

"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations


class GfrEvalError(Exception):
    """Base class for every error raised by gfreval."""


class DomainError(GfrEvalError, ValueError):
    """An argument lies outside the domain of the operation."""


class UndefinedMeasureError(DomainError):
    """The measure has no defined value for this input (e.g. zero ideal DCG)."""


class EvaluationError(GfrEvalError, RuntimeError):
    """Evaluation cannot proceed, e.g. a topic has no target distribution."""


class FormatError(GfrEvalError, ValueError):
    """A malformed line in an input file.

    ``line`` is 1-based; ``file`` is whatever name the stream was opened under.
    """

    def __init__(self, message: str, file: str | None = None, line: int | None = None):
        self.message = message
        self.file = file
        self.line = line
        where = file or "<stream>"
        if line is not None:
            where = f"{where}:{line}"
        super().__init__(f"{where}: {message}")

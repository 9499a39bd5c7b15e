"""Exception hierarchy shared by every stage.

Each class carries the process exit code the CLI maps it to, plus an
optional stage tag and free-form diagnostic details.
"""

from __future__ import annotations


class DecompositionError(Exception):
    exit_code = 1

    def __init__(self, message: str, stage: str | None = None, **details):
        super().__init__(message)
        self.message = message
        self.stage = stage
        self.details = details

    def tagged(self, stage: str) -> "DecompositionError":
        """Return self with ``stage`` prepended to the stage path."""
        self.stage = stage if self.stage is None else f"{stage}/{self.stage}"
        return self

    def __str__(self) -> str:
        prefix = f"[{self.stage}] " if self.stage else ""
        return prefix + self.message


class PreconditionError(DecompositionError):
    """Input does not satisfy the hypotheses of the requested operation."""

    exit_code = 2


class GraphParseError(PreconditionError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}", line=line)
        self.line = line


class BudgetExhausted(DecompositionError):
    """A randomized or iterative stage ran out of attempts."""

    exit_code = 3


class InvariantViolation(DecompositionError):
    """An internal check failed; this indicates a bug, not bad input."""

    exit_code = 4

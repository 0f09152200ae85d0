"""Exception hierarchy shared by the kernel, the parser and the CLI."""

from __future__ import annotations


class AlgebraError(Exception):
    """Base class for errors raised while evaluating in the algebra."""


class UnboundParameterError(AlgebraError):
    """A bracket or coproduct rule references a parameter with no value."""


class ParameterLookupError(AlgebraError):
    """A mode-indexed parameter was asked for a mode its table does not cover."""


class ModeOverflowError(AlgebraError, OverflowError):
    """Mode arithmetic left the signed 64-bit range."""


class UnknownFamilyError(AlgebraError):
    """A generator belongs to a family the bracket table does not declare."""


class InfiniteTailError(AlgebraError):
    """A Casimir bracket would have infinitely many nonzero terms."""


class DerivationError(AlgebraError):
    """Base class for failures in the linear-algebra derivations."""


class WindowTooSmallError(DerivationError, ValueError):
    pass


class NotProportionalError(DerivationError, ValueError):
    pass


class NoSolutionError(DerivationError):
    pass


class ParseError(Exception):
    """Positioned error from the presentation or expression parser.

    ``line`` and ``column`` are 1-based; ``snippet`` is the offending source line.
    """

    def __init__(self, message: str, line: int = 1, column: int = 1, snippet: str = ""):
        self.message = message
        self.line = line
        self.column = column
        self.snippet = snippet
        super().__init__(str(self))

    def __str__(self) -> str:
        head = f"{self.line}:{self.column}: {self.message}"
        if not self.snippet:
            return head
        caret = " " * (self.column - 1) + "^"
        return f"{head}\n  {self.snippet}\n  {caret}"


class UnknownParameterError(AlgebraError):
    """An override names a parameter the presentation does not declare."""

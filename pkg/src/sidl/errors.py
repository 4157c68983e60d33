"""Exception hierarchy shared across the engine."""


class SidlError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(SidlError):
    """Malformed definition text."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class EvaluationError(SidlError):
    """Arithmetic or builtin misuse inside a proof (e.g. unbound `is` operand)."""


class BudgetExceededError(SidlError):
    """The resolution step budget ran out; distinct from plain goal failure."""


class DefinitionError(SidlError):
    """A game definition misbehaved at runtime (non-ground word, bad distribution, ...)."""


class ValidationFailure(SidlError):
    """Loading a definition found hard validation errors."""

    def __init__(self, findings):
        self.findings = list(findings)
        lines = "; ".join(str(f) for f in self.findings)
        super().__init__(f"definition invalid: {lines}")


class AnalysisError(SidlError):
    """An analyzer precondition does not hold (unlimited switch, limits exceeded, ...)."""

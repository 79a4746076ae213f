"""Exception types shared across the package."""


class ResourceLimitError(RuntimeError):
    """A size guard was exceeded (atom count, row explosion, variable count)."""


class ParseError(ValueError):
    """Malformed input text.

    ``position`` is a 0-based character offset into the parsed text, when known.
    """

    def __init__(self, message: str, position: int | None = None, text: str | None = None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class UndeclaredVariableError(ParseError):
    pass


class InfeasibleSystemError(ValueError):
    """Elimination derived a contradictory constant row."""

    def __init__(self, message: str, row=None):
        super().__init__(message)
        self.row = row

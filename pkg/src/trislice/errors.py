"""Shared exception types."""


class ResourceLimitError(RuntimeError):
    """A requested computation exceeds a configured size or budget limit."""


class DiagonalityError(Exception):
    """A set failed diagonality certification; carries the offending witness.

    kind is one of "equilateral_triple", "offdiagonal_nonzero", "zero_diagonal".
    triple holds the witness point masks (a single mask for "zero_diagonal").
    """

    def __init__(self, kind: str, triple, value: int, message: str):
        super().__init__(message)
        self.kind = kind
        self.triple = triple
        self.value = value

"""Exception types raised across the package."""


class QuiverShuffleError(Exception):
    """Base class for all package errors."""


class IllFormedInput(QuiverShuffleError, ValueError):
    """Input violates a structural precondition (bad degree, bad side, bad JSON)."""


class ParseError(IllFormedInput):
    """Coefficient string does not match the grammar."""

    def __init__(self, message: str, text: str = "", pos: int = -1):
        if pos >= 0:
            message = f"{message} at position {pos} in {text!r}"
        super().__init__(message)
        self.text = text
        self.pos = pos


class DivergentLimit(QuiverShuffleError, ArithmeticError):
    """A requested limit has a pole of higher order than allowed."""


class NotInShuffleAlgebra(QuiverShuffleError, ArithmeticError):
    """A symmetrized expression kept a non-monomial denominator in z."""


class SlopeError(QuiverShuffleError, ArithmeticError):
    """An element fails the slope bound required by the operation."""


class SingularMatrix(QuiverShuffleError, ArithmeticError):
    """A Gram or coordinate matrix is not invertible."""


class ResourceCap(QuiverShuffleError, MemoryError):
    """An expansion exceeded the configured term cap."""

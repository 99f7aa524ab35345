"""Exception types shared across the package."""


class CurrdynError(Exception):
    """Base class for all package errors."""


class TrivialWordError(CurrdynError):
    """A word reduced to the empty word where a nontrivial one is required."""


class RankMismatchError(CurrdynError):
    """Automorphisms of different ranks were combined."""


class BrokenPathError(CurrdynError):
    """Consecutive edges of a path do not share endpoints."""


class ShapeMismatchError(CurrdynError):
    """An NEG edge image does not have the form e.u."""


class NonConvergenceError(CurrdynError):
    """An iterative computation failed to stabilize within its cap."""


class LengthCapError(CurrdynError):
    """A word or path exceeded the configured symbol budget."""


class CapExceededError(CurrdynError):
    """A bounded search hit its cap without reaching a decision."""


class NotIrreducibleError(CurrdynError):
    """Perron-Frobenius data was requested for a reducible matrix."""


class NonDominantError(CurrdynError):
    """Spectral frequencies were requested outside a dominant primitive block."""


class OrderMismatchError(CurrdynError):
    """Frequency vectors of different orders were combined."""


class TrivialImageError(CurrdynError):
    """The image of a circuit collapsed to the trivial circuit."""


class ParseError(CurrdynError):
    """Malformed input text; carries line and column information."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + where)

"""Exception types raised by the library."""


class WittError(Exception):
    """Base class for all library errors."""


class DivisionByZero(WittError, ZeroDivisionError):
    pass


class NotDivisible(WittError, ArithmeticError):
    """An exact division by a power of p left a remainder."""


class NotAPthPower(WittError, ArithmeticError):
    """An inverse Frobenius was requested on a polynomial that is not a p^r-th power."""


class ArityMismatch(WittError, ValueError):
    pass


class ContextMismatch(WittError, ValueError):
    """Operands live in different rings."""


class InvalidParameter(WittError, ValueError):
    pass


class ParseError(WittError, ValueError):
    """Malformed text input; carries a 1-based line and column."""

    def __init__(self, message, line=1, column=1):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")

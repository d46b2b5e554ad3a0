"""Exception hierarchy shared by the library and the command line."""


class SIOError(Exception):
    """Base class for all errors raised by this package."""


class InputError(SIOError, ValueError):
    """Malformed or invalid input (maps to CLI exit code 2)."""


class ParseError(InputError):
    pass


class NotSquare(InputError):
    pass


class NotHermitian(InputError):
    pass


class NotUnitTrace(InputError):
    pass


class NotPSD(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class NotSubnormalized(InputError):
    pass


class IncompleteInstrument(InputError):
    pass


class OutOfRange(InputError):
    pass


class ZeroProbability(SIOError, ArithmeticError):
    """The requested sub-channel annihilates the state."""


class NoConvergence(SIOError, ArithmeticError):
    """Iterative eigen-solver exhausted its iteration budget."""

    def __init__(self, max_iter, residual):
        self.max_iter = max_iter
        self.residual = residual
        super().__init__(
            f"power iteration did not converge in {max_iter} iterations "
            f"(relative residual {residual:.3e})"
        )

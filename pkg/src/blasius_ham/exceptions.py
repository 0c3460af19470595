"""Exception types raised by the solver."""


class SingularOperatorError(ArithmeticError):
    """The embedded linear operator could not be factorized."""


class NonFiniteTermError(FloatingPointError):
    """A series correction term contains NaN or infinity."""

    def __init__(self, order, message=None):
        self.order = order
        super().__init__(message or f"non-finite values in correction term of order {order}")


class NonFiniteStateError(FloatingPointError):
    """The shooting integrator produced a non-finite state."""


class BracketError(ValueError):
    """The shooting bracket does not straddle the root."""


class MissingReferenceError(ValueError):
    """A positive data-loss weight was given without reference data."""


class AllDivergentError(RuntimeError):
    """Every candidate of a parameter sweep diverged."""

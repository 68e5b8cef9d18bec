"""Exception types raised by hdqkd."""


class HDQKDError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(HDQKDError, ValueError):
    """Dimension below 2, or arrays whose shape does not match the dimension."""


class InfeasibleRatesError(HDQKDError, ValueError):
    """No Bell-diagonal state reproduces the given error rates."""


class NoFeasibleRootError(HDQKDError, ArithmeticError):
    """The eta condition has no root inside the feasible interval."""


class NotBellDiagonalError(HDQKDError, ValueError):
    """State has Bell-basis coherences above tolerance."""

    def __init__(self, max_offdiag: float, tol: float):
        self.max_offdiag = max_offdiag
        self.tol = tol
        super().__init__(
            f"state is not Bell-diagonal: max off-diagonal {max_offdiag:.3e} > {tol:.1e}"
        )


class UnsupportedRegimeError(HDQKDError, ValueError):
    """Basis count not backed by a known MUB construction for this dimension."""


class UnsupportedBoundError(HDQKDError, ValueError):
    """Requested finite-key bound does not apply (e.g. EUR with m != 2)."""


class ConvergenceError(HDQKDError, RuntimeError):
    """Iterative solver did not meet its tolerance within the iteration cap."""

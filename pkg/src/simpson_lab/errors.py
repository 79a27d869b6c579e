"""Exception types shared across the package.

Each error carries a process exit code so the CLI can map failures without
inspecting messages.
"""


class SimpsonLabError(Exception):
    exit_code = 1


class InvalidInput(SimpsonLabError, ValueError):
    exit_code = 2


class NotDivisible(SimpsonLabError, ArithmeticError):
    exit_code = 1


class NotSmall(SimpsonLabError):
    """The input fails the smallness hypothesis required by an operation."""

    exit_code = 3


class PrecisionExhausted(SimpsonLabError, ArithmeticError):
    """A result would be trusted modulo fewer than p^guard."""

    exit_code = 3


class NonCommuting(InvalidInput):
    pass


class FractionalPowerUnsupported(InvalidInput):
    """A product would need p^(a/p^k) with a/p^k not an integer."""

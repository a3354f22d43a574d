"""Exception types shared across the package, with CLI exit codes."""

EXIT_OK = 0
EXIT_INVARIANT = 2
EXIT_PRECISION = 3
EXIT_BAD_INPUT = 4


class CoinLabError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class InvariantViolation(CoinLabError):
    """A mathematical invariant failed (bad channel, non-idempotent fixed point, ...)."""

    exit_code = EXIT_INVARIANT


class PrecisionFailure(CoinLabError):
    """A float-mode computation did not converge within the precision budget."""

    exit_code = EXIT_PRECISION

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class BadInput(CoinLabError, ValueError):
    """Caller-supplied values outside the documented ranges."""

    exit_code = EXIT_BAD_INPUT


class CoinExhausted(CoinLabError):
    """Pair budget ran out before the von Neumann extractor emitted a bit."""

    def __init__(self, pairs_used):
        super().__init__(f"no unequal pair within {pairs_used} pairs")
        self.pairs_used = pairs_used

"""Error types with user-facing messages. Used to abort computations and map failures to CLI exit codes."""

EXIT_OK = 0
EXIT_OPERATIONAL = 1
EXIT_VIOLATION = 2


class PeriodPolyError(Exception):
    """Base for all library errors. .message is the user-facing text."""

    exit_code = EXIT_OPERATIONAL

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class DomainError(PeriodPolyError):
    """Argument outside the domain of an operation (weight, order, s, Im(tau), ...)."""


class PoleProximityError(DomainError):
    """Evaluation point too close to a pole of the completed L-function."""


class TruncationError(PeriodPolyError):
    """Stored q-expansion too short, or a tail bound cannot reach the requested precision."""


class ConvergenceError(PeriodPolyError):
    """Iterative method (root finder, eigenvector solve) failed to converge."""


class ResidualError(PeriodPolyError):
    """A checked identity (functional equation, symmetry, reconstruction) failed its tolerance."""

    def __init__(self, message: str, residual: object = None):
        super().__init__(message)
        self.residual = residual


class CacheCorruptionError(PeriodPolyError):
    """Persistent cache file is unreadable as a whole."""


class MathematicalViolation(PeriodPolyError):
    """A verified statement was found to fail beyond tolerance."""

    exit_code = EXIT_VIOLATION


def user_message_for_exception(e: BaseException) -> str | None:
    """Return user-facing message if e is a known library error; else None."""
    if isinstance(e, PeriodPolyError):
        return e.message
    return None


def exit_code_for_exception(e: BaseException) -> int:
    """Exit code for an exception escaping a CLI command. Unknown errors are operational."""
    if isinstance(e, PeriodPolyError):
        return e.exit_code
    return EXIT_OPERATIONAL

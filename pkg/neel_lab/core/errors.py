"""Exception hierarchy shared by the services and the CLI.

Every error carries the process exit code the CLI reports for it.
"""
from typing import Optional


class NeelLabError(Exception):
    exit_code = 1


class DomainError(NeelLabError, ValueError):
    """Argument outside the documented window of an operation."""

    exit_code = 2


class PoleError(DomainError):
    """Gamma or digamma evaluated at a nonpositive integer."""


class BracketError(DomainError):
    """Root bracket does not straddle a sign change."""


class UnderflowGuardError(DomainError):
    """Coupling too small for the Neel temperature to be resolved in double precision."""


class ConvergenceError(NeelLabError, ArithmeticError):
    exit_code = 3

    def __init__(
        self,
        message: str,
        partial: Optional[float] = None,
        error_estimate: Optional[float] = None,
    ):
        super().__init__(message)
        self.partial = partial
        self.error_estimate = error_estimate

    def __str__(self) -> str:
        base = super().__str__()
        if self.partial is None:
            return base
        return f"{base} (partial={self.partial!r}, error_estimate={self.error_estimate!r})"


class GoldenFileError(NeelLabError):
    exit_code = 1


class UsageError(NeelLabError):
    exit_code = 64

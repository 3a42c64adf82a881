"""Exception hierarchy shared by the library and the command-line tool."""

from __future__ import annotations

from typing import Any


class FucikError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(FucikError, ValueError):
    """An input (shape, domain file, parameter) failed validation."""


class DomainError(FucikError, ValueError):
    """A query was made outside the region where it is defined."""


class BudgetExceeded(FucikError):
    """An iterative solver ran out of budget before reaching its tolerance.

    The best candidate found so far is kept on ``best`` so callers can still
    inspect or report it.
    """

    def __init__(self, message: str, best: Any = None):
        super().__init__(message)
        self.best = best

"""Exception types shared by the numeric modules and the CLI."""
from __future__ import annotations


class EhcapError(Exception):
    """Base class for every error raised on purpose by ehcap."""


class ValidationError(EhcapError, ValueError):
    """An input violates a documented precondition."""


class NumericalError(EhcapError, RuntimeError):
    """A solver, root finder or quadrature could not deliver its contract."""

    def __init__(self, message: str, *, samples: dict | None = None) -> None:
        super().__init__(message)
        self.samples = samples or {}

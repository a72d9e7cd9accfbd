"""Exception hierarchy shared by the library and the command line tool.

Exit codes used by the CLI:

* 2 -- ``ConfigError`` (bad input file, malformed values, unknown keys)
* 3 -- ``DomainError`` (mathematically invalid request: non-unitary coin,
  degenerate-coin operation that does not exist, window overflow, ...)
* 4 -- ``ConvergenceError`` (an iteration did not settle within its budget,
  or internal consistency checks on a converged answer failed)
"""

from __future__ import annotations

__all__ = [
    "QwalkError",
    "ConfigError",
    "DomainError",
    "ResourceLimitError",
    "ConvergenceError",
]


class QwalkError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(QwalkError):
    """Invalid configuration input (file contents, CLI arguments)."""

    exit_code = 2


class DomainError(QwalkError):
    """Mathematically invalid request for the given model."""

    exit_code = 3


class ResourceLimitError(DomainError):
    """A computation would exceed an explicit resource cap."""


class ConvergenceError(QwalkError):
    """An iterative computation failed to converge or to self-validate."""

    exit_code = 4

"""Shared exception types and the enumeration budget."""

from __future__ import annotations

import os

DEFAULT_BUDGET = 2**26


class VcspError(Exception):
    """Base class for all package errors."""


class InputError(VcspError):
    """Invalid argument or malformed structure supplied by the caller."""


class ParseError(InputError):
    """Malformed text input; carries a line number when known."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class BudgetError(VcspError):
    """An enumeration would exceed the configured budget."""


class InternalError(VcspError):
    """An invariant the code relies on was violated; indicates a bug."""


def enumeration_budget(budget=None):
    """Resolve the effective enumeration budget.

    Explicit argument wins, then the VCSP_SA_BUDGET environment variable,
    then the built-in default.
    """
    if budget is not None:
        return int(budget)
    env = os.environ.get("VCSP_SA_BUDGET")
    if env is not None:
        return int(env)
    return DEFAULT_BUDGET

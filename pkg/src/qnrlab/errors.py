"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: DomainError -> 2, ResourceError and
PrecisionError -> 3.
"""

from __future__ import annotations


class QnrError(Exception):
    """Base class for all package errors."""


class DomainError(QnrError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ResourceError(QnrError):
    """A configured size or memory cap would be exceeded."""


class PrecisionError(QnrError, ArithmeticError):
    """Carried precision is not enough to decide a floor or a comparison."""

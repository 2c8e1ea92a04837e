"""Shared exception types.

DomainError / RangeError signal bad inputs, CapacityError a refused
oversized computation, ValidationError a certificate or precondition that
failed verification (carrying a witness when one exists), and
ConstructionError an internal invariant that should be unreachable when
documented preconditions hold.
"""

from __future__ import annotations


class DomainError(ValueError):
    """Input outside the documented domain of an operation."""


class RangeError(DomainError):
    """Numeric parameter outside its documented range."""


class CapacityError(RuntimeError):
    """Computation refused because it exceeds a configured size limit."""


class ValidationError(ValueError):
    """A certificate or eagerly-checked precondition failed verification."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class ConstructionError(RuntimeError):
    """Internal construction failed; unreachable under stated preconditions."""

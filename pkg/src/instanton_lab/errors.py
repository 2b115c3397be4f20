"""Exception hierarchy.

Every error carries a ``category`` string that the command-line front end
maps onto an exit code and echoes in machine-readable error reports.
"""

from __future__ import annotations


class InstantonLabError(Exception):
    category = "internal"


class ValidationError(InstantonLabError, ValueError):
    """Input violates a documented precondition or invariant."""

    category = "validation"


class FieldMismatchError(ValidationError):
    category = "field-mismatch"


class InhomogeneousError(ValidationError):
    category = "inhomogeneous"


class DegenerateError(ValidationError):
    """A construction hit a degenerate configuration it refuses to handle."""

    category = "degenerate"


class ConsistencyError(InstantonLabError):
    """Two independent computations that must agree did not.

    This is a bug trap, never an expected outcome.
    """

    category = "consistency"


class UndecidableError(InstantonLabError):
    """The requested quantity is not determined by the data supplied."""

    category = "undecidable"

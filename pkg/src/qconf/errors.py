"""Exception hierarchy.

The CLI maps these onto exit codes: :class:`InputError` -> 2,
:class:`BudgetError` -> 3, :class:`InvariantError` -> 4.
"""


class QconfError(Exception):
    """Base class for all errors raised by this package."""


class InputError(QconfError, ValueError):
    """Malformed or physically invalid input (bad dimensions, non-states, ...)."""


class BudgetError(QconfError):
    """A computation would exceed the configured Hilbert-space dimension cap."""


class InvariantError(QconfError):
    """An internal consistency check failed."""

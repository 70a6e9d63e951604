"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes, so raising the right class
matters: see ``penlq.cli``.
"""


class PenlqError(Exception):
    """Base class for all package-specific errors."""


class ConditionViolationError(PenlqError):
    """The penalty fails an admissibility condition (e.g. it is linear)."""


class NondifferentiableError(PenlqError, ValueError):
    """Derivative requested at a kink point of the penalty."""


class SizeGuardError(PenlqError):
    """Exact enumeration would exceed the desk-scale budget."""


class RoundingFailureError(PenlqError):
    """A solution row does not match the one-spike-per-row pattern."""


class ReductionInvariantError(PenlqError):
    """A near-optimal solution failed to decode into an equitable partition.

    The construction guarantees this cannot happen for solutions below the
    near-optimality threshold, so this error always indicates a bug in the
    caller or in this package, never a property of the instance.
    """

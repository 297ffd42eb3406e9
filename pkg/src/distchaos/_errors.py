"""Exception types shared across the package."""


class DistChaosError(Exception):
    """Base class for all package errors."""


class ContractError(DistChaosError, ValueError):
    """An input violates an operation's precondition (bad anchors, non-harmonic input, ...)."""


class ParameterError(DistChaosError, ValueError):
    """A numeric or configuration parameter is out of its admissible range."""


class RangeError(DistChaosError, OverflowError):
    """A requested value is not representable as a double."""


class BudgetError(DistChaosError, RuntimeError):
    """An iterative search or exact computation ran past its budget."""


class SingularityError(DistChaosError, ZeroDivisionError):
    """Evaluation at a singular point (e.g. Poisson kernel with x == y)."""

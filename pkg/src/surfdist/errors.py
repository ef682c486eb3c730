"""Exception hierarchy shared by the solver modules."""


class SurfdistError(Exception):
    """Base class for all errors raised by :mod:`surfdist`."""


class InputError(SurfdistError, ValueError):
    """Malformed instance data or mismatched dimensions."""


class DomainError(InputError):
    """A canonical function was evaluated outside its domain."""

    def __init__(self, message, value):
        super().__init__(f"{message} (got {value!r})")
        self.value = value


class SingularityError(SurfdistError, ArithmeticError):
    """The dual point lies outside the set where the recovery map exists."""

    def __init__(self, message, d):
        super().__init__(f"{message}: d = {list(map(float, d))}")
        self.d = d


class NumericError(SurfdistError, ArithmeticError):
    """Non-finite values appeared during an iteration."""


class ConsistencyError(SurfdistError, AssertionError):
    """Two independent computations of the same quantity disagree."""

class DomainError(ValueError):
    """Argument outside the mathematical domain of a function."""


class BudgetExceeded(RuntimeError):
    """An exhaustive enumeration would exceed its hard size budget."""

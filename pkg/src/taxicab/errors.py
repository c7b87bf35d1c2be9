"""Exception types shared across the package.

The CLI maps these onto stable exit statuses, so keep the hierarchy flat.
"""


class TaxicabError(Exception):
    pass


class ArithmeticOverflowError(TaxicabError, ArithmeticError):
    """An exact count no longer fits the machine word used for tables."""

    def __init__(self, n, j, message=None):
        self.n = n
        self.j = j
        super().__init__(message or f"exact count overflowed at n={n}, j={j}")


class ConfigurationError(TaxicabError, ValueError):
    pass


class DomainError(TaxicabError, ValueError):
    pass


class ResourceBudgetError(TaxicabError, MemoryError):
    pass


class StepBudgetError(ResourceBudgetError):
    pass


class CertificationError(TaxicabError):
    pass


class FitError(TaxicabError, ValueError):
    pass


class CacheError(TaxicabError):
    pass

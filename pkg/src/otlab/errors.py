"""Exception hierarchy.  CLI exit codes key off these classes."""


class OtlabError(Exception):
    """Base class for library errors."""


class DomainError(OtlabError, ValueError):
    """Input is well-formed but mathematically invalid (exit code 1)."""


class InvalidModulusError(DomainError):
    pass


class InvalidInstanceError(DomainError):
    pass


class InvalidFamilyError(DomainError):
    pass


class DuplicateColumnsError(DomainError):
    pass


class BudgetExceededError(OtlabError, RuntimeError):
    """An enumeration would exceed its configured budget (exit code 2)."""

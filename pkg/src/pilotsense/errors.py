"""Exception types shared across the package."""


class DomainError(ValueError):
    """A numeric argument lies outside the domain of the operation."""


class InfeasibleError(RuntimeError):
    """A search hit its cap without meeting the requested targets."""

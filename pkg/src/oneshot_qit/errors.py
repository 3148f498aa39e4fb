"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input violates a documented precondition."""


class NumericalError(RuntimeError):
    """An iterative routine failed to reach its accuracy target."""

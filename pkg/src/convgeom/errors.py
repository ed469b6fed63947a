"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition."""


class LoadError(RuntimeError):
    """Raised when an interchange directory is missing or malformed at the file level."""

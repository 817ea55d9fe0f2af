"""Exception types shared across the package."""


class DomainError(ValueError):
    """A numeric operation was asked to evaluate outside its valid domain.

    Examples: a square-root radicand that is not positive, evaluation at
    (or too close to) a pole of a response function, or a root search
    window that does not bracket exactly one root.
    """


class ConfigError(ValueError):
    """A run configuration file is missing, malformed, or inconsistent."""

"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ResourceLimitError(MemoryError):
    """A requested computation exceeds the configured size budget."""


class UsageError(ValueError):
    """Inputs are individually valid but inconsistent with each other."""


class ConfigError(ValueError):
    """An experiment configuration failed validation."""

"""Shared exception types."""


class ConfigError(ValueError):
    """Invalid configuration or parameter value."""

"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration or parameter values."""


class ParseError(ValueError):
    """Malformed input file."""


class DegenerateFitError(RuntimeError):
    """A least-squares system is too ill-conditioned to produce a usable fit."""

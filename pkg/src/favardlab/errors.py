"""Exception types shared across the library."""


class MalformedIntervalError(ValueError):
    """An interval was supplied with lo > hi, or a non-finite float endpoint."""


class SizeCapExceeded(RuntimeError):
    """A merged interval count grew past the configured resource cap."""


class PreconditionError(ValueError):
    """An operation was invoked on inputs that violate its stated preconditions."""


class ConfigError(ValueError):
    """A system description file could not be parsed."""


class DegenerateFitError(ValueError):
    """A regression was attempted on data with no usable variation."""

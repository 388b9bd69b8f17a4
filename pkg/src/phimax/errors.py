"""Exception types shared across the package."""


class PhimaxError(Exception):
    """Base class for all errors raised by phimax."""


class DimensionError(PhimaxError, ValueError):
    """Points or sets of different dimensions were combined."""


class DomainError(PhimaxError, ValueError):
    """A point lies outside the domain of a map or system."""


class AlphabetError(PhimaxError, ValueError):
    """A letter or word does not belong to the expected alphabet."""


class CapExceededError(PhimaxError, ValueError):
    """A word enumeration would exceed the configured cap."""


class ConfigError(PhimaxError, ValueError):
    """A configuration document is malformed or out of range."""


class ConvergenceError(PhimaxError, RuntimeError):
    """An iteration did not meet its tolerance within its limits."""

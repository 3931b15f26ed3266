# errors.py
# -------------------------------
# Exception hierarchy shared by the library and the CLI.
# The CLI maps these onto exit codes (see app.py).
# -------------------------------


class GenBoundError(Exception):
    """Base class for every error raised by this package."""


class DomainError(GenBoundError):
    """Raised when an index or value lies outside its declared space."""


class CapacityError(GenBoundError):
    """Raised when exact enumeration would exceed the capacity guard."""


class SupportError(GenBoundError):
    """Raised when p(w) > 0 where q(w) = 0 (absolute continuity fails)."""


class GridError(GenBoundError):
    """Raised when a loss value does not sit on the declared rational grid."""


class ArgumentError(GenBoundError):
    """Raised for invalid parameters (b <= 0, empty grids, missing fields)."""


class DimensionError(GenBoundError):
    """Raised when kernel or plan arities do not chain."""


class ConfigError(GenBoundError):
    """Raised for unreadable or schema-invalid experiment configs."""

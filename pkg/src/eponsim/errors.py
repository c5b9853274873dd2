"""Exception hierarchy shared by the analytic and simulation modules."""


class EponError(Exception):
    """Base class for all package errors."""


class DomainError(EponError, ValueError):
    """Argument outside the real domain of a Lambert W branch."""


class BracketError(EponError, ValueError):
    """Root-finding interval does not bracket a sign change."""


class DegenerateError(EponError, ValueError):
    """Formula evaluated at a point where it cannot be continued."""


class RegimeError(EponError):
    """Attempt probability too large: alpha = -e*h falls below -1/e."""


class RegionError(EponError):
    """Operation requested outside the stability region it is defined for."""


class DiscriminantError(EponError, ValueError):
    """Quadratic approximation has a negative discriminant."""


class ConfigError(EponError, ValueError):
    """Invalid parameter set, simulation config or experiment spec."""


class InsufficientDataError(EponError):
    """Not enough post-burn-in data to form an estimate."""

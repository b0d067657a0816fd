"""Input validation helpers shared by the functional core and the estimators."""
import numpy as np

__all__ = ["DomainError", "ConfigError", "check_times", "check_positive_times", "check_positive"]


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class ConfigError(ValueError):
    """Inconsistent or invalid configuration (grids, horizons, bins)."""


def check_times(t, name="t"):
    """Return ``(array, was_scalar)`` after checking ``t >= 0`` and finite."""
    scalar = np.ndim(t) == 0
    arr = np.atleast_1d(np.asarray(t, dtype=float))
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    if np.any(arr < 0):
        raise DomainError(f"{name} must be >= 0")
    return arr, scalar


def check_positive_times(t, name="t"):
    """Like :func:`check_times` but requires strictly positive times."""
    arr, scalar = check_times(t, name)
    if np.any(arr <= 0):
        raise DomainError(f"{name} must be > 0")
    return arr, scalar


def check_positive(value, name):
    value = float(value)
    if not (np.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be a finite positive number, got {value!r}")
    return value

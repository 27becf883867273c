"""Small argument checks shared by the public operations."""
import math
import numbers

from .exceptions import ArgumentError


def check_int(value, name, minimum=None, maximum=None):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ArgumentError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise ArgumentError(f"{name} must be >= {minimum}, got {value}")
    if maximum is not None and value > maximum:
        raise ArgumentError(f"{name} must be <= {maximum}, got {value}")
    return value


def check_real(value, name, minimum=None, strict=False):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ArgumentError(f"{name} must be a real number, got {value!r}") from None
    if not math.isfinite(value):
        raise ArgumentError(f"{name} must be finite, got {value}")
    if minimum is not None:
        if strict and value <= minimum:
            raise ArgumentError(f"{name} must be > {minimum}, got {value}")
        if not strict and value < minimum:
            raise ArgumentError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_probability(value, name):
    value = check_real(value, name)
    if not 0.0 <= value <= 1.0:
        raise ArgumentError(f"{name} must lie in [0, 1], got {value}")
    return value
